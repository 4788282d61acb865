"""Command-line harness.

Subcommands map onto the canned experiments: ``example1`` (exact-capture
degenerate projection), ``example2`` (perturbed-subspace statistics),
``sweep`` (deviation ladder on a user problem file), and ``verify-all``
(every bound evaluator over the built-in suite).  The exit code is 0 exactly
when every check or applicable bound holds, so the harness doubles as a CI
gate.  A JSON config file can mirror any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import experiments as ex
from .errors import NepRitzError
from .nep_model import load_problem


def _parse_selection(text: str) -> tuple[str, complex | None]:
    if text == "oracle":
        return "oracle", None
    if text.startswith("target="):
        try:
            return "target", complex(text.split("=", 1)[1])
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse target value in {text!r}")
    raise argparse.ArgumentTypeError("selection must be 'oracle' or 'target=<complex>'")


def _parse_eps_list(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("epsilon list is empty")
    if any(not 0.0 < v < 1.0 for v in values):
        raise argparse.ArgumentTypeError("epsilon values must lie in (0, 1)")
    return values


_GLOBAL_DEFAULTS = {
    "selection": "oracle",
    "slack": None,
    "tau_deriv": 1e-2,
    "json": None,
    "csv": None,
    "grid_density": 12,
    "sigma": 1e-4,
    "seeds": 20,
    "seed_base": 42,
    "eps": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
    "trials": 5,
    "subspace_dim": 2,
    "suite": "builtin",
    "out": None,
    "problem": None,
}


def _merge_config(args: argparse.Namespace) -> dict:
    """config-file values fill unset flags; built-in defaults fill the rest."""
    merged = dict(_GLOBAL_DEFAULTS)
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text())
        unknown = set(loaded) - set(merged)
        if unknown:
            raise SystemExit(f"unknown config keys: {sorted(unknown)}")
        merged.update(loaded)
    for key in merged:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if isinstance(merged["eps"], str):
        merged["eps"] = _parse_eps_list(merged["eps"])
    if isinstance(merged["selection"], str):
        merged["selection"] = _parse_selection(merged["selection"])
    return merged


def _emit(doc: dict, json_path, csv_path, csv_rows=None) -> None:
    if json_path:
        Path(json_path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if csv_path and csv_rows is not None:
        header = sorted({k for row in csv_rows for k in row})
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=header, restval="")
            writer.writeheader()
            for row in csv_rows:
                writer.writerow(row)


def _record_rows(records: list[dict]) -> list[dict]:
    rows = []
    for r in records:
        row = {
            "epsilon": repr(r["epsilon"]),
            "seed": r["seed"],
            "mu_re": repr(r["mu"][0]),
            "mu_im": repr(r["mu"][1]),
            "mu_dist": repr(r["mu_dist"]),
            "sin_ritz": repr(r["sin_ritz"]),
            "sin_refined": repr(r["sin_refined"]),
            "rho_ritz": repr(r["rho_ritz"]),
            "sigma_hat_1": repr(r["sigma_hat_1"]),
        }
        for tid, verdict in r["verdicts"].items():
            row[f"verdict_{tid}"] = "" if verdict is None else int(verdict)
        rows.append(row)
    rows.sort(key=lambda row: (row["epsilon"], row["seed"]))
    return rows


def _cmd_example1(cfg: dict) -> int:
    mode, target = cfg["selection"]
    if mode == "target":
        # full-space variant: the projected spectrum has two points to choose from
        import numpy as np

        from .projection import Subspace

        t, ref, _ = ex.fixture_problem()
        s = Subspace.from_basis(np.eye(3, dtype=complex))
        case = ex.analyze_case(t, ref, s, region_center=target, region_radius=1.0,
                               target=target, slack=cfg["slack"])
        doc = {
            "ok": True,
            "mu": [case.mu.real, case.mu.imag],
            "sin_refined": case.sin_refined,
            "verdicts": case.verdicts(),
        }
        print(f"selected value {case.mu:.6g} for target {target:.6g}")
        _emit(doc, cfg["json"], cfg["csv"], [])
        return 0
    result = ex.run_example1(slack=cfg["slack"], tau_deriv=float(cfg["tau_deriv"]))
    for c in result["checks"]:
        print(f"[{'PASS' if c['ok'] else 'FAIL'}] {c['name']}: {c['value']:.3e}")
    _emit(result, cfg["json"], cfg["csv"], [])
    return 0 if result["ok"] else 1


def _cmd_example2(cfg: dict) -> int:
    result = ex.run_example2(
        sigma=float(cfg["sigma"]),
        seeds=tuple(range(int(cfg["seeds"]))),
        seed_base=int(cfg["seed_base"]),
        slack=cfg["slack"],
        tau_deriv=float(cfg["tau_deriv"]),
    )
    for c in result["checks"]:
        print(f"[{'PASS' if c['ok'] else 'FAIL'}] {c['name']}: {c['value']:.3e}")
    if result["anomalous_seeds"]:
        print(f"anomalous seeds: {result['anomalous_seeds']}")
    _emit(result, cfg["json"], cfg["csv"], _record_rows(result["records"]))
    return 0 if result["ok"] else 1


def _cmd_sweep(cfg: dict) -> int:
    if not cfg["problem"]:
        raise SystemExit("sweep requires --problem pointing to a problem JSON file")
    t, ref = load_problem(cfg["problem"])
    if ref is None:
        raise SystemExit("sweep needs a problem file with a 'reference' block")
    _, target = cfg["selection"]
    result = ex.run_sweep(
        t, ref,
        eps_list=cfg["eps"],
        trials=int(cfg["trials"]),
        m=int(cfg["subspace_dim"]),
        seed_base=int(cfg["seed_base"]),
        slack=cfg["slack"],
        tau_deriv=float(cfg["tau_deriv"]),
        grid_density=int(cfg["grid_density"]),
        target=target,
    )
    print(f"slope |mu - lambda*| vs eps: {result['slope_mu']:.3f}")
    print(f"slope sin(refined angle) vs eps: {result['slope_refined']:.3f}")
    if result["failures"]:
        for line in result["failures"]:
            print(f"[error] {line}")
    _emit(result, cfg["json"], cfg["csv"], _record_rows(result["records"]))
    return 0 if result["ok"] else 1


def _cmd_verify_all(cfg: dict) -> int:
    if cfg["suite"] != "builtin":
        raise SystemExit(f"unknown suite {cfg['suite']!r}; only 'builtin' exists")
    result = ex.verify_all(out_dir=cfg["out"], slack=cfg["slack"],
                           tau_deriv=float(cfg["tau_deriv"]))
    print(
        f"{result['n_reports']} bound reports over {result['n_instances']} instances; "
        f"{result['n_inapplicable']} inapplicable"
    )
    for inst, tid in result["failures"]:
        print(f"[FAIL] {inst}: {tid}")
    for inst, msg in result["errors"]:
        print(f"[error] {inst}: {msg}")
    if result["ok"]:
        print("all applicable bounds hold")
    _emit(result, cfg["json"], cfg["csv"], None)
    return 0 if result["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file mirroring the flags; flags win")
    common.add_argument("--selection", type=_parse_selection,
                        help="oracle | target=<complex>")
    common.add_argument("--slack", type=float,
                        help="override the relative slack of every bound check")
    common.add_argument("--tau-deriv", dest="tau_deriv", type=float,
                        help="derivative-signature detection threshold")
    common.add_argument("--json", help="write the result document to this path")
    common.add_argument("--csv", help="write per-record CSV to this path")
    common.add_argument("--grid-density", dest="grid_density", type=int,
                        help="Newton grid density for exponential problems")

    p = argparse.ArgumentParser(
        prog="nepritz",
        description="subspace extraction laboratory for nonlinear eigenvalue problems",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("example1", parents=[common],
                   help="exact-capture degenerate projection checks")

    p2 = sub.add_parser("example2", parents=[common],
                        help="perturbed-subspace statistics")
    p2.add_argument("--sigma", type=float, help="perturbation standard deviation")
    p2.add_argument("--seeds", type=int, help="number of seeds")
    p2.add_argument("--seed-base", dest="seed_base", type=int)

    p3 = sub.add_parser("sweep", parents=[common], help="deviation sweep on a problem")
    p3.add_argument("--problem", help="problem JSON file")
    p3.add_argument("--eps", type=_parse_eps_list, help="comma-separated deviations")
    p3.add_argument("--trials", type=int)
    p3.add_argument("--subspace-dim", dest="subspace_dim", type=int)
    p3.add_argument("--seed-base", dest="seed_base", type=int)

    p4 = sub.add_parser("verify-all", parents=[common],
                        help="run every bound over the built-in suite")
    p4.add_argument("--suite", help="suite name (builtin)")
    p4.add_argument("--out", help="directory for reports.jsonl / summary.csv")

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _merge_config(args)
    handler = {
        "example1": _cmd_example1,
        "example2": _cmd_example2,
        "sweep": _cmd_sweep,
        "verify-all": _cmd_verify_all,
    }[args.command]
    try:
        return handler(cfg)
    except NepRitzError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
