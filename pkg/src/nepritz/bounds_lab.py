"""Numerical evaluation of both sides of every error bound, with receipts.

Every evaluator returns one or more BoundReport objects carrying the measured
left side, the bound's right side, every intermediate constant, the slack
that was allowed, and a pass/fail verdict.  Constants the theory only
asserts to exist (the remainder bounds gamma and beta, the derivative floor
alpha) are estimated by disc sampling -- maxima get a 1.5x safety factor,
minima none -- and the estimates are recorded so a report can be audited
from its serialized form alone.

Hypothesis violations raise HypothesisFailed (or a sibling of
InapplicableBound); suite runners catch those and record the bound as
inapplicable rather than failed.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dense_kernels import (
    as_matrix,
    as_vector,
    householder_complement,
    norm2,
    singular_values,
)
from .errors import (
    DegenerateRatio,
    DegenerateSigma,
    HypothesisFailed,
    NotAnEigenvalue,
)
from .extraction import RefinedExtraction, RitzExtraction, sin_angle
from .nep_model import MatrixFunction, eval_T, taylor_remainder_const
from .projection import PerturbationWitness, Subspace

DEFAULT_FLOOR = 1e-12
SANDWICH_ABS_SLACK = 1e-8
IDENTITY_TOL = 1e-8
RATE_REL_SLACK = 0.05

# central stencils of second-order accuracy: order -> {offset: coefficient}
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
    5: {-3: -0.5, -2: 2.0, -1: -2.5, 1: 2.5, 2: -2.0, 3: 0.5},
}
_HALFWIDTH = {0: 0, 1: 1, 2: 1, 3: 2, 4: 2, 5: 3}


@dataclass(frozen=True)
class BoundReport:
    """One inequality: lhs <= rhs * (1 + slack_allowance) + slack_floor."""

    theorem_id: str
    lhs: float
    rhs: float
    holds: bool
    slack_allowance: float
    intermediates: dict[str, float] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        floor = self.intermediates.get("slack_floor", 0.0)
        return self.rhs * (1.0 + self.slack_allowance) + floor - self.lhs

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "slack_allowance": self.slack_allowance,
            "intermediates": dict(self.intermediates),
        }


def _report(theorem_id, lhs, rhs, rel_slack, floor, inter) -> BoundReport:
    inter = {k: float(v) for k, v in inter.items()}
    inter["slack_floor"] = float(floor)
    holds = float(lhs) <= float(rhs) * (1.0 + float(rel_slack)) + float(floor)
    return BoundReport(
        theorem_id=theorem_id,
        lhs=float(lhs),
        rhs=float(rhs),
        holds=bool(holds),
        slack_allowance=float(rel_slack),
        intermediates=inter,
    )


# ---------------------------------------------------------------------------
# derivative profile of sigma_min(B(.)) along a ray
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DerivativeProfile:
    """Finite-difference estimates of d^j/dt^j sigma_min(B(l* + t d)) at t=0.

    Estimates whose magnitude does not clear 5x the rounding-noise floor of
    their stencil are marked unreliable and excluded from order detection.
    The vanishing order m makes derivatives below it decay like
    |g^(j)| = O(r^(m-j)) with r the disc radius, so detected_m_mu is the
    smallest reliable j >= 1 that breaks the decay cascade:
    |g^(j)| > r |g^(j+1)| / (tau_deriv (j+1)).  Normalizing by the largest
    derivative instead would misdetect whenever another eigenvalue of B sits
    within a few hundred r of the center, where high orders are genuinely
    huge; None when no reliable signature exists (rate machinery
    inapplicable).

    sigma_min profiles are taken along a one-dimensional ray: for complex
    arguments sigma_min is only real-analytic along real-parametrized paths,
    so the detected order is direction-dependent by construction and the
    direction is recorded.
    """

    center: complex
    direction: complex
    h: float
    estimates: list[float]            # index j = 0..max_order
    noise_floors: list[float]
    reliable: list[bool]
    detected_m_mu: int | None
    alpha_estimate: float | None      # min |g^(m)| over the sampled disc
    sigma_min_multiplicity: int
    readings_agree: bool | None       # derivative order vs singular-value multiplicity
    tau_deriv: float


def _stencil_profile(g, h: float, orders: range) -> tuple[list[float], float]:
    """Evaluate all requested stencils on cached g values; return (ests, gmax)."""
    offsets = sorted({o for j in orders for o in _STENCILS[j]})
    values = {o: g(o * h) for o in offsets}
    gmax = max(abs(v) for v in values.values())
    ests = []
    for j in orders:
        acc = sum(c * values[o] for o, c in _STENCILS[j].items())
        ests.append(acc / h**j)
    return ests, gmax


def sigma_min_profile(
    b: MatrixFunction,
    lambda_star: complex,
    direction: complex = 1.0,
    max_order: int = 3,
    h: float | None = None,
    disc_radius: float | None = None,
    tau_deriv: float = 1e-2,
) -> DerivativeProfile:
    """Profile sigma_min(B(lambda)) derivatives at lambda_star along a ray.

    disc_radius is the radius of the disc over which the detected-order
    derivative is minimized to estimate alpha (callers pass |mu - l*|).  The
    default step max(1e-3, disc_radius/10) is clamped so no stencil point
    crosses the singular dip at distance disc_radius, where sigma_min kinks
    and finite differences turn meaningless.
    """
    if not 1 <= max_order <= 5:
        raise ValueError("max_order must be in 1..5")
    lam0 = complex(lambda_star)
    d = complex(direction)
    if abs(d) == 0:
        raise ValueError("direction must be nonzero")
    d = d / abs(d)
    hw = _HALFWIDTH[max_order]
    if disc_radius is not None and disc_radius <= 0:
        raise ValueError("disc_radius must be positive")
    if h is None:
        if disc_radius is None:
            h = 1e-3
        else:
            h = min(max(1e-3, disc_radius / 10.0), disc_radius / (2.0 * (hw + 1)))
    if disc_radius is None:
        disc_radius = 10.0 * h

    sig_scale = 1.0

    def g(t: float) -> float:
        nonlocal sig_scale
        s = singular_values(eval_T(b, lam0 + t * d, 0))
        sig_scale = max(sig_scale, float(s[0]))
        return float(s[-1])

    s0 = singular_values(eval_T(b, lam0, 0))
    if s0[-1] <= 1e-13:
        raise DegenerateSigma(
            "sigma_min(B(lambda_star)) vanishes; singular values are not "
            "differentiable at zero, rate machinery inapplicable"
        )
    mult = int(np.sum(np.abs(s0 - s0[-1]) <= 1e-8 * max(1.0, s0[0])))

    orders = range(0, max_order + 1)
    ests, gmax = _stencil_profile(g, h, orders)
    eps_g = 2e-15 * max(1.0, sig_scale)
    floors = [eps_g * sum(abs(c) for c in _STENCILS[j].values()) / h**j for j in orders]
    reliable = [j == 0 or abs(ests[j]) > 5.0 * floors[j] for j in orders]

    if tau_deriv <= 0:
        raise ValueError("tau_deriv must be positive")
    detected = None
    for j in range(1, max_order + 1):
        if not reliable[j]:
            continue
        nxt = abs(ests[j + 1]) if j + 1 <= max_order and reliable[j + 1] else 0.0
        if abs(ests[j]) > disc_radius * nxt / (tau_deriv * (j + 1)):
            detected = j
            break

    alpha = None
    if detected is not None:
        samples = [abs(ests[detected])]
        stencil = _STENCILS[detected]
        for frac in (0.2, 0.4, 0.6, 0.8):
            for k in range(6):
                center = lam0 + disc_radius * frac * d * np.exp(2j * np.pi * k / 6)
                vals = {o: float(singular_values(
                    eval_T(b, center + o * h * d, 0))[-1]) for o in stencil}
                est = sum(c * vals[o] for o, c in stencil.items()) / h**detected
                samples.append(abs(est))
        alpha = float(min(samples))

    return DerivativeProfile(
        center=lam0,
        direction=d,
        h=float(h),
        estimates=[float(e) for e in ests],
        noise_floors=[float(f) for f in floors],
        reliable=reliable,
        detected_m_mu=detected,
        alpha_estimate=alpha,
        sigma_min_multiplicity=mult,
        readings_agree=None if detected is None else (mult == detected),
        tau_deriv=float(tau_deriv),
    )


def jordan_block_order(m, mu: complex) -> int:
    """Size of the largest Jordan block of mu, by the rank staircase.

    Ranks of (M - mu I)^k are counted with singular-value threshold
    1e-8 * max(1, ||M - mu I||)^k; the answer is the largest k at which the
    rank still drops.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("jordan_block_order expects a square matrix")
    # the k = 1 rank test doubles as the eigenvalue check: computed
    # eigenvalues of a defective matrix scatter like eps^(1/k) and would
    # reject exact Jordan blocks, while sigma_min(M - mu I) stays at eps
    shifted = a - complex(mu) * np.eye(n)
    base = max(1.0, norm2(shifted))
    power = np.eye(n, dtype=complex)
    rank_prev = n
    largest = 0
    for k in range(1, n + 1):
        power = power @ shifted
        s = singular_values(power)
        rank_k = int(np.sum(s > 1e-8 * base**k))
        if rank_k < rank_prev:
            largest = k
            rank_prev = rank_k
        else:
            break
    if largest == 0:
        raise NotAnEigenvalue(f"{mu} is not an eigenvalue (rank never dropped)")
    return largest


# ---------------------------------------------------------------------------
# Schur-like complements against a fixed vector
# ---------------------------------------------------------------------------

def eigvec_complement_function(
    t: MatrixFunction, x_star
) -> tuple[np.ndarray, MatrixFunction]:
    """(X_perp, lambda -> X_perp^H T(lambda) X_perp) for a unit vector x_star.

    X_perp is the deterministic Householder complement, so repeated runs give
    identical matrices.
    """
    x = as_vector(x_star)
    x_perp = householder_complement(x)
    return x_perp, t.compress(x_perp)


def schur_complement_L(
    t: MatrixFunction, mu: complex, x_star
) -> tuple[np.ndarray, float]:
    """Trailing block X_perp^H T(mu) X_perp and its smallest singular value."""
    _, lfn = eigvec_complement_function(t, x_star)
    lmat = eval_T(lfn, mu, 0)
    return lmat, float(singular_values(lmat)[-1])


def remainder_radius(t: MatrixFunction, lambda_star: complex, mu: complex) -> float:
    """Sampling radius for Taylor-remainder estimation around lambda_star.

    Covers the segment to mu with headroom but stays clear of any pole.
    """
    r = max(2.0 * abs(complex(mu) - complex(lambda_star)), 1e-3)
    if t.domain_poles:
        dist = min(abs(p - complex(lambda_star)) for p in t.domain_poles)
        r = min(r, 0.45 * dist)
    if r <= 0:
        raise HypothesisFailed("no pole-free disc around lambda_star")
    return r


# ---------------------------------------------------------------------------
# bound evaluators
# ---------------------------------------------------------------------------

def perturbation_norm_bound(
    witness: PerturbationWitness,
    t: MatrixFunction,
    lambda_star: complex,
    slack: float | None = None,
) -> BoundReport:
    """||E(l*)|| <= eps/sqrt(1-eps^2) ||T(l*)|| for the constructed witness."""
    eps = witness.epsilon
    t_norm = norm2(eval_T(t, lambda_star, 0))
    lhs = norm2(witness.E_at_lambda_star)
    rhs = eps / math.sqrt(1.0 - eps**2) * t_norm
    rel = 1e-10 if slack is None else slack
    return _report(
        "perturbation_norm", lhs, rhs, rel, DEFAULT_FLOOR,
        {"epsilon": eps, "norm_T_star": t_norm},
    )


def projected_sigma_bound(
    b: MatrixFunction,
    lambda_star: complex,
    epsilon: float,
    t: MatrixFunction,
    slack: float | None = None,
) -> BoundReport:
    """sigma_min(B(l*)) <= eps/sqrt(1-eps^2) ||T(l*)||."""
    lhs = float(singular_values(eval_T(b, lambda_star, 0))[-1])
    t_norm = norm2(eval_T(t, lambda_star, 0))
    rhs = epsilon / math.sqrt(1.0 - epsilon**2) * t_norm
    rel = 1e-10 if slack is None else slack
    return _report(
        "projected_sigma_min", lhs, rhs, rel, DEFAULT_FLOOR,
        {"epsilon": epsilon, "norm_T_star": t_norm},
    )


def ritz_value_bound(
    profile: DerivativeProfile | None,
    epsilon: float,
    t: MatrixFunction,
    lambda_star: complex,
    mu: complex,
    slack: float | None = None,
) -> BoundReport:
    """|mu - l*| <= (eps/sqrt(1-eps^2) * m! / alpha * ||T(l*)||)^(1/m).

    m and alpha come from the derivative profile; when mu coincides with
    lambda_star the bound is a trivial 0 <= 0 and no profile is needed.
    """
    r = abs(complex(mu) - complex(lambda_star))
    t_norm = norm2(eval_T(t, lambda_star, 0))
    if r < 1e-13:
        return _report(
            "ritz_value_rate", r, 0.0, 0.0, DEFAULT_FLOOR,
            {"epsilon": epsilon, "norm_T_star": t_norm, "m_mu": 0, "alpha": 0.0},
        )
    if profile is None or profile.detected_m_mu is None:
        raise DegenerateSigma("no usable derivative signature at lambda_star")
    m = profile.detected_m_mu
    alpha = profile.alpha_estimate
    if alpha is None or alpha <= 0.0:
        raise DegenerateSigma("derivative floor alpha vanished over the disc")
    rhs = (
        epsilon / math.sqrt(1.0 - epsilon**2) * math.factorial(m) / alpha * t_norm
    ) ** (1.0 / m)
    rel = RATE_REL_SLACK if slack is None else slack
    return _report(
        "ritz_value_rate", r, rhs, rel, DEFAULT_FLOOR,
        {"epsilon": epsilon, "norm_T_star": t_norm, "m_mu": m, "alpha": alpha,
         "profile_h": profile.h},
    )


def residual_angle_bound(
    t: MatrixFunction,
    lambda_star: complex,
    mu: complex,
    x_star,
    candidate,
    rho: float,
    gamma: float,
    slack: float | None = None,
    theorem_id: str = "residual_to_angle",
) -> BoundReport:
    """sin(angle(x*, candidate)) <= (rho + ||T'(l*)|| |mu-l*|) / sigma_min(L(mu)).

    The theory drops an O(|mu-l*|^2) term from the numerator; the slack term
    10 gamma |mu-l*|^2 / sigma_min(L(mu)) absorbs it, gamma being the sampled
    remainder bound.
    """
    lmat, sig_l = schur_complement_L(t, mu, x_star)
    if sig_l <= 1e-12:
        raise HypothesisFailed("sigma_min(L(mu)) is not positive")
    r = abs(complex(mu) - complex(lambda_star))
    tprime = norm2(eval_T(t, lambda_star, 1))
    lhs = sin_angle(x_star, candidate)
    rhs = (rho + tprime * r) / sig_l
    rel = slack if slack is not None else \
        10.0 * gamma * r**2 / (sig_l * max(rhs, 1e-30))
    return _report(
        theorem_id, lhs, rhs, rel, DEFAULT_FLOOR,
        {"rho": rho, "norm_T_prime": tprime, "mu_dist": r,
         "sigma_min_L_mu": sig_l, "gamma": gamma},
    )


def ritz_vector_angle_bound(
    t: MatrixFunction,
    b: MatrixFunction,
    lambda_star: complex,
    mu: complex,
    s: Subspace,
    ritz: RitzExtraction,
    epsilon: float,
    x_star,
    gamma_b: float | None = None,
    slack: float | None = None,
) -> BoundReport:
    """A-priori angle bound for a *simple* extracted vector.

    sin(angle(x*, x~)) <= (1 + ||T(l*)||/(sqrt(1-eps^2) sigma_min(C(l*)))) eps
                          + ||T'(l*)|| |mu-l*| / sigma_min(C(l*)),
    with C(l*) the compression of B(l*) against the complement of z.  The
    dropped quadratic term is absorbed by a gamma_b-scaled slack, gamma_b
    being the remainder constant of the projected function.
    """
    if ritz.geometric_multiplicity > 1:
        raise HypothesisFailed(
            f"extracted value has geometric multiplicity "
            f"{ritz.geometric_multiplicity}; vector not unique"
        )
    m = s.dim
    if m < 2:
        raise HypothesisFailed("one-dimensional projection has no complement block")
    z_perp = householder_complement(ritz.z)
    c_star = z_perp.conj().T @ eval_T(b, lambda_star, 0) @ z_perp
    sig_c = float(singular_values(c_star)[-1])
    if sig_c <= 1e-12:
        raise HypothesisFailed("sigma_min(C(lambda_star)) is not positive")
    r = abs(complex(mu) - complex(lambda_star))
    t_norm = norm2(eval_T(t, lambda_star, 0))
    tprime = norm2(eval_T(t, lambda_star, 1))
    denom = math.sqrt(1.0 - epsilon**2)
    lhs = sin_angle(x_star, ritz.x_tilde)
    rhs = (1.0 + t_norm / (denom * sig_c)) * epsilon + tprime * r / sig_c
    if gamma_b is None:
        gamma_b = taylor_remainder_const(b, lambda_star, remainder_radius(b, lambda_star, mu))
    rel = slack if slack is not None else \
        10.0 * gamma_b * r**2 / (sig_c * max(rhs, 1e-30))
    return _report(
        "ritz_vector_angle", lhs, rhs, rel, DEFAULT_FLOOR,
        {"epsilon": epsilon, "norm_T_star": t_norm, "norm_T_prime": tprime,
         "mu_dist": r, "sigma_min_C_star": sig_c, "gamma_B": gamma_b},
    )


def refined_bounds(
    t: MatrixFunction,
    lambda_star: complex,
    mu: complex,
    epsilon: float,
    refined: RefinedExtraction,
    gamma: float,
    beta: float,
    x_star,
    slack: float | None = None,
) -> list[BoundReport]:
    """Residual and angle bounds for the refined vector.

    Residual:  sigma_hat_1 <= (||T(mu)|| eps + ||T'(l*)|| r + gamma r^2)
                               / sqrt(1 - eps^2)
    Angle:     sin(angle(x*, x^)) <= the same numerator divided additionally
               by the certified lower estimate
               sigma_min(L(l*)) - ||L'(l*)|| r - beta r^2,
    which must be positive (hypothesis).  The angle chain additionally needs
    a ||T(mu) x*||-sized term the stated bound folds away; the slack
    (||T'(l*)|| r + 10 gamma r^2) / lower-estimate absorbs it.
    """
    r = abs(complex(mu) - complex(lambda_star))
    denom = math.sqrt(1.0 - epsilon**2)
    x_perp, lfn = eigvec_complement_function(t, x_star)
    l_star = eval_T(lfn, lambda_star, 0)
    sig_l_star = float(singular_values(l_star)[-1])
    lprime = norm2(eval_T(lfn, lambda_star, 1))
    lower_est = sig_l_star - lprime * r - beta * r**2
    if lower_est <= 0.0:
        raise HypothesisFailed(
            "sigma_min(L(l*)) - ||L'(l*)|| r - beta r^2 <= 0; refined-vector "
            "hypothesis fails at this distance"
        )
    t_mu_norm = norm2(eval_T(t, mu, 0))
    tprime = norm2(eval_T(t, lambda_star, 1))
    numerator = t_mu_norm * epsilon + tprime * r + gamma * r**2
    inter = {
        "epsilon": epsilon, "mu_dist": r, "norm_T_mu": t_mu_norm,
        "norm_T_prime": tprime, "gamma": gamma, "beta": beta,
        "sigma_min_L_star": sig_l_star, "norm_L_prime": lprime,
        "sigma_min_L_lower_est": lower_est,
    }
    res_rel = 1e-8 if slack is None else slack
    residual_report = _report(
        "refined_residual", refined.sigma_hat_1, numerator / denom,
        res_rel, DEFAULT_FLOOR, inter,
    )
    rhs_angle = numerator / (denom * lower_est)
    ang_rel = slack if slack is not None else \
        (tprime * r + 10.0 * gamma * r**2) / (lower_est * max(rhs_angle, 1e-30))
    angle_report = _report(
        "refined_angle", sin_angle(x_star, refined.x_hat), rhs_angle,
        ang_rel, DEFAULT_FLOOR, inter,
    )
    return [residual_report, angle_report]


def refined_uniqueness_check(
    t: MatrixFunction,
    lambda_star: complex,
    mu: complex,
    refined: RefinedExtraction,
    gamma: float,
    slack: float | None = None,
) -> BoundReport:
    """Certify simplicity of the refined minimizer when the hypotheses hold.

    Hypotheses: sigma_hat_1 < sigma_2(T(l*))/2 - ||T'(l*)|| r  and
    sigma_2(T(l*)) > 2 gamma r^2.  When they hold the singular gap obeys
    sigma_hat_2 - sigma_hat_1 >= sigma_2(T(l*))/2 - gamma r^2 > 0, which is
    the reported inequality (predicted gap on the left, measured gap on the
    right).  Failed hypotheses make the check vacuous, never failed.
    """
    r = abs(complex(mu) - complex(lambda_star))
    svals = singular_values(eval_T(t, lambda_star, 0))
    sigma2 = float(svals[-2]) if svals.size >= 2 else float(svals[-1])
    tprime = norm2(eval_T(t, lambda_star, 1))
    hyp1 = refined.sigma_hat_1 < 0.5 * sigma2 - tprime * r
    hyp2 = sigma2 > 2.0 * gamma * r**2
    # the simplicity condition on sigma_min(T(mu)) alone
    simple_cond = tprime * r + gamma * r**2 < 0.5 * sigma2
    inter = {
        "sigma2_T_star": sigma2, "norm_T_prime": tprime, "mu_dist": r,
        "gamma": gamma, "hypotheses_hold": float(hyp1 and hyp2),
        "simplicity_condition": float(simple_cond),
        "gap_certificate": float(refined.gap_certificate),
    }
    rel = 1e-8 if slack is None else slack
    if not (hyp1 and hyp2) or refined.sigma_hat_2 is None:
        return _report("refined_uniqueness", 0.0, 0.0, rel, DEFAULT_FLOOR, inter)
    predicted_gap = 0.5 * sigma2 - gamma * r**2
    measured_gap = refined.sigma_hat_2 - refined.sigma_hat_1
    return _report(
        "refined_uniqueness", predicted_gap, measured_gap, rel, DEFAULT_FLOOR, inter,
    )


def angle_sandwich(
    b: MatrixFunction,
    mu: complex,
    s: Subspace,
    ritz: RitzExtraction,
    refined: RefinedExtraction,
    slack: float | None = None,
) -> list[BoundReport]:
    """Two-sided bracket of sin(angle(x~, x^)) plus the exact-identity check.

    sigma_hat_1 ||(W Z_perp)^H s|| / sigma_max(C(mu))
        <= sin(angle) <= sigma_hat_1 ||W^H s|| / sigma_min(C(mu)),
    and the middle identity
    sin(angle) = sigma_hat_1 ||C(mu)^{-1} (W Z_perp)^H s|| to 1e-8.
    Both sandwich sides are allowed 1e-8 absolute slack.
    """
    m = s.dim
    floor = SANDWICH_ABS_SLACK if slack is None else slack
    if m < 2:
        # one-dimensional projection: both vectors coincide up to phase
        inter = {"sigma_hat_1": refined.sigma_hat_1, "dim": float(m)}
        zero = 0.0
        return [
            _report("angle_sandwich_lower", zero, zero, 0.0, floor, inter),
            _report("angle_sandwich_upper", zero, zero, 0.0, floor, inter),
            _report("angle_identity", zero, 0.0, 0.0, IDENTITY_TOL, inter),
        ]
    z_perp = householder_complement(ritz.z)
    c_mu = z_perp.conj().T @ eval_T(b, mu, 0) @ z_perp
    svals = singular_values(c_mu)
    sig_min_c, sig_max_c = float(svals[-1]), float(svals[0])
    if sig_min_c <= 1e-12:
        raise HypothesisFailed("sigma_min(C(mu)) is not positive; vector not unique")
    sin_between = sin_angle(ritz.x_tilde, refined.x_hat)
    wz = s.basis @ z_perp
    coupling = wz.conj().T @ refined.s
    lower = refined.sigma_hat_1 * float(np.linalg.norm(coupling)) / sig_max_c
    upper = (
        refined.sigma_hat_1
        * float(np.linalg.norm(s.basis.conj().T @ refined.s))
        / sig_min_c
    )
    identity_val = refined.sigma_hat_1 * float(
        np.linalg.norm(np.linalg.solve(c_mu, coupling))
    )
    inter = {
        "sigma_hat_1": refined.sigma_hat_1,
        "sigma_min_C_mu": sig_min_c,
        "sigma_max_C_mu": sig_max_c,
        "sin_between": sin_between,
        "identity_value": identity_val,
    }
    return [
        _report("angle_sandwich_lower", lower, sin_between, 0.0, floor, inter),
        _report("angle_sandwich_upper", sin_between, upper, 0.0, floor, inter),
        _report(
            "angle_identity", abs(sin_between - identity_val), 0.0, 0.0,
            IDENTITY_TOL, inter,
        ),
    ]


def residual_ratio_sandwich(
    ritz: RitzExtraction,
    refined: RefinedExtraction,
    slack: float | None = None,
) -> list[BoundReport]:
    """Bracket (||r~|| / ||r^||)^2 by the singular-value mix at angle theta.

    cos^2 t + (s_2/s_1)^2 sin^2 t <= ratio^2 <= cos^2 t + (s_m/s_1)^2 sin^2 t
    with t the angle between the two extracted vectors.  Raises
    DegenerateRatio when the refined residual vanishes (ratio infinite).

    s_1 comes out of a backward-stable SVD with absolute error on the order
    of macheps * s_m, so the ratio itself carries relative noise of about
    macheps * s_m/s_1; that computable floor is added to the relative slack,
    otherwise the check turns into a coin flip once s_1/s_m drops toward
    1e-8 (both sandwich sides are exact identities on two-dimensional
    subspaces).
    """
    s1 = refined.sigma_hat_1
    if s1 <= 1e-12 * max(1.0, refined.sigma_hat_m):
        raise DegenerateRatio(
            "refined residual is numerically zero; ratio bounds are infinite"
        )
    sin_t = sin_angle(ritz.x_tilde, refined.x_hat)
    cos2 = max(0.0, 1.0 - sin_t**2)
    ratio2 = (ritz.residual_norm / s1) ** 2
    lower = cos2
    if refined.sigma_hat_2 is not None:
        lower = cos2 + (refined.sigma_hat_2 / s1) ** 2 * sin_t**2
    upper = cos2 + (refined.sigma_hat_m / s1) ** 2 * sin_t**2
    noise_rel = 64.0 * 2.2e-16 * (refined.sigma_hat_m / s1)
    rel = (1e-8 if slack is None else slack) + noise_rel
    inter = {
        "sigma_hat_1": s1,
        "sigma_hat_2": refined.sigma_hat_2 if refined.sigma_hat_2 is not None else s1,
        "sigma_hat_m": refined.sigma_hat_m,
        "sin_between": sin_t,
        "rho_ritz": ritz.residual_norm,
    }
    return [
        _report("residual_ratio_lower", lower, ratio2, rel, DEFAULT_FLOOR, inter),
        _report("residual_ratio_upper", ratio2, upper, rel, DEFAULT_FLOOR, inter),
    ]


# ---------------------------------------------------------------------------
# report serialization
# ---------------------------------------------------------------------------

def write_reports_jsonl(tagged: list[tuple[str, BoundReport]], path) -> None:
    """One JSON object per report, prefixed with its instance id."""
    lines = []
    for instance_id, rep in tagged:
        doc = {"instance_id": instance_id}
        doc.update(rep.to_dict())
        lines.append(json.dumps(doc, sort_keys=True))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def write_summary_csv(tagged: list[tuple[str, BoundReport]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance_id", "theorem_id", "lhs", "rhs", "margin"])
        for instance_id, rep in tagged:
            writer.writerow(
                [instance_id, rep.theorem_id, repr(rep.lhs), repr(rep.rhs),
                 repr(rep.margin)]
            )
