"""Dense complex linear-algebra primitives used by every other module.

All routines work on plain ``numpy`` arrays of ``complex128`` at desk scale
(n <= 64 for eigensolves) and follow a deterministic phase convention: in any
returned orthonormal column, the entry of largest magnitude is made real and
positive.  This keeps vector-valued regression tests bit-stable; the
underlying decompositions are only unique up to a unit scalar per column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionGuard,
    NearSingular,
    RankDeficient,
)

ORTHO_TOL = 1e-12
EIG_DIM_MAX = 64


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex array; reject NaN/Inf entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a nonempty matrix, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("matrix has NaN/Inf entries")
    return a


def as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if a.size < 1 or not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("expected a finite nonempty vector")
    return a


def norm2(m) -> float:
    """Operator 2-norm (largest singular value)."""
    a = np.atleast_2d(np.asarray(m, dtype=complex))
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def phase_fix(v: np.ndarray) -> np.ndarray:
    """Rescale each column by a unit scalar so its largest-|.| entry is real > 0.

    Ties on magnitude resolve to the first maximal index.  Zero columns are
    returned unchanged.
    """
    a = np.array(v, dtype=complex, copy=True)
    cols = a if a.ndim == 2 else a.reshape(-1, 1)
    for k in range(cols.shape[1]):
        col = cols[:, k]
        i = int(np.argmax(np.abs(col)))
        piv = col[i]
        if abs(piv) > 0.0:
            cols[:, k] = col * (np.conj(piv) / abs(piv))
    return a


def orthonormalize(m) -> np.ndarray:
    """Orthonormal basis of the column span, deterministic.

    Modified Gram-Schmidt with one re-orthogonalization pass, columns taken
    in input order, phase fixed per column.  Requires full column rank up to
    ``ORTHO_TOL * ||M||``.
    """
    a = as_matrix(m)
    n, k = a.shape
    if k > n:
        raise RankDeficient(f"{k} columns cannot be independent in dimension {n}")
    scale = norm2(a)
    tol = ORTHO_TOL * max(scale, 1e-300)
    q = np.zeros((n, k), dtype=complex)
    for j in range(k):
        v = a[:, j].copy()
        for _ in range(2):  # twice is enough for 1e-12 orthogonality
            for i in range(j):
                v -= q[:, i] * (np.conj(q[:, i]) @ v)
        r = np.linalg.norm(v)
        if r < tol:
            raise RankDeficient(f"column {j} is dependent (residual {r:.3e} < {tol:.3e})")
        q[:, j] = v / r
    return phase_fix(q)


def complete_basis(v: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the orthogonal complement of span(V).

    Sweeps the standard basis in index order, keeping each vector whose
    residual after projection against V and the columns already kept is
    nonnegligible.  V must have orthonormal columns.
    """
    v = as_matrix(v)
    n, k = v.shape
    out = np.zeros((n, n - k), dtype=complex)
    got = 0
    for idx in range(n):
        if got == n - k:
            break
        w = np.zeros(n, dtype=complex)
        w[idx] = 1.0
        for _ in range(2):
            w -= v @ (v.conj().T @ w)
            if got:
                w -= out[:, :got] @ (out[:, :got].conj().T @ w)
        r = np.linalg.norm(w)
        if r > 1e-8:
            out[:, got] = w / r
            got += 1
    if got != n - k:
        raise RankDeficient("could not complete an orthonormal basis")
    return phase_fix(out)


def householder_complement(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the complement of a single unit vector.

    Built from the Householder reflector mapping x onto a coordinate axis, so
    the result is a deterministic n x (n-1) matrix with columns orthogonal
    to x.
    """
    x = as_vector(x)
    n = x.size
    if n == 1:
        return np.zeros((1, 0), dtype=complex)
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        raise ValueError("cannot complement the zero vector")
    x = x / nrm
    phase = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
    v = x + phase * np.eye(n, 1, dtype=complex).ravel()
    v /= np.linalg.norm(v)
    h = np.eye(n, dtype=complex) - 2.0 * np.outer(v, np.conj(v))
    # first column of H is parallel to x; the rest span its complement
    return phase_fix(h[:, 1:])


@dataclass(frozen=True)
class SvdResult:
    """Full SVD with singular values sorted descending.

    The smallest singular triplet is always the last entry; callers that need
    ascending order (refined extraction) index from the end.
    """

    left_vectors: np.ndarray       # columns u_1..u_p, p = min(rows, cols) or full
    singular_values: np.ndarray    # descending, >= 0
    right_vectors: np.ndarray      # columns v_1..v_p

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0])

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[-1])


def svd(m) -> SvdResult:
    """Full SVD with the deterministic phase convention.

    Verifies reconstruction and orthogonality to 1e-12 before returning, so a
    violated invariant surfaces as ConvergenceFailure (kernel bug), never as
    silent data corruption.
    """
    a = as_matrix(m)
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(f"SVD did not converge: {exc}") from None
    v = vh.conj().T
    p = min(a.shape)
    # one unit scalar per coupled pair (u_k, v_k); extra null-space columns
    # are phase-fixed independently, which leaves U S V^H unchanged
    for k in range(p):
        i = int(np.argmax(np.abs(u[:, k])))
        piv = u[i, k]
        if abs(piv) > 0.0:
            c = np.conj(piv) / abs(piv)
            u[:, k] = u[:, k] * c
            v[:, k] = v[:, k] * c
    if u.shape[1] > p:
        u[:, p:] = phase_fix(u[:, p:])
    if v.shape[1] > p:
        v[:, p:] = phase_fix(v[:, p:])
    smat = np.zeros(a.shape, dtype=complex)
    smat[:p, :p] = np.diag(s)
    scale = max(1.0, float(s[0]) if s.size else 0.0)
    if norm2(a - u @ smat @ v.conj().T) > 1e-12 * scale:
        raise ConvergenceFailure("SVD reconstruction check failed")
    if (norm2(u.conj().T @ u - np.eye(u.shape[1])) > 1e-12
            or norm2(v.conj().T @ v - np.eye(v.shape[1])) > 1e-12):
        raise ConvergenceFailure("SVD orthogonality check failed")
    return SvdResult(left_vectors=u, singular_values=s.astype(float), right_vectors=v)


def singular_values(m) -> np.ndarray:
    """Singular values only (descending); cheaper than a full svd()."""
    return np.linalg.svd(as_matrix(m), compute_uv=False).astype(float)


def sigma_min(m) -> float:
    return float(singular_values(m)[-1])


def eig_dense(m) -> list[tuple[complex, np.ndarray]]:
    """All eigenpairs of a square matrix, n <= 64.

    Pairs are sorted ascending by |lambda|, ties by argument; eigenvectors are
    unit norm and phase fixed.  Residuals ||Mv - lambda v|| are checked
    against 1e-9 * ||M||.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("eig_dense expects a square matrix")
    if n > EIG_DIM_MAX:
        raise DimensionGuard(f"n = {n} exceeds the desk-scale limit {EIG_DIM_MAX}")
    try:
        w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(f"eigensolver did not converge: {exc}") from None
    v = phase_fix(v)
    order = sorted(range(n), key=lambda i: (abs(w[i]), np.angle(w[i])))
    scale = max(norm2(a), 1e-300)
    pairs = []
    for i in order:
        vec = v[:, i] / np.linalg.norm(v[:, i])
        if np.linalg.norm(a @ vec - w[i] * vec) > 1e-9 * scale:
            raise ConvergenceFailure("eigenpair residual check failed")
        pairs.append((complex(w[i]), vec))
    return pairs


def solve_linear(m, b) -> np.ndarray:
    """Solve M x = b for square M that is not numerically singular.

    Raises NearSingular when sigma_min(M) <= 1e-14 * sigma_max(M); the
    residual of the returned solution is checked.
    """
    a = as_matrix(m)
    rhs = as_vector(b)
    if a.shape[0] != a.shape[1] or a.shape[0] != rhs.size:
        raise ValueError("incompatible shapes in solve_linear")
    s = singular_values(a)
    if s[-1] <= 1e-14 * s[0]:
        raise NearSingular(f"sigma_min/sigma_max = {s[-1]:.3e}/{s[0]:.3e}")
    x = np.linalg.solve(a, rhs)
    res = np.linalg.norm(a @ x - rhs)
    if res > 1e-10 * (norm2(a) * np.linalg.norm(x) + np.linalg.norm(rhs)):
        raise ConvergenceFailure("linear solve residual check failed")
    return x
