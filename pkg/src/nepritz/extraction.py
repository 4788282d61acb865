"""Ritz-vector and refined-vector extraction at a selected eigenvalue.

The Ritz vector is the projected null vector W z; when the projected problem
has a multidimensional null space the choice of z is meaningless, so the
extraction returns one canonical vector but raises its nonuniqueness flag
rather than guessing.  The refined vector minimizes ||T(mu) v|| over unit
v in the subspace and comes from the smallest singular triplet of T(mu) W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense_kernels import as_vector, svd
from .errors import NotAnEigenvalue
from .nep_model import MatrixFunction, eval_T
from .projection import Subspace, project

GEOM_MULT_TOL = 1e-8
RITZ_SIGMA_PRE = 1e-6


@dataclass(frozen=True)
class RitzExtraction:
    """Output of the classical extraction at mu."""

    mu: complex
    z: np.ndarray               # unit m-vector, canonical null vector of B(mu)
    x_tilde: np.ndarray         # W z, unit n-vector
    residual_norm: float        # ||T(mu) x_tilde||
    geometric_multiplicity: int
    nonunique_flag: bool


@dataclass(frozen=True)
class RefinedExtraction:
    """Output of the residual-minimizing extraction at mu.

    singular_values holds all singular values of T(mu) W ascending, so
    sigma_hats[0] = ||T(mu) x_hat|| and sigma_hats[-1] is the largest.  For a
    one-dimensional subspace there is no second singular value and the
    minimizer is trivially unique, so sigma_hat_2 is None and the gap
    certificate is granted.
    """

    mu: complex
    y: np.ndarray               # unit m-vector, smallest right singular vector
    x_hat: np.ndarray           # W y, unit n-vector
    sigma_hat_1: float
    sigma_hat_2: float | None
    sigma_hat_m: float
    singular_values: np.ndarray  # ascending
    s: np.ndarray               # left singular vector paired with sigma_hat_1
    gap_certificate: bool


def ritz_vector(
    t: MatrixFunction,
    mu: complex,
    s: Subspace,
    projected: MatrixFunction | None = None,
    gm_tol: float = GEOM_MULT_TOL,
) -> RitzExtraction:
    """Extract the canonical Ritz vector at an eigenvalue mu of the projection.

    Requires sigma_min(B(mu)) <= 1e-6 max(1, ||B(mu)||); z is the smallest
    right singular vector of B(mu) under the deterministic phase convention,
    and the geometric multiplicity counts singular values below
    gm_tol * max(1, ||B(mu)||).
    """
    b = projected if projected is not None else project(t, s)
    bmu = eval_T(b, mu, 0)
    dec = svd(bmu)
    scale = max(1.0, dec.sigma_max)
    if dec.sigma_min > RITZ_SIGMA_PRE * scale:
        raise NotAnEigenvalue(
            f"sigma_min(B(mu)) = {dec.sigma_min:.3e} too large at mu = {mu}"
        )
    z = dec.right_vectors[:, -1]
    x_tilde = s.basis @ z
    x_tilde = x_tilde / np.linalg.norm(x_tilde)
    gm = int(np.sum(dec.singular_values < gm_tol * scale))
    gm = max(gm, 1)
    return RitzExtraction(
        mu=complex(mu),
        z=z,
        x_tilde=x_tilde,
        residual_norm=float(np.linalg.norm(eval_T(t, mu, 0) @ x_tilde)),
        geometric_multiplicity=gm,
        nonunique_flag=gm > 1,
    )


def ritz_residual_for(t: MatrixFunction, mu: complex, s: Subspace, z_custom) -> float:
    """||T(mu) W z|| for a caller-chosen unit coefficient vector z.

    Lets experiments demonstrate how arbitrary the residual becomes when the
    projected null space has dimension > 1.
    """
    z = as_vector(z_custom)
    if abs(np.linalg.norm(z) - 1.0) > 1e-10:
        raise ValueError("z_custom must be unit norm")
    return float(np.linalg.norm(eval_T(t, mu, 0) @ (s.basis @ z)))


def refined_vector(t: MatrixFunction, mu: complex, s: Subspace) -> RefinedExtraction:
    """Minimize ||T(mu) v|| over unit v in the subspace via the SVD of T(mu) W.

    Always well defined; near-nonuniqueness surfaces as a revoked gap
    certificate (sigma_hat_2 - sigma_hat_1 <= 1e-10) instead of an error.
    """
    tw = eval_T(t, mu, 0) @ s.basis
    dec = svd(tw)
    m = s.dim
    ascending = dec.singular_values[::-1].copy()
    y = dec.right_vectors[:, m - 1]
    x_hat = s.basis @ y
    x_hat = x_hat / np.linalg.norm(x_hat)
    left = dec.left_vectors[:, m - 1]
    sigma2 = float(ascending[1]) if m > 1 else None
    gap_ok = True if m == 1 else (sigma2 - float(ascending[0]) > 1e-10)
    return RefinedExtraction(
        mu=complex(mu),
        y=y,
        x_hat=x_hat,
        sigma_hat_1=float(ascending[0]),
        sigma_hat_2=sigma2,
        sigma_hat_m=float(ascending[-1]),
        singular_values=ascending,
        s=left,
        gap_certificate=gap_ok,
    )


def sin_angle(a, b) -> float:
    """sin of the angle between two unit vectors, clamped to [0, 1].

    Equal to sqrt(1 - |a^H b|^2), but evaluated through the projector form
    ||(I - a a^H) b||, which stays accurate when the vectors are nearly
    parallel (the direct form cancels catastrophically below angles of about
    1e-8).  The two forms are cross-checked on their squares, where no
    cancellation amplification occurs.
    """
    av = as_vector(a)
    bv = as_vector(b)
    if abs(np.linalg.norm(av) - 1.0) > 1e-10 or abs(np.linalg.norm(bv) - 1.0) > 1e-10:
        raise ValueError("sin_angle expects unit vectors")
    c = abs(np.vdot(av, bv))
    naive_sq = max(0.0, 1.0 - min(c, 1.0) ** 2)
    val = float(np.linalg.norm(bv - av * np.vdot(av, bv)))
    if abs(val**2 - naive_sq) > 1e-12:
        raise RuntimeError("sin_angle cross-check failed")
    return min(max(val, 0.0), 1.0)
