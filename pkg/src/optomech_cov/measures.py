"""Gaussian entanglement and squeezing figures of merit.

Logarithmic negativity of a two-mode reduction with blocks ``B``, ``B'``,
``C``: with ``Sigma = det B + det B' - 2 det C`` the smallest symplectic
eigenvalue of the partial transpose is

    eta_minus = sqrt((Sigma - sqrt(Sigma**2 - 4 det V_bp)) / 2)

and ``E_N = max(0, -ln(2 eta_minus))`` in nats.
"""

from dataclasses import dataclass, asdict
import enum
import math

import numpy as np

from .errors import NumericDomainError, UnstableDriftError

__all__ = [
    "Bipartition",
    "MeasureSet",
    "reduce_bipartition",
    "smallest_symplectic_eigenvalue",
    "sigma_formula_eigenvalue",
    "log_negativity",
    "squeezing_params",
    "measure_point",
    "MEASURE_COLUMNS",
]

DOMAIN_TOL = 1e-12
_J2 = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class Bipartition(enum.Enum):
    """Pairs of modes by 0-based quadrature offsets ``(first, second)``."""

    BEC1_BEC2 = (2, 4)
    BEC1_MEMBRANE = (2, 6)
    BEC2_MEMBRANE = (4, 6)
    OPTICAL_BEC1 = (0, 2)
    OPTICAL_BEC2 = (0, 4)
    OPTICAL_MEMBRANE = (0, 6)

    @property
    def indices(self):
        i, j = self.value
        return (i, i + 1, j, j + 1)


@dataclass(frozen=True)
class MeasureSet:
    e_n_b1b2: float
    e_n_b1m: float
    e_n_b2m: float
    s_q1: float
    s_p1: float
    s_q2: float
    s_p2: float
    stable: bool = True

    def as_dict(self):
        return asdict(self)


MEASURE_COLUMNS = {
    "en_b1b2": "e_n_b1b2",
    "en_b1m": "e_n_b1m",
    "en_b2m": "e_n_b2m",
    "s_q1": "s_q1",
    "s_p1": "s_p1",
    "s_q2": "s_q2",
    "s_p2": "s_p2",
}


def reduce_bipartition(v, bp, swapped=False):
    """4x4 principal submatrix ``[[B, C], [C^T, B']]`` for a bipartition.

    With ``swapped=True`` the second mode is placed first.
    """
    v = np.asarray(v, dtype=float)
    idx = list(bp.indices)
    if swapped:
        idx = idx[2:] + idx[:2]
    return v[np.ix_(idx, idx)].copy()


def sigma_formula_eigenvalue(vbp):
    """``eta_minus`` from the closed form in terms of ``Sigma``.

    ``Sigma = det B + det B' - 2 det C`` and
    ``eta_minus = sqrt((Sigma - sqrt(Sigma^2 - 4 det V)) / 2)``. Loses about
    half the digits when the two symplectic eigenvalues nearly coincide, so
    it serves as a cross-check of :func:`smallest_symplectic_eigenvalue`.
    """
    vbp = np.asarray(vbp, dtype=float)
    b, bprime, c = vbp[:2, :2], vbp[2:, 2:], vbp[:2, 2:]
    sigma = np.linalg.det(b) + np.linalg.det(bprime) - 2.0 * np.linalg.det(c)
    disc = sigma**2 - 4.0 * np.linalg.det(vbp)
    if disc < -DOMAIN_TOL * max(sigma**2, 1.0):
        raise NumericDomainError(f"negative discriminant {disc:.3e}: covariance is unphysical")
    inner = sigma - math.sqrt(max(disc, 0.0))
    if inner < -DOMAIN_TOL * max(abs(sigma), 1.0):
        raise NumericDomainError(f"negative symplectic argument {inner:.3e}")
    return math.sqrt(max(inner, 0.0) / 2.0)


def smallest_symplectic_eigenvalue(vbp):
    """``eta_minus`` of the partially transposed two-mode covariance matrix.

    The symplectic eigenvalues of a positive matrix ``W`` are the moduli of
    the eigenvalues of the Hermitian matrix ``i W^(1/2) J W^(1/2)``; this
    form stays accurate when the two eigenvalues are degenerate, where the
    closed form in :func:`sigma_formula_eigenvalue` amplifies roundoff.
    """
    vbp = np.asarray(vbp, dtype=float)
    if vbp.shape != (4, 4) or not np.all(np.isfinite(vbp)):
        raise NumericDomainError("expected a finite 4x4 covariance matrix")
    flip = np.array([1.0, 1.0, 1.0, -1.0])
    vt = 0.5 * (vbp + vbp.T) * np.outer(flip, flip)
    w, u = np.linalg.eigh(vt)
    if w[0] < -DOMAIN_TOL * max(abs(w[-1]), 1.0):
        raise NumericDomainError(f"covariance is not positive (eigenvalue {w[0]:.3e})")
    root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T
    eta_minus = float(np.min(np.abs(np.linalg.eigvalsh(1j * root @ _J2 @ root))))
    if eta_minus == 0.0:
        raise NumericDomainError("vanishing symplectic eigenvalue: covariance is unphysical")
    return eta_minus


def log_negativity(vbp):
    """Logarithmic negativity (nats) of a 4x4 two-mode covariance matrix."""
    eta_minus = smallest_symplectic_eigenvalue(vbp)
    return max(0.0, -math.log(2.0 * eta_minus))


def squeezing_params(v):
    """``(S_Q1, S_P1, S_Q2, S_P2)`` as ``2 V_ii - 1`` for the condensate quadratures."""
    v = np.asarray(v, dtype=float)
    return tuple(float(2.0 * v[i, i] - 1.0) for i in (2, 3, 4, 5))


def measure_point(p, d, mf, v):
    """Assemble the three plotted negativities and the four squeezing parameters."""
    if not mf.stable:
        raise UnstableDriftError("measures requested for an unstable branch")
    s_q1, s_p1, s_q2, s_p2 = squeezing_params(v)
    return MeasureSet(
        e_n_b1b2=log_negativity(reduce_bipartition(v, Bipartition.BEC1_BEC2)),
        e_n_b1m=log_negativity(reduce_bipartition(v, Bipartition.BEC1_MEMBRANE)),
        e_n_b2m=log_negativity(reduce_bipartition(v, Bipartition.BEC2_MEMBRANE)),
        s_q1=s_q1,
        s_p1=s_p1,
        s_q2=s_q2,
        s_p2=s_p2,
        stable=True,
    )
