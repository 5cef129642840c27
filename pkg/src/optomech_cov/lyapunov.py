"""Stationary covariance matrix from the continuous Lyapunov equation.

Solves ``A V + V A^T = -D`` by vectorization: with row-major ``vec``,
``vec(A V + V A^T) = (A (x) I + I (x) A) vec(V)``. For eight modes the
64-unknown dense system is cheap and needs no Schur machinery.
"""

import numpy as np

from .dynamics import is_stable
from .errors import SolverSingularityError, UnstableDriftError

__all__ = [
    "solve_lyapunov",
    "residual",
    "symplectic_form",
    "physicality_margin",
    "is_physical",
]

PHYSICALITY_TOL = 1e-9


def residual(a, d, v):
    """Relative Frobenius residual ``||A V + V A^T + D|| / ||D||``."""
    a, d, v = (np.asarray(x, dtype=float) for x in (a, d, v))
    return float(np.linalg.norm(a @ v + v @ a.T + d) / np.linalg.norm(d))


def solve_lyapunov(a, d, tol=0.0, check_stability=True):
    """Stationary covariance of the linear system with drift ``a``, diffusion ``d``.

    Parameters
    ----------
    a : (n, n) array_like
        Drift matrix; must be stable (spectral abscissa below ``-tol``).
    d : (n, n) array_like
        Symmetric diffusion matrix.
    tol : float
        Marginal stability band passed to :func:`dynamics.is_stable`.

    Returns
    -------
    ndarray
        Symmetrized solution ``V``.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n) or d.shape != (n, n):
        raise ValueError(f"shape mismatch: A {a.shape}, D {d.shape}")
    if check_stability:
        verdict = is_stable(a, tol)
        if not verdict.stable:
            raise UnstableDriftError(
                f"drift matrix is not stable (spectral abscissa {verdict.abscissa:.6g})")
    eye = np.eye(n)
    op = np.kron(a, eye) + np.kron(eye, a)
    try:
        vec = np.linalg.solve(op, -d.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SolverSingularityError(f"Lyapunov operator is singular: {exc}") from exc
    if not np.all(np.isfinite(vec)):
        raise SolverSingularityError("Lyapunov solve produced non-finite values")
    v = vec.reshape(n, n)
    return 0.5 * (v + v.T)


def symplectic_form(n_modes):
    """Block-diagonal ``J`` with 2x2 blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def physicality_margin(v):
    """Smallest eigenvalue of the Hermitian matrix ``V + i J / 2``.

    Non-negative for covariance matrices of physical states (uncertainty
    principle with vacuum variance 1/2).
    """
    v = np.asarray(v, dtype=float)
    j = symplectic_form(v.shape[0] // 2)
    return float(np.linalg.eigvalsh(v + 0.5j * j)[0])


def is_physical(v, tol=PHYSICALITY_TOL):
    return physicality_margin(v) >= -tol
