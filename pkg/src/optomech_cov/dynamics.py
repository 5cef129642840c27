"""Linearized fluctuation dynamics: drift and diffusion matrices, stability.

Quadrature ordering throughout the package is ``(X, Y, Q1, P1, Q2, P2, q, p)``:
cavity field, Bogoliubov mode of side 1, Bogoliubov mode of side 2, membrane.
"""

from fractions import Fraction
import math
from typing import NamedTuple

import numpy as np

from .errors import DegeneratePivotError, NumericalFailureError

__all__ = [
    "MODES",
    "build_drift",
    "build_diffusion",
    "StabilityResult",
    "spectral_abscissa",
    "is_stable",
    "characteristic_polynomial",
    "routh_table",
    "routh_hurwitz",
    "stability_tolerance",
]

MODES = ("X", "Y", "Q1", "P1", "Q2", "P2", "q", "p")
STABILITY_REL_TOL = 1e-9
PIVOT_TOL = 1e-12


def build_drift(p, d, mf):
    """Drift matrix of the linearized Langevin equations.

    Only ``mf.alpha_re``, ``mf.alpha_im`` and ``mf.delta_eff`` are read.
    """
    ar, ai, delta = mf.alpha_re, mf.alpha_im, mf.delta_eff
    kappa, gc, gm = p.kappa, p.gamma_c, p.gamma_m
    s2 = math.sqrt(2.0)
    z1, z2, xi = d.zeta_1, d.zeta_2, p.xi
    a = np.zeros((8, 8))
    a[0, 0], a[0, 1] = -kappa, delta
    a[1, 0], a[1, 1] = -delta, -kappa
    a[0, 2], a[0, 4], a[0, 6] = s2 * z1 * ai, s2 * z2 * ai, -2.0 * xi * ai
    a[1, 2], a[1, 4], a[1, 6] = -s2 * z1 * ar, -s2 * z2 * ar, 2.0 * xi * ar
    a[2, 2], a[2, 3] = -gc, d.omega_1
    a[3, 0], a[3, 1], a[3, 2], a[3, 3] = -s2 * z1 * ar, -s2 * z1 * ai, -d.omega_1, -gc
    a[4, 4], a[4, 5] = -gc, d.omega_2
    a[5, 0], a[5, 1], a[5, 4], a[5, 5] = -s2 * z2 * ar, -s2 * z2 * ai, -d.omega_2, -gc
    a[6, 6], a[6, 7] = -gm, p.omega_m
    a[7, 0], a[7, 1], a[7, 6], a[7, 7] = 2.0 * xi * ar, 2.0 * xi * ai, -p.omega_m, -gm
    return a


def build_diffusion(p, d):
    """Diagonal diffusion matrix for thermal baths at the model occupancies."""
    optical = p.kappa * (2.0 * p.n_ph + 1.0)
    bec_1 = p.gamma_c * (2.0 * d.n_c_1 + 1.0)
    bec_2 = p.gamma_c * (2.0 * d.n_c_2 + 1.0)
    membrane = p.gamma_m * (2.0 * d.n_m + 1.0)
    return np.diag([optical, optical, bec_1, bec_1, bec_2, bec_2, membrane, membrane])


def stability_tolerance(p, rel=STABILITY_REL_TOL):
    """Marginal band ``rel * kappa`` for :func:`is_stable` (default ``1e-9 kappa``)."""
    return rel * p.kappa


class StabilityResult(NamedTuple):
    stable: bool
    abscissa: float

    def __bool__(self):
        return self.stable


def spectral_abscissa(a):
    """Largest real part among the eigenvalues of ``a``."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericalFailureError("drift matrix contains non-finite entries")
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigenvalue solver failed: {exc}") from exc
    return float(np.max(eig.real))


def is_stable(a, tol=0.0):
    """Return ``(stable, abscissa)``.

    A system is stable when its spectral abscissa is below ``-tol``; points
    inside the marginal band ``[-tol, tol]`` count as unstable.
    """
    abscissa = spectral_abscissa(a)
    return StabilityResult(abscissa < -tol, abscissa)


def _exact_integer_matrix(a):
    """Scale ``a`` by a power of two so every entry is an exact integer.

    Float entries are dyadic rationals, so the scaled matrix is exact and the
    positive factor leaves the sign pattern of the Routh table unchanged.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericalFailureError("matrix contains non-finite entries")
    exponents = [Fraction(float(x)).denominator.bit_length() - 1 for x in a.flat if x != 0]
    shift = max(exponents, default=0)
    return [[int(Fraction(float(x)) * 2**shift) for x in row] for row in a]


def characteristic_polynomial(a):
    """Exact coefficients of ``det(s I - c a)`` for some power of two ``c > 0``.

    Coefficients are returned as :class:`fractions.Fraction`, highest degree
    first, computed by the Faddeev-LeVerrier recursion in exact arithmetic.
    The scale ``c`` is irrelevant for root-sign questions.
    """
    m = _exact_integer_matrix(a)
    n = len(m)
    coeffs = [Fraction(1)]
    # M_k = A M_{k-1} + c_{k-1} I, c_k = -tr(A M_k) / k
    prev = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        c_prev = coeffs[-1]
        mk = [[sum((m[i][t] * prev[t][j] for t in range(n)), Fraction(0))
               + (c_prev if i == j else 0) for j in range(n)] for i in range(n)]
        trace = sum(sum(m[i][t] * mk[t][i] for t in range(n)) for i in range(n))
        coeffs.append(-Fraction(trace) / k)
        prev = mk
    return coeffs


def _balance(coeffs):
    # rescale s -> 2**k s so the roots have geometric-mean magnitude ~ 1
    nonzero = [i for i, c in enumerate(coeffs) if c != 0]
    last = nonzero[-1]
    if last == 0:
        return coeffs
    tail = coeffs[last]
    log2 = (math.log2(abs(tail.numerator)) - math.log2(tail.denominator)
            - math.log2(abs(coeffs[0].numerator)) + math.log2(coeffs[0].denominator))
    k = round(log2 / last)
    return [c / Fraction(2) ** (k * i) for i, c in enumerate(coeffs)]


def routh_table(coeffs, pivot_tol=PIVOT_TOL):
    """Exact Routh array for a polynomial given highest degree first.

    The polynomial is first rescaled so its roots are of order one. A pivot
    counts as degenerate when it is zero or smaller than ``pivot_tol`` times
    the largest magnitude in its own and preceding row.
    """
    coeffs = [Fraction(c) for c in coeffs]
    if coeffs[0] <= 0:
        raise ValueError("leading coefficient must be positive")
    coeffs = _balance(coeffs)
    rows = [coeffs[0::2], coeffs[1::2]]
    width = len(rows[0])
    rows[1] = rows[1] + [Fraction(0)] * (width - len(rows[1]))
    for _ in range(len(coeffs) - 2):
        upper, lower = rows[-2], rows[-1]
        pivot = lower[0]
        scale = max(abs(x) for x in upper + lower)
        if pivot == 0 or abs(pivot) <= Fraction(pivot_tol) * scale:
            raise DegeneratePivotError(
                f"Routh pivot {float(pivot):.3e} in row {len(rows) - 1} is degenerate")
        new = [(pivot * upper[j + 1] - upper[0] * lower[j + 1]) / pivot
               for j in range(width - 1)] + [Fraction(0)]
        rows.append(new)
    if rows[-1][0] == 0:
        raise DegeneratePivotError("last Routh pivot vanishes")
    return rows


def routh_hurwitz(a, pivot_tol=PIVOT_TOL):
    """Routh-Hurwitz stability verdict, independent of any eigen-solver."""
    rows = routh_table(characteristic_polynomial(a), pivot_tol=pivot_tol)
    return all(row[0] > 0 for row in rows)
