"""Classical steady state of the driven four-mode system.

Eliminating the membrane and condensate mean fields leaves a cubic in the
intracavity photon number ``I = |alpha|**2``::

    c**2 I**3 - 2 delta_c c I**2 + (delta_c**2 + kappa**2) I - eta**2 = 0

where ``c`` collects the static radiation-pressure shifts of all three
oscillators, and the effective detuning is ``delta_c - c * I``. Up to three
branches exist (optical bistability).
"""

from dataclasses import dataclass, replace

import numpy as np

from .dynamics import STABILITY_REL_TOL, build_drift, is_stable, stability_tolerance
from .errors import NoPhysicalRootError

__all__ = [
    "MeanFields",
    "BRANCH_POLICIES",
    "nonlinear_shift",
    "cubic_coefficients",
    "mean_fields_from_intensity",
    "solve_mean_fields",
    "select_branch",
    "mean_field_residuals",
]

BRANCH_POLICIES = ("continuation", "lowest", "highest")
IMAG_REL_TOL = 1e-6
DISTINCT_REL_TOL = 1e-8


@dataclass(frozen=True)
class MeanFields:
    alpha_re: float
    alpha_im: float
    intensity: float
    beta_re: float
    beta_im: float
    q_bar_1: float
    p_bar_1: float
    q_bar_2: float
    p_bar_2: float
    delta_eff: float
    stable: bool
    abscissa: float = float("nan")

    @property
    def alpha(self):
        return complex(self.alpha_re, self.alpha_im)

    @property
    def beta(self):
        return complex(self.beta_re, self.beta_im)


def nonlinear_shift(p, d):
    """Detuning shift per intracavity photon, ``c`` in the module docstring."""
    c = 2.0 * p.xi**2 * p.omega_m / (p.omega_m**2 + p.gamma_m**2)
    for omega, zeta in ((d.omega_1, d.zeta_1), (d.omega_2, d.zeta_2)):
        c += zeta**2 * omega / (omega**2 + p.gamma_c**2)
    return c


def cubic_coefficients(p, d):
    """Coefficients of the intensity cubic, highest degree first."""
    c = nonlinear_shift(p, d)
    return np.array([c**2, -2.0 * p.delta_c * c,
                     p.delta_c**2 + p.kappa**2, -p.eta**2])


def _polish(coeffs, x):
    # Newton iterations until the step is below 1e-14 relative
    deriv = np.polyder(coeffs)
    for _ in range(50):
        f = np.polyval(coeffs, x)
        df = np.polyval(deriv, x)
        if df == 0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-14 * max(abs(x), 1e-300):
            break
    return x


def _intensity_roots(p, d):
    c = nonlinear_shift(p, d)
    if c == 0:
        return [p.eta**2 / (p.delta_c**2 + p.kappa**2)]
    coeffs = cubic_coefficients(p, d)
    candidates = np.roots(coeffs)
    scale = max(np.max(np.abs(candidates)), 1e-300)
    real = []
    for z in candidates:
        if abs(z.imag) <= IMAG_REL_TOL * max(abs(z), scale * 1e-12):
            x = _polish(coeffs, float(z.real))
            if x >= 0:
                real.append(x)
    real.sort()
    distinct = []
    for x in real:
        if not distinct or abs(x - distinct[-1]) > DISTINCT_REL_TOL * max(abs(x), 1e-300):
            distinct.append(x)
    if not distinct and p.eta == 0:
        distinct = [0.0]
    return distinct


def mean_fields_from_intensity(p, d, intensity, stability_rel=STABILITY_REL_TOL):
    """Expand one intracavity photon number into the full set of mean fields.

    The returned record has ``stable`` set from the drift-matrix spectrum.
    """
    c = nonlinear_shift(p, d)
    delta = p.delta_c - c * intensity
    alpha = -p.eta / complex(p.kappa, delta)
    beta = p.xi * intensity / complex(p.omega_m, -p.gamma_m)
    q1 = -d.zeta_1 * d.omega_1 * intensity / (d.omega_1**2 + p.gamma_c**2)
    q2 = -d.zeta_2 * d.omega_2 * intensity / (d.omega_2**2 + p.gamma_c**2)
    unchecked = MeanFields(
        alpha_re=alpha.real,
        alpha_im=alpha.imag,
        intensity=alpha.real**2 + alpha.imag**2,
        beta_re=beta.real,
        beta_im=beta.imag,
        q_bar_1=q1,
        p_bar_1=p.gamma_c / d.omega_1 * q1,
        q_bar_2=q2,
        p_bar_2=p.gamma_c / d.omega_2 * q2,
        delta_eff=delta,
        stable=False,
    )
    verdict = is_stable(build_drift(p, d, unchecked), tol=stability_tolerance(p, stability_rel))
    return replace(unchecked, stable=verdict.stable, abscissa=verdict.abscissa)


def solve_mean_fields(p, d, stability_rel=STABILITY_REL_TOL):
    """All non-negative steady-state branches, sorted by ascending intensity."""
    roots = _intensity_roots(p, d)
    if not roots:
        raise NoPhysicalRootError(
            f"no non-negative real root of the intensity cubic (delta_c={p.delta_c:g})")
    return [mean_fields_from_intensity(p, d, x, stability_rel) for x in roots]


def select_branch(roots, previous=None, policy="continuation"):
    """Choose one branch out of ``roots``.

    ``continuation`` follows the stable root nearest in intensity to
    ``previous`` and falls back to ``lowest`` when there is no previous point.
    ``lowest``/``highest`` pick the stable root of smallest/largest intensity.
    Without any stable root the lowest-intensity (unstable) root is returned.
    """
    if not roots:
        raise ValueError("roots must be nonempty")
    if policy not in BRANCH_POLICIES:
        raise ValueError(f"unknown branch policy {policy!r}; expected one of {BRANCH_POLICIES}")
    ordered = sorted(roots, key=lambda r: r.intensity)
    stable = [r for r in ordered if r.stable]
    if not stable:
        return ordered[0]
    if policy == "continuation" and previous is not None:
        return min(stable, key=lambda r: abs(r.intensity - previous.intensity))
    if policy == "highest":
        return stable[-1]
    return stable[0]


def mean_field_residuals(p, d, mf):
    """Relative residuals of the four steady-state relations for one branch."""
    delta = p.delta_c - 2.0 * p.xi * mf.beta_re + d.zeta_1 * mf.q_bar_1 + d.zeta_2 * mf.q_bar_2
    alpha = -p.eta / complex(p.kappa, delta)
    beta = p.xi * mf.intensity / complex(p.omega_m, -p.gamma_m)

    def rel(x, ref):
        return abs(x - ref) / max(abs(ref), 1e-300)

    out = {
        "alpha": rel(mf.alpha, alpha) if p.eta != 0 else abs(mf.alpha),
        "beta": rel(mf.beta, beta) if beta != 0 else abs(mf.beta),
        "delta": abs(mf.delta_eff - delta) / max(abs(delta), p.kappa),
    }
    for j, q, pb in ((1, mf.q_bar_1, mf.p_bar_1), (2, mf.q_bar_2, mf.p_bar_2)):
        omega, zeta, _ = d.side(j)
        scale = max(abs(zeta) * mf.intensity / omega, 1e-300)
        out[f"p_bar_{j}"] = abs(pb - p.gamma_c / omega * q) / scale
        out[f"q_bar_{j}"] = abs(q + p.gamma_c / omega * pb + zeta / omega * mf.intensity) / scale
    out["intensity"] = (abs(mf.intensity * (mf.delta_eff**2 + p.kappa**2) - p.eta**2)
                        / max(p.eta**2, 1e-300))
    return out
