"""Full pipeline at one parameter point, along detuning sweeps and on grids."""

from dataclasses import dataclass, field
import logging

import numpy as np

from .dynamics import STABILITY_REL_TOL, build_diffusion, build_drift, stability_tolerance
from .errors import OptomechError
from .lyapunov import physicality_margin, residual, solve_lyapunov
from .measures import measure_point
from .model import derive_params
from .steadystate import select_branch, solve_mean_fields

__all__ = [
    "PointResult",
    "SweepRow",
    "SweepResult",
    "evaluate_point",
    "sweep_detuning",
    "grid_sw",
    "axis",
]

log = logging.getLogger(__name__)


@dataclass
class PointResult:
    params: object
    derived: object
    branches: list
    selected: object = None
    drift: np.ndarray | None = None
    diffusion: np.ndarray | None = None
    covariance: np.ndarray | None = None
    measures: object = None
    residual: float | None = None
    error: str | None = None

    @property
    def stable(self):
        return self.selected is not None and self.selected.stable and self.covariance is not None


@dataclass
class SweepRow:
    axis: tuple
    measures: object
    alpha_re: float
    alpha_im: float
    intensity: float
    delta_eff: float
    stable: bool
    n_branches: int
    error: str | None = None
    physicality: float | None = None


@dataclass
class SweepResult:
    axis_names: tuple
    axis_units: tuple
    rows: list = field(default_factory=list)

    def column(self, name):
        """Array of one measure (``e_n_b1b2``, ``s_q1``...) or mean-field field.

        Unstable rows contribute NaN for measures.
        """
        out = []
        for row in self.rows:
            if hasattr(row, name):
                out.append(getattr(row, name))
            elif row.measures is not None:
                out.append(getattr(row.measures, name))
            else:
                out.append(np.nan)
        return np.asarray(out, dtype=float)

    def axis_values(self, k=0):
        return np.array([row.axis[k] for row in self.rows])


def axis(start, stop, steps):
    """Evenly spaced axis including both endpoints."""
    if int(steps) != steps or steps < 2:
        raise ValueError(f"steps must be an integer >= 2, got {steps!r}")
    if not (np.isfinite(start) and np.isfinite(stop)):
        raise ValueError("axis range must be finite")
    return np.linspace(start, stop, int(steps))


def evaluate_point(p, previous=None, policy="continuation", derived=None,
                   stability_rel=STABILITY_REL_TOL):
    """Solve mean fields, pick a branch, and compute covariance and measures.

    Numerical errors are captured in ``PointResult.error`` rather than raised.
    """
    d = derive_params(p) if derived is None else derived
    result = PointResult(params=p, derived=d, branches=[])
    try:
        result.branches = solve_mean_fields(p, d, stability_rel)
        mf = select_branch(result.branches, previous=previous, policy=policy)
        result.selected = mf
        result.drift = build_drift(p, d, mf)
        result.diffusion = build_diffusion(p, d)
        if not mf.stable:
            return result
        v = solve_lyapunov(result.drift, result.diffusion,
                           tol=stability_tolerance(p, stability_rel))
        result.covariance = v
        result.residual = residual(result.drift, result.diffusion, v)
        result.measures = measure_point(p, d, mf, v)
    except OptomechError as exc:
        log.debug("point evaluation failed: %s", exc)
        result.error = f"{type(exc).__name__}: {exc}"
        result.measures = None
        result.covariance = None
    return result


def _row(axis_values, res):
    mf = res.selected
    nan = float("nan")
    return SweepRow(
        axis=tuple(float(x) for x in axis_values),
        measures=res.measures,
        alpha_re=mf.alpha_re if mf else nan,
        alpha_im=mf.alpha_im if mf else nan,
        intensity=mf.intensity if mf else nan,
        delta_eff=mf.delta_eff if mf else nan,
        stable=res.stable,
        n_branches=len(res.branches),
        error=res.error,
        physicality=None if res.covariance is None else physicality_margin(res.covariance),
    )


def sweep_detuning(p, start, stop, steps, policy="continuation",
                   stability_rel=STABILITY_REL_TOL):
    """Sweep ``delta_c`` over ``[start, stop]`` (units of kappa).

    Consecutive points follow the branch nearest to the previous stable one.
    Only ``delta_c`` changes along the sweep, so derived constants are shared.
    """
    d = derive_params(p)
    result = SweepResult(axis_names=("delta_c",), axis_units=("kappa",))
    previous = None
    for x in axis(start, stop, steps):
        res = evaluate_point(p.with_changes(delta_c=x * p.kappa), previous=previous,
                             policy=policy, derived=d, stability_rel=stability_rel)
        if res.selected is not None and res.selected.stable:
            previous = res.selected
        result.rows.append(_row((x,), res))
    return result


def grid_sw(p, range1, range2, policy="lowest", stability_rel=STABILITY_REL_TOL):
    """Row-major grid over ``(omega_sw_1, omega_sw_2)`` in units of omega_R.

    ``range1`` and ``range2`` are ``(start, stop, steps)``. Points are
    independent: the branch is chosen afresh at each one, so ``continuation``
    degrades to ``lowest``.
    """
    result = SweepResult(axis_names=("omega_sw_1", "omega_sw_2"),
                         axis_units=("omega_R", "omega_R"))
    for x1 in axis(*range1):
        for x2 in axis(*range2):
            q = p.with_changes(omega_sw_1=x1 * p.omega_R, omega_sw_2=x2 * p.omega_R)
            res = evaluate_point(q, policy=policy, stability_rel=stability_rel)
            result.rows.append(_row((x1, x2), res))
    return result
