"""Independent checks of the Lyapunov covariance.

Two routes that never touch the vectorized Lyapunov solve:

* ensemble integration of the linear SDE ``du = A u dt + sqrt(D) dW``. The
  quantum Langevin noise is emulated by classical Gaussian noise with the
  symmetrized covariance ``D``; for a linear Gaussian model this reproduces
  every symmetrized second moment exactly.
* the integral ``V = int_0^inf exp(A t) D exp(A^T t) dt`` evaluated with
  matrix exponentials.

Two stepping schemes are available for the ensemble. ``euler`` is plain
Euler-Maruyama and must resolve the fastest rate of ``A``. ``exact`` samples
the Gaussian transition of the process over one step, which stays exact for
steps far longer than the fastest period; it is required for the stiff
physical systems, where the fastest rotation exceeds the slowest damping by
five orders of magnitude.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import expm

from .dynamics import spectral_abscissa
from .errors import NumericalFailureError, StepTooLargeError, UnstableDriftError

__all__ = [
    "SdeConfig",
    "EnsembleEstimate",
    "default_sde_config",
    "integrate_ensemble",
    "trajectory_noise",
    "propagate_moments",
    "step_covariance",
    "integral_formula_check",
    "compare_covariances",
]

METHODS = ("euler", "exact")
MAX_STEP_FRACTION = 0.05
MIN_TRAJECTORIES = 100
EULER_STEP_BUDGET = 200_000
CHUNK = 250
BLOCK = 1024


@dataclass(frozen=True)
class SdeConfig:
    dt: float
    burn_in: float
    horizon: float
    n_trajectories: int = 2000
    seed: int = 0
    method: str = "euler"

    @property
    def n_burn(self):
        return int(math.ceil(self.burn_in / self.dt - 1e-9))

    @property
    def n_average(self):
        return max(1, int(math.ceil(self.horizon / self.dt - 1e-9)))


@dataclass(frozen=True)
class EnsembleEstimate:
    cov: np.ndarray
    stderr: np.ndarray
    n_trajectories: int
    n_samples: int
    method: str


def _rates(a):
    eig = np.linalg.eigvals(np.asarray(a, dtype=float))
    return float(np.max(eig.real)), float(np.max(np.abs(eig)))


def _require_stable(a):
    abscissa = spectral_abscissa(a)
    if abscissa >= 0:
        raise UnstableDriftError(f"drift matrix is not stable (spectral abscissa {abscissa:.6g})")
    return abscissa


def default_sde_config(a, method="auto", n_trajectories=2000, seed=0):
    """Resolution-safe defaults derived from the spectrum of ``a``.

    ``euler`` uses ``dt = 0.01 / rho(A)``; ``exact`` uses ``dt = 0.02/|s|`` with
    ``s`` the spectral abscissa. ``auto`` picks ``euler`` unless it would need
    more than ``EULER_STEP_BUDGET`` steps per trajectory.
    """
    abscissa = _require_stable(a)
    _, radius = _rates(a)
    slow = 1.0 / abs(abscissa)
    burn_in, horizon = 10.0 * slow, 50.0 * slow
    euler_dt = 0.01 / radius
    if method == "auto":
        method = "euler" if (burn_in + horizon) / euler_dt <= EULER_STEP_BUDGET else "exact"
    if method == "euler":
        dt = euler_dt
    elif method == "exact":
        dt = 0.02 * slow
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS} or 'auto'")
    return SdeConfig(dt=dt, burn_in=burn_in, horizon=horizon,
                     n_trajectories=n_trajectories, seed=seed, method=method)


def _validate(a, cfg):
    if cfg.method not in METHODS:
        raise ValueError(f"unknown method {cfg.method!r}; expected one of {METHODS}")
    if not cfg.dt > 0:
        raise StepTooLargeError("dt must be > 0")
    if cfg.n_trajectories < MIN_TRAJECTORIES:
        raise ValueError(f"n_trajectories must be >= {MIN_TRAJECTORIES}")
    if cfg.burn_in < 0 or cfg.horizon <= 0:
        raise ValueError("burn_in must be >= 0 and horizon > 0")
    abscissa, radius = _rates(a)
    if abscissa >= 0:
        raise UnstableDriftError(f"drift matrix is not stable (spectral abscissa {abscissa:.6g})")
    if cfg.dt * abs(abscissa) >= MAX_STEP_FRACTION:
        raise StepTooLargeError(
            f"dt*|abscissa| = {cfg.dt * abs(abscissa):.3g} must be < {MAX_STEP_FRACTION}")
    if cfg.method == "euler" and cfg.dt * radius >= MAX_STEP_FRACTION:
        raise StepTooLargeError(
            f"dt*max|eig| = {cfg.dt * radius:.3g} must be < {MAX_STEP_FRACTION} for Euler steps")


def _sqrt_psd(m):
    m = 0.5 * (m + m.T)
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return np.diag(np.sqrt(np.clip(np.diag(m), 0.0, None)))
    w, u = np.linalg.eigh(m)
    return u * np.sqrt(np.clip(w, 0.0, None))


def _van_loan(a, d, h):
    n = a.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = -a
    block[:n, n:] = d
    block[n:, n:] = a.T
    e = expm(block * h)
    phi = e[n:, n:].T
    return phi, phi @ e[:n, n:]


def _base_step(a, h, target=0.25):
    norm = max(np.linalg.norm(a, 1), 1e-300)
    k = max(0, int(math.ceil(math.log2(h * norm / target))))
    return h / 2**k, k


def step_covariance(a, d, h):
    """Transition ``(Phi, Q)`` of the linear SDE over a step ``h``.

    ``Phi = exp(A h)`` and ``Q = int_0^h exp(A s) D exp(A^T s) ds``; a short
    base step is evaluated with Van Loan's block exponential and then doubled
    using ``Q(2t) = Q(t) + Phi(t) Q(t) Phi(t)^T``.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    h0, k = _base_step(a, h)
    phi, q = _van_loan(a, d, h0)
    for _ in range(k):
        q = q + phi @ q @ phi.T
        phi = phi @ phi
    return phi, 0.5 * (q + q.T)


def trajectory_noise(seed, index, n_steps, dim):
    """Standard normal increments for one trajectory, shape ``(n_steps, dim)``.

    The stream depends only on ``(seed, index)``, so trajectories can run in
    any order or in parallel with identical results.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    return rng.standard_normal((n_steps, dim))


def propagate_moments(m, l, noise, n_burn):
    """Time-averaged second moments along trajectories driven by ``noise``.

    Applies ``u <- m u + l z`` from ``u = 0`` for each increment ``z`` in
    ``noise`` (shape ``(n_steps, n_traj, dim)``), discards the first
    ``n_burn`` states and returns per-trajectory averages of ``u u^T``.
    """
    n_steps, n_traj, dim = noise.shape
    u = np.zeros((n_traj, dim))
    acc = np.zeros((n_traj, dim, dim))
    states = np.empty((n_steps, n_traj, dim))
    mt, lt = m.T, l.T
    for t in range(n_steps):
        u = u @ mt + noise[t] @ lt
        states[t] = u
    kept = states[n_burn:]
    acc += np.einsum("sti,stj->tij", kept, kept)
    return acc / max(len(kept), 1)


def _chunk_moments(m, l, cfg, start, stop, dim):
    n_burn, n_avg = cfg.n_burn, cfg.n_average
    total = n_burn + n_avg
    rngs = [np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
            for i in range(start, stop)]
    n_traj = stop - start
    u = np.zeros((n_traj, dim))
    acc = np.zeros((n_traj, dim, dim))
    mt, lt = m.T, l.T
    done = 0
    while done < total:
        nb = min(BLOCK, total - done)
        z = np.stack([g.standard_normal((nb, dim)) for g in rngs], axis=1)
        states = np.empty((nb, n_traj, dim))
        for t in range(nb):
            u = u @ mt + z[t] @ lt
            states[t] = u
        first = max(0, n_burn - done)
        if first < nb:
            kept = states[first:]
            acc += np.einsum("sti,stj->tij", kept, kept)
        done += nb
    return acc / n_avg


def integrate_ensemble(a, d, cfg):
    """Ensemble estimate of the stationary covariance with standard errors.

    Each trajectory starts at the origin, is propagated through ``burn_in``,
    then its symmetrized second moments are time-averaged over ``horizon``.
    Standard errors come from the spread of these per-trajectory averages,
    which are mutually independent.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    _validate(a, cfg)
    dim = a.shape[0]
    if cfg.method == "euler":
        m = np.eye(dim) + a * cfg.dt
        l = _sqrt_psd(d) * math.sqrt(cfg.dt)
    else:
        m, q = step_covariance(a, d, cfg.dt)
        l = _sqrt_psd(q)
    per_traj = np.concatenate([
        _chunk_moments(m, l, cfg, start, min(start + CHUNK, cfg.n_trajectories), dim)
        for start in range(0, cfg.n_trajectories, CHUNK)
    ])
    per_traj = 0.5 * (per_traj + np.transpose(per_traj, (0, 2, 1)))
    n = cfg.n_trajectories
    return EnsembleEstimate(
        cov=per_traj.mean(axis=0),
        stderr=per_traj.std(axis=0, ddof=1) / math.sqrt(n),
        n_trajectories=n,
        n_samples=cfg.n_average,
        method=cfg.method,
    )


_GL_CACHE = {}


def _gauss_legendre(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _integral(a, d, h0, order, t_max, tail_tol, max_doublings):
    x, w = _gauss_legendre(order)
    nodes = 0.5 * h0 * (x + 1.0)
    q = np.zeros_like(a)
    for s, wi in zip(nodes, w):
        e = expm(a * s)
        q += 0.5 * h0 * wi * (e @ d @ e.T)
    phi = expm(a * h0)
    t = h0
    doublings = 0
    while True:
        if t >= t_max:
            tail = np.linalg.norm(phi @ q @ phi.T) / np.linalg.norm(q)
            if tail < tail_tol:
                break
        if doublings >= max_doublings:
            raise NumericalFailureError("integral formula did not converge within the doubling "
                                        "limit")
        q = q + phi @ q @ phi.T
        phi = phi @ phi
        t *= 2.0
        doublings += 1
    return 0.5 * (q + q.T)


def integral_formula_check(a, d, rtol=1e-10, tail_tol=1e-8, max_refinements=6):
    """``int_0^inf exp(A t) D exp(A^T t) dt`` by Gauss-Legendre plus doubling.

    A short base interval is integrated with a Gauss-Legendre rule; repeated
    doubling extends it to at least ``t_max = 40/|abscissa|`` and further
    until the relative tail ``||Phi(T) V Phi(T)^T|| / ||V||`` drops below
    ``tail_tol``. The base interval is halved until two successive
    estimates agree to ``rtol``.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(d, dtype=float)
    abscissa = _require_stable(a)
    t_max = 40.0 / abs(abscissa)
    h0, _ = _base_step(a, t_max)
    previous = _integral(a, d, h0, 8, t_max, tail_tol, 200)
    for _ in range(max_refinements):
        h0 /= 2.0
        current = _integral(a, d, h0, 8, t_max, tail_tol, 200)
        scale = max(np.linalg.norm(current), 1e-300)
        if np.linalg.norm(current - previous) / scale <= rtol:
            return current
        previous = current
    return previous


def compare_covariances(v, estimate, n_se=3.0, diag_rel=0.05):
    """Elementwise agreement report between ``v`` and an ensemble estimate."""
    v = np.asarray(v, dtype=float)
    diff = np.abs(estimate.cov - v)
    se = estimate.stderr
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, diff / se, np.where(diff == 0, 0.0, np.inf))
    diag = np.diag(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(diag != 0, np.abs(np.diag(estimate.cov) - diag) / np.abs(diag),
                       np.where(np.diag(estimate.cov) == 0, 0.0, np.inf))
    max_z = float(np.max(z))
    max_rel = float(np.max(rel))
    return {
        "max_abs_dev_over_se": max_z,
        "max_rel_diag_dev": max_rel,
        "n_se": n_se,
        "diag_rel": diag_rel,
        "within_se": bool(max_z <= n_se),
        "within_diag": bool(max_rel <= diag_rel),
        "passed": bool(max_z <= n_se and max_rel <= diag_rel),
    }
