from dataclasses import replace
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from optomech_cov.dynamics import (
    build_diffusion,
    build_drift,
    characteristic_polynomial,
    is_stable,
    routh_hurwitz,
    spectral_abscissa,
    stability_tolerance,
)
from optomech_cov.errors import DegeneratePivotError
from optomech_cov.model import derive_params, swap_sides
from optomech_cov.steadystate import select_branch, solve_mean_fields

from conftest import make_params, random_stable_system

# side 1 <-> side 2 relabeling of the quadrature ordering
SWAP = [0, 1, 4, 5, 2, 3, 6, 7]


def _drift(p):
    d = derive_params(p)
    mf = select_branch(solve_mean_fields(p, d))
    return build_drift(p, d, mf), d, mf


def test_diagonal_and_coupling_entries(params):
    a, d, mf = _drift(params)
    k, gc, gm = params.kappa, params.gamma_c, params.gamma_m
    np.testing.assert_array_equal(np.diag(a), [-k, -k, -gc, -gc, -gc, -gc, -gm, -gm])
    assert a[0, 2] == math.sqrt(2) * d.zeta_1 * mf.alpha_im
    assert a[3, 0] == -math.sqrt(2) * d.zeta_1 * mf.alpha_re
    assert a[0, 1] == mf.delta_eff and a[1, 0] == -mf.delta_eff


def test_sparsity_pattern(params):
    a, _, _ = _drift(params)
    expected = np.zeros((8, 8), dtype=bool)
    for i, j in [(0, 0), (0, 1), (0, 2), (0, 4), (0, 6), (1, 0), (1, 1), (1, 2), (1, 4), (1, 6),
                 (2, 2), (2, 3), (3, 0), (3, 1), (3, 2), (3, 3), (4, 4), (4, 5),
                 (5, 0), (5, 1), (5, 4), (5, 5), (6, 6), (6, 7), (7, 0), (7, 1), (7, 6), (7, 7)]:
        expected[i, j] = True
    np.testing.assert_array_equal(a != 0, expected)
    assert np.count_nonzero(a) == 28


def test_zeroing_couplings_removes_entries(params):
    a, d, mf = _drift(params)
    no_xi = build_drift(params.with_changes(xi=0.0), d, mf)
    assert np.count_nonzero(a) - np.count_nonzero(no_xi) == 4
    assert not np.any(no_xi[[0, 1], 6]) and not np.any(no_xi[7, [0, 1]])
    no_z1 = build_drift(params, replace(d, zeta_1=0.0), mf)
    assert np.count_nonzero(a) - np.count_nonzero(no_z1) == 4


def test_depends_only_on_cavity_mean_field(params):
    a, d, mf = _drift(params)
    moved = replace(mf, q_bar_1=mf.q_bar_1 * 3.0, beta_re=0.0, p_bar_2=1.0)
    np.testing.assert_array_equal(build_drift(params, d, moved), a)


def test_decoupled_spectrum(params):
    p = params.with_changes(xi=0.0)
    d = replace(derive_params(p), zeta_1=0.0, zeta_2=0.0)
    mf = select_branch(solve_mean_fields(p, d))
    a = build_drift(p, d, mf)
    eig = np.sort_complex(np.linalg.eigvals(a))
    expected = np.sort_complex(np.array([
        complex(-p.kappa, s * mf.delta_eff) for s in (1, -1)
    ] + [complex(-p.gamma_c, s * w) for w in (d.omega_1, d.omega_2) for s in (1, -1)]
      + [complex(-p.gamma_m, s * p.omega_m) for s in (1, -1)]))
    np.testing.assert_allclose(eig, expected, rtol=1e-12)
    assert is_stable(a) and routh_hurwitz(a)


@settings(max_examples=30, deadline=None)
@given(st.floats(-20, 150), st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(0.0, 0.2))
def test_swap_permutes_drift(delta_c, w1, w2, xi):
    p = make_params(delta_c_k=delta_c, omega_sw_1_wr=w1, omega_sw_2_wr=w2, xi_k=xi)
    a, _, _ = _drift(p)
    b, _, _ = _drift(swap_sides(p))
    np.testing.assert_allclose(b, a[np.ix_(SWAP, SWAP)], rtol=1e-9, atol=1e-9 * p.kappa)


def test_diffusion(params):
    d = derive_params(params)
    dm = build_diffusion(params, d)
    assert np.count_nonzero(dm - np.diag(np.diag(dm))) == 0
    assert dm[6, 6] == pytest.approx(params.gamma_m * (2 * 4.81911e-4 + 1), rel=1e-6)
    cold = params.with_changes(temperature=0.0)
    np.testing.assert_array_equal(
        np.diag(build_diffusion(cold, derive_params(cold))),
        [cold.kappa] * 2 + [cold.gamma_c] * 4 + [cold.gamma_m] * 2)
    hot = build_diffusion(params, replace(d, n_m=1.0))
    assert hot[7, 7] == 3 * params.gamma_m
    assert np.all(np.diag(dm) > 0)


def test_simple_verdicts():
    assert is_stable(-np.eye(8)) and routh_hurwitz(-np.eye(8))
    assert not is_stable(np.eye(8)) and not routh_hurwitz(np.eye(8))
    assert spectral_abscissa(-2 * np.eye(8)) == -2.0


def test_marginal_band():
    a = -np.eye(8)
    a[0, 0] = -1e-12
    verdict = is_stable(a, tol=1e-9)
    assert not verdict.stable and verdict.abscissa == pytest.approx(-1e-12)
    assert stability_tolerance(make_params()) == 1e-9 * make_params().kappa


@settings(max_examples=80, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_embedded_two_by_two(a11, a12, a21, a22):
    tr, det = a11 + a22, a11 * a22 - a12 * a21
    # the embedding contributes eigenvalue -1; a block eigenvalue at +1 would pair
    # with it symmetrically about the origin, which is a singular Routh case
    if abs(tr) < 1e-6 or abs(det) < 1e-6 or abs(1 - tr + det) < 1e-6:
        return
    a = -np.eye(8)
    a[:2, :2] = [[a11, a12], [a21, a22]]
    assert routh_hurwitz(a) == (tr < 0 and det > 0)


def test_mirrored_root_pair_is_degenerate():
    a = -np.eye(8)
    a[:2, :2] = [[0.0, 1.9375], [1.9375, -2.75]]  # eigenvalues +1 and -3.75
    with pytest.raises(DegeneratePivotError):
        routh_hurwitz(a)


def test_characteristic_polynomial_exact():
    a = np.diag([-1.0, -2.0, -0.5, -4.0])
    coeffs = characteristic_polynomial(a)
    # scale c = 2 makes all entries integers; roots of det(sI - cA) are c*lambda
    roots = np.roots([float(c) for c in coeffs])
    np.testing.assert_allclose(np.sort(roots.real), [-8.0, -4.0, -2.0, -1.0])


def test_routh_random_agreement():
    rng = np.random.default_rng(7)
    for _ in range(60):
        a = rng.normal(size=(8, 8))
        a -= rng.uniform(-1.0, 3.0) * np.eye(8)
        abscissa = spectral_abscissa(a)
        if abs(abscissa) < 1e-6:
            continue
        assert routh_hurwitz(a) == (abscissa < 0)
    for _ in range(10):
        a, _ = random_stable_system(rng)
        assert routh_hurwitz(a)


@pytest.mark.parametrize("overrides", [
    dict(eta_k=100.0, delta_c_k=100.0, xi_k=0.05),
    dict(eta_k=300.0, delta_c_k=400.0, xi_k=0.2),
    dict(eta_k=100.0, delta_c_k=1500.0, xi_k=0.05),
    dict(eta_k=100.0, delta_c_k=-30.0),
    dict(eta_k=100.0, delta_c_k=30.0, xi_k=0.01, omega_sw_2_wr=0.2),
])
def test_routh_matches_eigenvalues_on_physical_branches(overrides):
    p = make_params(**overrides)
    d = derive_params(p)
    branches = solve_mean_fields(p, d)
    for mf in branches:
        a = build_drift(p, d, mf)
        assert routh_hurwitz(a) == mf.stable
    if len(branches) == 3:
        assert not branches[1].stable


def test_degenerate_pivot():
    # undamped oscillator: purely imaginary eigenvalues hit a zero Routh pivot
    a = -np.eye(8)
    a[:2, :2] = [[0.0, 1.0], [-1.0, 0.0]]
    with pytest.raises(DegeneratePivotError):
        routh_hurwitz(a)
