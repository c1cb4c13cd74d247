import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermoqsl.bounds import (DriveSpec, log_t_trick_bound, relaxed_bound, skew_rate,
                              t_trick_bound)
from thermoqsl.closedforms import (BosonicBathSpec, OhmicSpectralDensity, SpinBathSpec,
                                   bch_conjugation_check, hellinger_weight, log_weight,
                                   qubit_bounds_from_vector, spectral_integrals,
                                   spin_boson_bounds, wy_bosonic, wy_spin_bath)
from thermoqsl.models import (bosonic_bath_model, bosonic_skew_information_kron, central_spin_model,
                              spin_bath_model, spin_boson_model,
                              spin_skew_information_kron)
from thermoqsl.states import (SIGMA_X, SIGMA_Z, StateError, bloch_state,
                              random_density_matrix, random_hermitian, skew_information)

seeds = st.integers(0, 2**32 - 1)
SZ_HALF = 0.5 * SIGMA_Z.real


def beta_grid():
    return np.geomspace(0.05, 20, 60)


# --- spin baths ------------------------------------------------------------

def test_single_spin_bath_equals_dense_brute_force():
    model, spec = central_spin_model(1.0, 1.0, [1.0], [1.0])
    rho_s = bloch_state(1.0, (0, 0, 1))
    rho_b = model.bath_state(1.0)
    closed = wy_spin_bath(spec, model.h_s, rho_s, 1.0)
    dense = skew_information(rho_s, rho_b, model.drive)
    assert model.drive.shape == (4, 4)
    assert abs(closed - dense) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_spin_bath_closed_form_matches_dense(n):
    rng = np.random.default_rng(n)
    g, om = rng.uniform(0.5, 1.5, n), rng.uniform(0, 2, n)
    ops = [random_hermitian(2, rng) for _ in range(n)]
    spec = SpinBathSpec(om, g, 0.8, ops)
    h_s = random_hermitian(2, rng)
    model = spin_bath_model(spec, h_s)
    rho_s = random_density_matrix(2, rng)
    for beta in (0.0, 0.3, 2.0, 15.0):
        dense = skew_information(rho_s, model.bath_state(beta), model.drive)
        assert abs(wy_spin_bath(spec, h_s, rho_s, beta) - dense) <= 1e-10


def test_ten_spin_bath_matches_kronecker_brute_force():
    rng = np.random.default_rng(7)
    g, om = rng.uniform(0.5, 1.5, 10), rng.uniform(0, 2, 10)
    model, spec = central_spin_model(1.0, 1.0, g, om)
    rho_s = bloch_state(0.5, (0, 0, 1))
    closed = wy_spin_bath(spec, model.h_s, rho_s, 1.0)
    brute = spin_skew_information_kron(spec, model.h_s, rho_s, 1.0)
    assert np.isfinite(closed)
    assert abs(closed - brute) <= 1e-8


@given(seeds, st.floats(0, 10))
def test_spin_bath_closed_form_nonnegative(seed, beta):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 6))
    spec = SpinBathSpec(rng.normal(size=n), rng.normal(size=n), rng.normal(),
                        [random_hermitian(3, rng) for _ in range(n)])
    assert wy_spin_bath(spec, random_hermitian(3, rng), random_density_matrix(3, rng), beta) >= -1e-10


# --- bosonic baths -----------------------------------------------------------

def test_spin_boson_single_mode_matches_fock_truncation():
    model, spec = spin_boson_model(1.0, 1.0, [1.0], [1.0], cutoff=40)
    rho_s = bloch_state(1.0, (0, 0, 1))
    closed = wy_bosonic(spec, model.h_s, rho_s, 1.0)
    dense = skew_information(rho_s, model.bath_state(1.0), model.drive)
    assert abs(closed - dense) <= 1e-8


@pytest.mark.parametrize("n_modes", [1, 2, 3])
def test_bosonic_closed_form_converges_in_fock_cutoff(n_modes):
    rng = np.random.default_rng(100 + n_modes)
    om = rng.uniform(1.0, 2.0, n_modes)
    g = rng.uniform(0.5, 1.5, n_modes) * np.exp(1j * rng.uniform(0, 2 * np.pi, n_modes))
    ops = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(n_modes)]
    spec = BosonicBathSpec(om, g, 0.9, ops)
    h_s, rho_s = random_hermitian(2, rng), random_density_matrix(2, rng)
    closed = wy_bosonic(spec, h_s, rho_s, 1.0)
    values = [bosonic_skew_information_kron(spec, h_s, rho_s, 1.0, c) for c in (10, 20, 40)]
    errors = [abs(v - closed) for v in values]
    assert errors[0] >= errors[1] - 1e-12 and errors[1] >= errors[2] - 1e-12
    assert abs(values[2] - values[1]) < 1e-6
    assert errors[2] < 1e-8


def test_bosonic_kronecker_oracle_matches_dense():
    rng = np.random.default_rng(5)
    spec = BosonicBathSpec([1.0, 1.7], [0.8, 1.2j], 1.0, SIGMA_X.real)
    model = bosonic_bath_model(spec, SZ_HALF, 8)
    rho_s = random_density_matrix(2, rng)
    dense = skew_information(rho_s, model.bath_state(0.7), model.drive)
    kron = bosonic_skew_information_kron(spec, SZ_HALF, rho_s, 0.7, 8)
    assert abs(dense - kron) <= 1e-10


def test_bosonic_closed_form_needs_positive_beta():
    spec = BosonicBathSpec([1.0], [1.0], 1.0, SIGMA_X.real)
    with pytest.raises(ValueError):
        wy_bosonic(spec, SZ_HALF, np.eye(2) / 2, 0.0)
    with pytest.raises(ValueError):
        BosonicBathSpec([0.0], [1.0], 1.0, SIGMA_X.real)


def test_bch_identity_exact_on_truncation():
    assert bch_conjugation_check(1.0, 1.0, 5) < 1e-12
    assert bch_conjugation_check(2.0, 0.5, 12) < 1e-10
    with pytest.raises(ValueError):
        bch_conjugation_check(1.0, 1.0, 1)


# --- spectral integrals --------------------------------------------------------

@pytest.mark.parametrize("kind", ["boson", "spin"])
def test_closed_integrals_match_quadrature_on_grid(kind):
    grid = np.geomspace(0.1, 10, 6)
    for alpha in grid:
        J = OhmicSpectralDensity(alpha)
        for beta in grid:
            closed = spectral_integrals(J, beta, kind=kind)
            quad = spectral_integrals(J, beta, kind=kind, method="quadrature")
            for c, q in zip(closed, quad):
                assert abs(c - q) <= 1e-8 * abs(q)


def test_central_spin_continuum_k_value():
    ints = spectral_integrals(OhmicSpectralDensity(1.0), 1.0, kind="spin")
    assert ints.K == pytest.approx(1.0, rel=1e-15)
    assert ints.M == pytest.approx(6.0, rel=1e-15)


@pytest.mark.parametrize("kind", ["boson", "spin"])
def test_midpoint_discretization_converges_to_continuum(kind):
    J = OhmicSpectralDensity(1.0)
    ref = np.array(spectral_integrals(J, 1.0, kind=kind))
    errs = []
    for n in (50, 200, 800):
        om, g = J.discretize(n)
        spec = (BosonicBathSpec if kind == "boson" else SpinBathSpec)(om, g, 1.0, SIGMA_X.real)
        errs.append(np.max(np.abs(np.array(spectral_integrals(spec, 1.0)) - ref) / np.abs(ref)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_sampled_bath_converges_at_monte_carlo_rate():
    J = OhmicSpectralDensity(1.0)
    ref = np.array(spectral_integrals(J, 1.0, kind="spin"))[[1, 2]]

    def rms_error(n, reps=200):
        rng = np.random.default_rng(n)
        out = []
        for _ in range(reps):
            om, g = J.sample(n, rng)
            ints = spectral_integrals(SpinBathSpec(om, g, 1.0, SIGMA_X.real), 1.0)
            out.append((np.array([ints.M, ints.L]) - ref) / ref)
        return np.sqrt(np.mean(np.square(out), axis=0))

    small, large = rms_error(25), rms_error(2500)
    ratio = small / large
    # 1/√N predicts a factor of 10
    assert np.all(ratio > 6) and np.all(ratio < 16)


def test_spectral_integrals_validation():
    J = OhmicSpectralDensity(1.0)
    with pytest.raises(ValueError):
        spectral_integrals(J, 0.0)
    with pytest.raises(ValueError):
        spectral_integrals(J, 1.0, kind="fermion")
    with pytest.raises(ValueError):
        OhmicSpectralDensity(-1.0)
    with pytest.raises(TypeError):
        spectral_integrals(object(), 1.0)


# --- qubit bounds --------------------------------------------------------------

def test_weights():
    assert hellinger_weight(0.0) == 0.0
    assert hellinger_weight(1.0) == 0.25
    assert hellinger_weight(0.6) == pytest.approx(0.05)
    assert log_weight(1.0) == math.inf
    assert log_weight(0.6) == pytest.approx(math.log(2.0))


def finite_spin_bath(n=4, seed=11):
    rng = np.random.default_rng(seed)
    return central_spin_model(1.0, 1.0, rng.uniform(0.5, 1.5, n), rng.uniform(0.2, 2, n))


@given(st.floats(0.05, 10), st.floats(0, 0.99), seeds)
def test_qubit_formulas_equal_matrix_bounds(beta, p, seed):
    model, spec = finite_spin_bath()
    n = np.random.default_rng(seed).normal(size=3)
    n /= np.linalg.norm(n)
    rho_s = bloch_state(p, n)
    rho_b = model.bath_state(beta)
    drive = DriveSpec(model.h_s, model.h_int)
    q = spin_boson_bounds(1.0, 1.0, beta, p, n, spectral_integrals(spec, beta))
    scale = max(1.0, q.relaxed)
    assert abs(q.exact_wy - skew_rate(drive, rho_s, rho_b)) <= 1e-10 * scale
    assert abs(q.relaxed - relaxed_bound(drive, rho_s, rho_b)) <= 1e-10 * scale
    assert abs(q.t_trick - t_trick_bound(drive, rho_s, rho_b, model.h_b, beta)) <= 1e-10 * scale
    log_ref = log_t_trick_bound(drive, rho_s, rho_b, model.h_b, beta)
    assert abs(q.log_t_trick - log_ref) <= 1e-10 * max(1.0, log_ref)


def test_log_cross_term_matters_off_axis():
    model, spec = finite_spin_bath()
    ints = spectral_integrals(spec, 2.0)
    n = (0.0, 0.0, 1.0)
    with_term = spin_boson_bounds(1.0, 1.0, 2.0, 0.6, n, ints).log_t_trick
    without = spin_boson_bounds(1.0, 1.0, 2.0, 0.6, n, ints, log_cross_term=False).log_t_trick
    assert with_term > without
    along_x = [spin_boson_bounds(1.0, 1.0, 2.0, 0.6, (1, 0, 0), ints, log_cross_term=c).log_t_trick
               for c in (True, False)]
    assert along_x[0] == along_x[1]


def test_pure_state_log_bound():
    ints = spectral_integrals(OhmicSpectralDensity(1.0), 1.0)
    with pytest.raises(StateError):
        spin_boson_bounds(1.0, 1.0, 1.0, 1.0, (0, 0, 1), ints)
    q = spin_boson_bounds(1.0, 1.0, 1.0, 1.0, (0, 0, 1), ints, log_term=False)
    assert q.log_t_trick is None
    with pytest.raises(StateError):
        spin_boson_bounds(1.0, 1.0, 1.0, 0.5, (0, 1, 1), ints)


@pytest.mark.parametrize("kind", ["boson", "spin"])
@pytest.mark.parametrize("p_vec", [(0, 0, 1), (1, 0, 0), (0, 1, 0), (0.5 ** 0.5, 0, 0.5 ** 0.5),
                                   (0, 0, 0.6), (0.6, 0, 0), (0.3, 0.3, 0.3), (0, 0, 0)])
def test_panel_bounds_dominate_exact(kind, p_vec):
    J = OhmicSpectralDensity(1.0)
    for beta in beta_grid():
        ints = spectral_integrals(J, beta, kind=kind)
        q = qubit_bounds_from_vector(1.0, 1.0, beta, p_vec, ints, log_term=np.linalg.norm(p_vec) < 1)
        assert q.exact_wy >= -1e-10
        assert q.relaxed >= q.exact_wy - 1e-12
        assert q.t_trick >= q.exact_wy - 1e-12
        if q.log_t_trick is not None:
            assert q.log_t_trick >= q.exact_wy - 1e-12


@pytest.mark.parametrize("p_vec", [(0, 0, 1), (0, 1, 0)])
def test_pure_states_off_x_axis_make_relaxed_bound_tight(p_vec):
    J = OhmicSpectralDensity(1.0)
    for beta in beta_grid():
        q = qubit_bounds_from_vector(1.0, 1.0, beta, p_vec, spectral_integrals(J, beta),
                                     log_term=False)
        assert abs(q.relaxed - q.exact_wy) <= 1e-12 * q.exact_wy
