import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephasim import spin_bath as sb
from dephasim.bath_spectrum import BathMode, LorentzianSpectrum, ThermalParams, lorentzian_modes, tabulated_modes
from dephasim.oracles import spin_hamiltonian_oracle
from dephasim.sequences import custom_sequence, free_sequence, periodic_sequence

finite = dict(allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("mode, expected", [(BathMode(3, 4), 5.0), (BathMode(1, 0), 1.0), (BathMode(0, 2), 2.0)])
def test_dressed_frequency(mode, expected):
    assert sb.dressed_frequency(mode) == expected


def test_unitary_identity_and_decoupled():
    np.testing.assert_allclose(sb.spin_mode_unitary(BathMode(1.3, 0.4), 1, 0.0), np.eye(2), atol=0)
    t = 0.83
    u = sb.spin_mode_unitary(BathMode(1.0, 0.0), -1, t)
    np.testing.assert_allclose(u, np.diag([np.exp(1j * t), np.exp(-1j * t)]), atol=1e-15)
    np.testing.assert_array_equal(sb.spin_mode_unitary(BathMode(0.0, 0.0), 1, 2.0), np.eye(2))


def test_unitary_matches_hamiltonian_at_dephasing_time():
    mode, t = BathMode(1, 1), math.pi / (2 * math.sqrt(2))
    for branch in (1, -1):
        assert np.abs(sb.spin_mode_unitary(mode, branch, t) - spin_hamiltonian_oracle(mode, branch, t)).max() <= 1e-10


def test_thermal_population():
    mode = BathMode(1, 1)
    assert sb.thermal_population(mode, ThermalParams()) == 0.0
    assert sb.thermal_population(mode, ThermalParams(1e-12)) == pytest.approx(0.5, abs=1e-11)
    value = sb.thermal_population(mode, ThermalParams(1.0))
    assert value == pytest.approx(math.exp(-1) / (2 * math.cosh(1)), rel=1e-14)
    assert value == pytest.approx(1 / (1 + math.exp(2)), rel=1e-14)
    assert value == pytest.approx(0.11920292202211755, rel=1e-15)


def test_free_rate_single_mode():
    bath = tabulated_modes([(1, 1)])
    assert sb.gamma_spin_free(bath, 0.5) * 0.5 == pytest.approx(-math.log(math.cos(math.sqrt(2) * 0.5) ** 2), rel=1e-13)
    assert sb.gamma_spin_free(bath, 0.5) * 0.5 == pytest.approx(0.5482301184463498, rel=1e-14)
    assert sb.coherence_spin_free(bath, math.pi / (2 * math.sqrt(2))) <= 1e-15
    assert math.isinf(sb.gamma_spin_free(bath, math.pi / (2 * math.sqrt(2))))


def test_zero_coupling():
    bath = tabulated_modes([(1, 0), (2, 0)])
    assert sb.gamma_spin_free(bath, 3.0) == 0.0
    assert abs(sb.coherence_spin_pulsed(bath, ThermalParams(1.0), periodic_sequence(0.3, 5))) == pytest.approx(1.0, abs=1e-15)
    assert sb.gamma_spin_periodic(bath, 0.4, 3) == 0.0


def test_empty_sequence_is_free():
    bath = tabulated_modes([(1, 1)])
    c = abs(sb.coherence_spin_pulsed(bath, ThermalParams(0.7), free_sequence(0.5)))
    assert abs(c - math.exp(-0.5 * sb.gamma_spin_free(bath, 0.5))) <= 1e-12


def test_periodic_closed_form_golden():
    bath = tabulated_modes([(1, 0.3)])
    tau, n = 0.4, 10
    closed = math.exp(-2 * n * tau * sb.gamma_spin_periodic(bath, tau, n))
    exact = abs(sb.coherence_spin_pulsed(bath, ThermalParams(), periodic_sequence(tau, 2 * n)))
    assert abs(closed - exact) <= 1e-8


def test_printed_forms_deviate():
    bath = tabulated_modes([(1, 0.3)])
    exact = abs(sb.coherence_spin_pulsed(bath, ThermalParams(), periodic_sequence(0.4, 20)))
    for form in ("printed_interval", "printed_total"):
        g = sb.gamma_spin_periodic(bath, 0.4, 10, form)
        value = 0.0 if math.isinf(g) else math.exp(-8 * g)
        assert abs(value - exact) > 1e-3


def test_periodic_n1_half_ratio_identity():
    # n = 1: sin(n phi) / (2 sin phi) == 1/2
    omegas, etas = np.array([0.7, 1.9]), np.array([0.4, 0.2])
    phi = sb.periodic_cycle_phase(omegas, etas, 0.35)
    np.testing.assert_allclose(np.abs(np.sin(phi) / (2 * np.sin(phi))), 0.5)


def test_decoupling_limit():
    bath = tabulated_modes([(1, 0.6), (1.4, 0.3)])
    T = 2.0
    values = [abs(sb.coherence_spin_pulsed(bath, ThermalParams(), periodic_sequence(T / n, n))) for n in (200, 400, 800, 1600)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] > 0.999


def test_cycle_spectral_facts():
    cyc = sb.periodic_cycle(BathMode(1.1, 0.8), 0.37)
    assert abs(abs(cyc.lambda_plus) - 1) < 1e-14 and abs(abs(cyc.lambda_minus) - 1) < 1e-14
    assert abs(np.vdot(cyc.v_plus, cyc.v_minus)) < 1e-14
    np.testing.assert_allclose(cyc.power(7), np.linalg.matrix_power(cyc.matrix, 7), atol=1e-13)


@settings(max_examples=80, deadline=None)
@given(w=st.floats(0, 5, **finite), e=st.floats(0, 5, **finite), t=st.floats(0, 20, **finite), sign=st.sampled_from([1, -1]))
def test_unitarity(w, e, t, sign):
    u = sb.spin_mode_unitary(BathMode(w, e), sign, t)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(w=st.floats(0.01, 5, **finite), e=st.floats(0, 5, **finite), tau=st.floats(0.01, 5, **finite))
def test_cycle_x_bounded(w, e, tau):
    cyc = sb.periodic_cycle(BathMode(w, e), tau)
    assert -1 - 1e-12 <= cyc.x <= 1 + 1e-12
    assert abs(abs(cyc.lambda_plus) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(
    pairs=st.lists(st.tuples(st.floats(0.05, 3, **finite), st.floats(0, 2, **finite)), min_size=1, max_size=4),
    flips=st.lists(st.floats(0.01, 0.99, **finite), max_size=5, unique=True),
    T=st.floats(0.1, 5, **finite),
    b1=st.floats(0.01, 100, **finite),
)
def test_temperature_independence(pairs, flips, T, b1):
    bath = tabulated_modes(pairs)
    seq = custom_sequence(sorted(f * T for f in flips), T)
    c1 = abs(sb.coherence_spin_pulsed(bath, ThermalParams(b1), seq))
    c2 = abs(sb.coherence_spin_pulsed(bath, ThermalParams(), seq))
    assert abs(c1 - c2) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(w=st.floats(0.01, 3, **finite), ratio=st.floats(1.0, 4.0, **finite))
def test_complete_dephasing_when_strong(w, ratio):
    mode = BathMode(w, ratio * w)
    delta = sb.dressed_frequency(mode)
    # 1 - 2 (eta/delta)^2 sin^2 = 0 at sin^2 = delta^2 / (2 eta^2) <= 1 when eta >= omega
    t_star = math.asin(math.sqrt(delta**2 / (2 * mode.eta**2))) / delta
    assert t_star <= math.pi / delta
    bath = tabulated_modes([(mode.omega, mode.eta)])
    assert sb.coherence_spin_free(bath, t_star) <= 1e-15


@settings(max_examples=50, deadline=None)
@given(w=st.floats(0, 5, **finite), e=st.floats(1e-3, 5, **finite))
def test_dressing_dominance(w, e):
    assert sb.dressed_frequency(BathMode(w, e)) > w


def test_free_decay_result_shapes():
    bath = lorentzian_modes(LorentzianSpectrum(0, 1, 1, 50))
    res = sb.spin_free_decay(bath, np.linspace(0, 3, 31))
    assert res.coherence[0] == 1.0
    assert np.all((res.coherence >= 0) & (res.coherence <= 1 + 1e-15))
