import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephasim import boson_bath as bb
from dephasim.bath_spectrum import BathMode, LorentzianSpectrum, SpectrumError, ThermalParams, lorentzian_modes, tabulated_modes
from dephasim.sequences import custom_sequence, free_sequence, periodic_sequence
from dephasim.spin_bath import gamma_spin_free

finite = dict(allow_nan=False, allow_infinity=False)
T0 = ThermalParams()


def test_single_mode_free_values():
    bath = tabulated_modes([(1, 1)])
    assert bb.gamma_boson_free(bath, T0, math.pi / 2) * math.pi / 2 == pytest.approx(1.0, rel=1e-15)
    assert bb.coherence_boson_exact(bath, T0, T=math.pi / 2) == pytest.approx(math.exp(-1), rel=1e-14)
    assert bb.gamma_boson_free(bath, T0, math.pi) * math.pi == pytest.approx(0.0, abs=1e-30)


def test_lorentzian_golden():
    bath = lorentzian_modes(LorentzianSpectrum(0, 1, 1, 100))
    assert bb.gamma_boson_free(bath, T0, 1.0) == pytest.approx(0.6060006614699319, rel=1e-13)


def test_zero_frequency_rejected():
    bath = tabulated_modes([(0.0, 1.0)])
    with pytest.raises(SpectrumError):
        bb.gamma_boson_free(bath, T0, 1.0)
    with pytest.raises(SpectrumError):
        bb.displacement_alpha(BathMode(0.0, 1.0), free_sequence(1.0))


def test_filter_n1_is_one():
    np.testing.assert_array_equal(bb.filter_boson([0.3, 1.0, math.pi], 0.7, 1), 1.0)


def test_periodic_n1_is_free():
    bath = lorentzian_modes(LorentzianSpectrum(0.5, 1, 1, 30))
    th = ThermalParams(1.5)
    assert bb.gamma_boson_periodic(bath, th, 0.4, 1) == bb.gamma_boson_free(bath, th, 0.4)


def test_echo_resonance_finite():
    # omega tau = pi hits the removable singularity of the filter
    bath = tabulated_modes([(1.0, 0.5)])
    for n in (2, 3, 6):
        g = bb.gamma_boson_periodic(bath, T0, math.pi, n)
        assert math.isfinite(g)
        engine = bb.coherence_boson_exact(bath, T0, periodic_sequence(math.pi, n), "printed")
        assert abs(math.exp(-n * math.pi * g) - engine) <= 1e-8


def test_singular_limit_by_refinement():
    bath = tabulated_modes([(1.0, 0.7)])
    n = 4
    tau0 = 2 * math.pi / n  # sin(n omega tau / 2) = 0
    at = bb.gamma_boson_periodic(bath, T0, tau0, n)
    near = [bb.gamma_boson_periodic(bath, T0, tau0 * (1 + h), n) for h in (1e-3, 1e-4, 1e-5, 1e-6)]
    errs = [abs(v - at) for v in near]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-5


def test_periodic_matches_engine_golden():
    bath = tabulated_modes([(1.0, 1.0)])
    tau, n = 0.3, 20
    closed = math.exp(-n * tau * bb.gamma_boson_periodic(bath, T0, tau, n))
    engine = bb.coherence_boson_exact(bath, T0, periodic_sequence(tau, n), "printed")
    assert abs(closed - engine) <= 1e-8


def test_free_alpha_matches_closed_form():
    mode, T = BathMode(1.3, 0.6), 2.1
    alpha = bb.displacement_alpha(mode, free_sequence(T))
    ref = mode.eta * (1 - np.exp(1j * mode.omega * T)) / mode.omega
    assert abs(alpha - 1j * ref) < 1e-14


@pytest.mark.parametrize("wT, expected", [(2 * math.pi, 16.0), (4 * math.pi, 0.0)])
def test_echo_alpha(wT, expected):
    mode = BathMode(1.0, 1.0)
    alpha = bb.displacement_alpha(mode, custom_sequence([wT / 2], wT))
    assert abs(abs(alpha) ** 2 - expected * math.sin(wT / 4) ** 4) < 1e-12


def test_zero_coupling_is_unity():
    bath = tabulated_modes([(1, 0), (3, 0)])
    assert bb.coherence_boson_exact(bath, ThermalParams(0.3), periodic_sequence(0.2, 7)) == 1.0


def test_echo_revival_standard():
    bath = tabulated_modes([(1.0, 0.4)])
    # one flip at T/2 with omega T = 2 pi: |alpha|^2 = 16 eta^2 sin^4(pi/2) / omega^2
    c = bb.coherence_boson_exact(bath, T0, custom_sequence([math.pi], 2 * math.pi), "standard")
    assert c == pytest.approx(math.exp(-2 * 16 * 0.16), rel=1e-12)


def test_unknown_convention():
    with pytest.raises(ValueError):
        bb.thermal_weight([1.0], T0, 1.0, "bogus")


@settings(max_examples=50, deadline=None)
@given(
    pairs=st.lists(st.tuples(st.floats(0.05, 3, **finite), st.floats(0, 2, **finite)), min_size=1, max_size=5),
    T=st.floats(0.01, 8, **finite),
    beta=st.sampled_from([0.3, 1.0, 7.0, math.inf]),
)
def test_engine_calibrated_to_free_rate(pairs, T, beta):
    bath = tabulated_modes(pairs)
    th = ThermalParams(beta)
    closed = math.exp(-T * bb.gamma_boson_free(bath, th, T))
    assert abs(closed - bb.coherence_boson_exact(bath, th, T=T)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(w=st.floats(0.05, 3, **finite), e=st.floats(0.01, 2, **finite), t=st.floats(0.01, 10, **finite))
def test_revival_period(w, e, t):
    bath = tabulated_modes([(w, e)])
    a = bb.coherence_boson_exact(bath, T0, T=t)
    b = bb.coherence_boson_exact(bath, T0, T=t + math.pi / w)
    assert abs(a - b) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(w=st.floats(0.05, 3, **finite), e=st.floats(0.01, 2, **finite), t=st.floats(0.01, 10, **finite),
       b1=st.floats(0.05, 20, **finite), b2=st.floats(0.05, 20, **finite))
def test_hotter_is_worse(w, e, t, b1, b2):
    bath = tabulated_modes([(w, e)])
    lo, hi = sorted((b1, b2))
    assert bb.gamma_boson_free(bath, ThermalParams(lo), t) >= bb.gamma_boson_free(bath, ThermalParams(hi), t) * (1 - 1e-12)


@settings(max_examples=60, deadline=None)
@given(w=st.floats(0.05, 3, **finite), e=st.floats(0.01, 2, **finite), tau=st.floats(0.01, 2, **finite), n=st.integers(2, 25))
def test_periodic_rate_matches_engine(w, e, tau, n):
    bath = tabulated_modes([(w, e)])
    closed = math.exp(-n * tau * bb.gamma_boson_periodic(bath, T0, tau, n))
    engine = bb.coherence_boson_exact(bath, T0, periodic_sequence(tau, n), "printed")
    assert abs(closed - engine) <= 1e-8


def test_spin_harsher_than_boson_on_grid():
    bath = lorentzian_modes(LorentzianSpectrum(0.0, 1, 1, 120))
    for t in np.linspace(0.05, 5, 50):
        assert gamma_spin_free(bath, t) >= bb.gamma_boson_free(bath, T0, t)


def test_spin_revival_can_undercut_boson():
    # the inequality is not pointwise universal: a spin revival at sin(delta t) = 0
    bath = tabulated_modes([(1.0, 1.0)])
    t = math.pi / math.sqrt(2)
    assert gamma_spin_free(bath, t) < bb.gamma_boson_free(bath, T0, t)
