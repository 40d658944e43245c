"""Second-order (weak-coupling) master-equation dephasing for both baths.

Only the closed-form pure-dephasing results are implemented; there is no
integro-differential solver. The spin-bath expression
``sum (2 eta^2 / omega^2)(omega t - sin(omega t))`` carries no ``1/t``
prefactor and is returned as a decay *exponent*: ``C_ME(t) = exp(-value)``.
For oscillators the second-order result coincides with the exact one, so
:func:`gamma_me_boson` delegates to :mod:`dephasim.boson_bath`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import boson_bath
from .bath_spectrum import DiscretizedBath, ThermalParams
from .sequences import SequenceError
from .spin_bath import thermal_populations

__all__ = [
    "bath_response",
    "thermal_polarizations",
    "gamma_me_spin_free",
    "gamma_me_spin_periodic",
    "gamma_me_boson",
    "ValidityReport",
    "validity_check",
    "SPIN_VALIDITY_THRESHOLD",
    "BOSON_VALIDITY_THRESHOLD",
]

SPIN_VALIDITY_THRESHOLD = 0.1
BOSON_VALIDITY_THRESHOLD = 1.0


def thermal_polarizations(bath: DiscretizedBath, thermal: ThermalParams) -> np.ndarray:
    """Default ``<sigma_z>`` per mode for the thermal state, ``2 p_k - 1``."""
    return 2.0 * thermal_populations(bath.omegas, thermal) - 1.0


def bath_response(bath: DiscretizedBath, polarizations, lag) -> np.ndarray | complex:
    """``Phi(s) = sum eta^2 [cos(omega s) + i <sigma_k> sin(omega s)]``."""
    pol = np.asarray(polarizations, dtype=float)
    if pol.shape != bath.omegas.shape:
        raise ValueError(f"expected {len(bath)} polarizations, got {pol.size}")
    if np.any(np.abs(pol) > 1):
        raise ValueError("polarizations must satisfy |<sigma>| <= 1")
    lag_arr = np.asarray(lag, dtype=float)
    phase = np.multiply.outer(lag_arr, bath.omegas)
    out = (np.cos(phase) + 1j * pol * np.sin(phase)) @ (bath.etas**2)
    return complex(out) if lag_arr.ndim == 0 else out


def _x_minus_sin_over_x2(x: np.ndarray) -> np.ndarray:
    """``(x - sin x) / x^2``, series near zero where the difference cancels."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-2
    xs = np.where(small, x, 0.0)
    series = xs / 6.0 - xs**3 / 120.0 + xs**5 / 5040.0 - xs**7 / 362880.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, 0.0, (x - np.sin(x)) / np.where(small, 1.0, x**2))
    return np.where(small, series, direct)


def _me_spin_terms(bath: DiscretizedBath, t: float) -> np.ndarray:
    # (2 eta^2 / omega^2)(omega t - sin omega t) == 2 eta^2 t^2 (x - sin x)/x^2 with x = omega t
    return 2.0 * bath.etas**2 * t**2 * _x_minus_sin_over_x2(bath.omegas * t)


def gamma_me_spin_free(bath: DiscretizedBath, t: float) -> float:
    if t < 0:
        raise ValueError("t must be >= 0")
    return float(np.sum(_me_spin_terms(bath, t)))


def gamma_me_spin_periodic(bath: DiscretizedBath, tau: float, n: int) -> float:
    """Filtered exponent at ``t = n tau``, reusing the oscillator filter."""
    if not tau > 0:
        raise SequenceError("tau must be > 0")
    if int(n) != n or n < 1:
        raise SequenceError("n must be an integer >= 1")
    n = int(n)
    t = n * tau
    terms = _me_spin_terms(bath, t)
    if n == 1:
        return float(np.sum(terms))
    filt = boson_bath.filter_boson(bath.omegas, tau, n)
    return float(np.sum(filt * terms))


def gamma_me_boson(
    bath: DiscretizedBath,
    thermal: ThermalParams,
    t: float | None = None,
    tau: float | None = None,
    n: int | None = None,
) -> float:
    """Second-order oscillator rate: identical to the exact rate by construction."""
    if tau is not None or n is not None:
        if tau is None or n is None:
            raise ValueError("pulsed evaluation needs both tau and n")
        return boson_bath.gamma_boson_periodic(bath, thermal, tau, n)
    if t is None:
        raise ValueError("give t for free evolution or tau and n for pulses")
    return boson_bath.gamma_boson_free(bath, thermal, t)


@dataclass(frozen=True)
class ValidityReport:
    kind: str
    ratios: np.ndarray
    max_ratio: float
    threshold: float
    valid: bool

    def __str__(self) -> str:
        verdict = "valid" if self.valid else "invalid"
        return f"{self.kind}: max eta/omega = {self.max_ratio:.4g} (threshold {self.threshold:g}) -> {verdict}"


def validity_check(bath: DiscretizedBath, kind: str, spin_threshold: float = SPIN_VALIDITY_THRESHOLD) -> ValidityReport:
    """Compare per-mode ``eta/omega`` against the weak-coupling bound for ``kind``.

    Spins need ``eta/omega << 1`` (``<= spin_threshold``); oscillators need
    ``eta/omega <= 1``. Zero-frequency modes give an infinite ratio.
    """
    w, e = bath.omegas, bath.etas
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(w > 0, e / np.where(w > 0, w, 1.0), np.inf)
    if kind == "spin":
        threshold = spin_threshold
    elif kind == "boson":
        threshold = BOSON_VALIDITY_THRESHOLD
    else:
        raise ValueError(f"kind must be 'spin' or 'boson', got {kind!r}")
    max_ratio = float(np.max(ratios))
    return ValidityReport(kind, ratios, max_ratio, threshold, bool(max_ratio <= threshold and math.isfinite(max_ratio)))
