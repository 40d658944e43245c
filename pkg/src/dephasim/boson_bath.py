"""Exact qubit dephasing by a bath of harmonic oscillators (spin-boson model).

Two closed-form paths are provided. The *printed* path evaluates the printed
rate ``(1/t) sum (eta/omega)^2 coth(beta omega) sin^2(omega t)`` and its
periodic-pulse filter verbatim. The *displacement* engine sums sign-toggled
displacement amplitudes for an arbitrary flip sequence; its thermal weight
is selected by ``convention``:

``"printed"``
    weight ``coth(beta omega) cos^2(omega T / 2)``, which reproduces the
    printed free rate exactly and, for periodic flips, the printed filtered
    rate as well.
``"standard"``
    weight ``2 coth(beta omega / 2)``, the textbook result for
    ``H = omega b^dag b + eta S_z (b + b^dag)`` with ``S_z = +/-1``. This is
    what a brute-force Fock-space simulation of that Hamiltonian produces.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import eval_chebyu

from .bath_spectrum import BathMode, DiscretizedBath, SpectrumError, ThermalParams
from .sequences import PulseSequence, SequenceError, free_sequence
from .spin_bath import DephasingResult

__all__ = [
    "CONVENTIONS",
    "SINGULAR_TOL",
    "dirichlet_sq",
    "filter_boson",
    "gamma_boson_free",
    "gamma_boson_periodic",
    "boson_free_decay",
    "displacement_alpha",
    "displacement_alphas",
    "thermal_weight",
    "log_coherence_boson_exact",
    "coherence_boson_exact",
]

CONVENTIONS = ("printed", "standard")

# |sin(n omega tau / 2)| below this switches the periodic rate to its limit form
SINGULAR_TOL = 1e-8


def _require_positive(omegas: np.ndarray) -> None:
    if np.any(omegas <= 0):
        raise SpectrumError("oscillator bath term diverges for a mode with omega = 0")


def dirichlet_sq(v, n: int) -> np.ndarray:
    """``sin^2(n v) / sin^2(v)`` without division (``n^2`` at ``v = m pi``)."""
    return eval_chebyu(n - 1, np.cos(v)) ** 2


def filter_boson(omegas, tau: float, n: int) -> np.ndarray:
    """Periodic-pulse filter ``F^n(tau)`` for each frequency.

    ``F = sin^2(w tau/2) sin^2(n(pi + w tau)/2) / (sin^2((pi + w tau)/2) sin^2(n w tau/2))``.
    Removable singularities evaluate to their limits; genuine poles (where
    only ``sin(n w tau / 2)`` vanishes) give ``inf``.
    """
    if int(n) != n or n < 1:
        raise SequenceError("n must be an integer >= 1")
    n = int(n)
    x = np.asarray(omegas, dtype=float) * tau
    if n == 1:
        return np.ones_like(x)
    num = dirichlet_sq((np.pi + x) / 2.0, n)
    den = dirichlet_sq(x / 2.0, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)


def _periodic_shape(omegas: np.ndarray, tau: float, n: int) -> np.ndarray:
    """``F^n(tau) sin^2(omega n tau)``, finite everywhere."""
    x = omegas * tau
    filt = filter_boson(omegas, tau, n)
    direct = filt * np.sin(n * x) ** 2 if n > 1 else np.sin(x) ** 2
    # sin^2(n x) / sin^2(n x / 2) = 4 cos^2(n x / 2) cancels the pole
    limit = np.sin(x / 2.0) ** 2 * dirichlet_sq((np.pi + x) / 2.0, n) * 4.0 * np.cos(n * x / 2.0) ** 2
    singular = np.abs(np.sin(n * x / 2.0)) < SINGULAR_TOL
    with np.errstate(invalid="ignore"):
        return np.where(singular, limit, direct)


def _free_exponent(bath: DiscretizedBath, thermal: ThermalParams, t: float) -> float:
    w, e = bath.omegas, bath.etas
    _require_positive(w)
    return float(np.sum(e**2 / w**2 * thermal.coth(w) * np.sin(w * t) ** 2))


def gamma_boson_free(bath: DiscretizedBath, thermal: ThermalParams, t: float) -> float:
    if t < 0:
        raise ValueError("t must be >= 0")
    _require_positive(bath.omegas)
    if t == 0:
        return 0.0
    return _free_exponent(bath, thermal, t) / t


def gamma_boson_periodic(bath: DiscretizedBath, thermal: ThermalParams, tau: float, n: int) -> float:
    """Rate at ``t = n tau`` under ``n`` periodic pulses of interval ``tau``."""
    if not tau > 0:
        raise SequenceError("tau must be > 0")
    if int(n) != n or n < 1:
        raise SequenceError("n must be an integer >= 1")
    n = int(n)
    if n == 1:
        return gamma_boson_free(bath, thermal, tau)
    w, e = bath.omegas, bath.etas
    _require_positive(w)
    exponent = np.sum(e**2 / w**2 * thermal.coth(w) * _periodic_shape(w, tau, n))
    return float(exponent) / (n * tau)


def boson_free_decay(bath: DiscretizedBath, thermal: ThermalParams, times) -> DephasingResult:
    times = np.asarray(times, dtype=float)
    w, e = bath.omegas, bath.etas
    _require_positive(w)
    weights = e**2 / w**2 * thermal.coth(w)
    log_c = -(np.sin(np.outer(times, w)) ** 2) @ weights
    return DephasingResult.from_log_coherence(times, log_c, f"boson free: {bath.label}")


def displacement_alphas(omegas, etas, seq: PulseSequence) -> np.ndarray:
    """Toggled displacement amplitudes ``eta sum_j s_j (e^{i w t_(j+1)} - e^{i w t_j}) / (i w)``.

    ``s_j = (-1)^j`` on the j-th segment. With no flips this is
    ``i * eta (1 - e^{i w T}) / w``; the factor ``i`` is a global phase.
    """
    omegas = np.asarray(omegas, dtype=float)
    etas = np.asarray(etas, dtype=float)
    _require_positive(omegas)
    edges = seq.boundaries()
    phases = np.exp(1j * np.outer(edges, omegas))
    signs = (-1.0) ** np.arange(len(edges) - 1)
    total = signs @ np.diff(phases, axis=0)
    return etas * total / (1j * omegas)


def displacement_alpha(mode: BathMode, seq: PulseSequence) -> complex:
    return complex(displacement_alphas([mode.omega], [mode.eta], seq)[0])


def thermal_weight(omegas, thermal: ThermalParams, T: float, convention: str = "printed") -> np.ndarray:
    """Weight ``w`` in ``C = exp(-sum w |alpha|^2)``."""
    omegas = np.asarray(omegas, dtype=float)
    if convention == "printed":
        return thermal.coth(omegas) * np.cos(omegas * T / 2.0) ** 2
    if convention == "standard":
        return 2.0 * thermal.coth(omegas, scale=0.5)
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def log_coherence_boson_exact(
    bath: DiscretizedBath,
    thermal: ThermalParams,
    seq: PulseSequence,
    convention: str = "printed",
) -> float:
    alphas = displacement_alphas(bath.omegas, bath.etas, seq)
    weights = thermal_weight(bath.omegas, thermal, seq.total_time, convention)
    return -float(np.sum(weights * np.abs(alphas) ** 2))


def coherence_boson_exact(
    bath: DiscretizedBath,
    thermal: ThermalParams,
    seq: PulseSequence | None = None,
    convention: str = "printed",
    T: float | None = None,
) -> float:
    """Coherence modulus under an arbitrary flip sequence (or free evolution to ``T``)."""
    if seq is None:
        if T is None:
            raise ValueError("give either a sequence or a total time T")
        seq = free_sequence(T)
    return math.exp(log_coherence_boson_exact(bath, thermal, seq, convention))
