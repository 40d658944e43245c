"""Exact qubit dephasing by a bath of non-interacting spin-1/2 modes.

Conditioned on the qubit state ``|+>`` or ``|->``, each bath spin evolves
under ``H_k^(+/-) = omega_k sz +/- eta_k sx``. The single-mode propagators
are ``U_k^(+/-)(t) = cos(d t) I + i sin(d t)/d (omega sz +/- eta sx)`` with
the dressed frequency ``d = sqrt(omega^2 + eta^2)``. A pi flip of the qubit
swaps the two branches, so any flip sequence reduces to an ordered product
of 2x2 matrices per mode.

Index 0 of every 2x2 matrix is the excited bath state (``sz = +1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .bath_spectrum import BathMode, DiscretizedBath, ThermalParams
from .sequences import PulseSequence, SequenceError

__all__ = [
    "LOG_FLOOR",
    "DephasingResult",
    "PeriodicCycle",
    "dressed_frequency",
    "spin_mode_unitary",
    "spin_unitaries",
    "thermal_population",
    "thermal_populations",
    "free_overlap",
    "gamma_spin_free",
    "coherence_spin_free",
    "spin_free_decay",
    "coherence_spin_pulsed",
    "periodic_overlap",
    "gamma_spin_periodic",
    "periodic_cycle",
    "PERIODIC_FORMS",
]

# per-mode overlaps below this are complete dephasing
LOG_FLOOR = 1e-30

PERIODIC_FORMS = ("exact", "printed_interval", "printed_total")

_I2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class DephasingResult:
    """Rate and coherence on a time grid.

    ``gamma`` holds ``+inf`` wherever the coherence vanishes; downstream
    code should compare ``coherence``, never ``gamma``.
    """

    times: np.ndarray
    gamma: np.ndarray
    coherence: np.ndarray
    label: str = ""

    def __post_init__(self):
        for name in ("times", "gamma", "coherence"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.times.shape == self.gamma.shape == self.coherence.shape):
            raise ValueError("times, gamma and coherence must have equal shape")
        if np.any(np.diff(self.times) <= 0) or np.any(self.times < 0):
            raise ValueError("times must be ascending and >= 0")

    @classmethod
    def from_log_coherence(cls, times, log_c, label: str = "") -> "DephasingResult":
        """Build from ``ln C(t)`` (``-inf`` for complete dephasing)."""
        times = np.asarray(times, dtype=float)
        log_c = np.asarray(log_c, dtype=float)
        coherence = np.exp(log_c)
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = np.where(times > 0, -log_c / np.where(times > 0, times, 1.0), 0.0)
        gamma = np.where(np.isneginf(log_c), np.inf, gamma)
        return cls(times, gamma, coherence, label)


def _branch_sign(branch) -> int:
    if branch in (1, "+", "plus"):
        return 1
    if branch in (-1, "-", "minus"):
        return -1
    raise ValueError(f"branch must be +1/-1 or '+'/'-', got {branch!r}")


def dressed_frequency(mode: BathMode) -> float:
    return math.hypot(mode.omega, mode.eta)


def spin_unitaries(omegas, etas, sign: int, t) -> np.ndarray:
    """Stack of propagators ``U^(sign)(t)`` for every mode, shape ``(..., 2, 2)``.

    ``t`` broadcasts against the mode arrays.
    """
    omegas, etas, t = np.broadcast_arrays(
        np.asarray(omegas, dtype=float), np.asarray(etas, dtype=float), np.asarray(t, dtype=float)
    )
    d = np.hypot(omegas, etas)
    c = np.cos(d * t)
    # sin(d t)/d -> t as d -> 0
    with np.errstate(invalid="ignore", divide="ignore"):
        sinc = np.where(d > 0, np.sin(d * t) / np.where(d > 0, d, 1.0), t)
    out = np.empty(omegas.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c + 1j * sinc * omegas
    out[..., 1, 1] = c - 1j * sinc * omegas
    out[..., 0, 1] = 1j * sinc * sign * etas
    out[..., 1, 0] = 1j * sinc * sign * etas
    return out


def spin_mode_unitary(mode: BathMode, branch, t: float) -> np.ndarray:
    """Conditional single-mode propagator for branch ``+`` or ``-``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return spin_unitaries(mode.omega, mode.eta, _branch_sign(branch), t)


def thermal_population(mode: BathMode, thermal: ThermalParams) -> float:
    """Excited-state population ``exp(-b w) / (2 cosh(b w))``, in ``[0, 1/2]``."""
    return float(thermal_populations([mode.omega], thermal)[0])


def thermal_populations(omegas, thermal: ThermalParams) -> np.ndarray:
    omegas = np.asarray(getattr(omegas, "omegas", omegas), dtype=float)
    if thermal.is_zero_temperature:
        # degenerate levels stay equally populated
        return np.where(omegas > 0, 0.0, 0.5)
    return expit(-2.0 * thermal.beta * omegas)


def free_overlap(omegas, etas, t) -> np.ndarray:
    """Per-mode free-evolution overlap ``1 - 2 (eta/d)^2 sin^2(d t)``."""
    omegas = np.asarray(omegas, dtype=float)
    etas = np.asarray(etas, dtype=float)
    d2 = omegas**2 + etas**2
    d = np.sqrt(d2)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(d2 > 0, etas**2 / np.where(d2 > 0, d2, 1.0), 0.0)
    return 1.0 - 2.0 * ratio * np.sin(d * t) ** 2


def _log_modulus(overlaps: np.ndarray) -> float:
    mod = np.abs(overlaps)
    if np.any(mod < LOG_FLOOR):
        return -math.inf
    return float(np.sum(np.log(mod)))


def gamma_spin_free(bath: DiscretizedBath, t: float) -> float:
    """Free-evolution spin-bath dephasing rate; ``+inf`` at complete dephasing.

    No temperature argument: the rate does not depend on the bath state.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    log_c = _log_modulus(free_overlap(bath.omegas, bath.etas, t))
    return math.inf if math.isinf(log_c) else -log_c / t


def coherence_spin_free(bath: DiscretizedBath, t: float) -> float:
    return math.exp(_log_modulus(free_overlap(bath.omegas, bath.etas, t)))


def spin_free_decay(bath: DiscretizedBath, times) -> DephasingResult:
    times = np.asarray(times, dtype=float)
    overlaps = free_overlap(bath.omegas[None, :], bath.etas[None, :], times[:, None])
    log_c = np.array([_log_modulus(row) for row in overlaps])
    return DephasingResult.from_log_coherence(times, log_c, f"spin free: {bath.label}")


def _branch_products(omegas, etas, durations) -> tuple[np.ndarray, np.ndarray]:
    """Toggled products for the branches that start in ``+`` and in ``-``."""
    m = omegas.shape[0]
    w_plus = np.broadcast_to(_I2, (m, 2, 2)).copy()
    w_minus = w_plus.copy()
    u_plus = spin_unitaries(omegas[None, :], etas[None, :], 1, durations[:, None])
    u_minus = spin_unitaries(omegas[None, :], etas[None, :], -1, durations[:, None])
    for j in range(len(durations)):
        if j % 2 == 0:
            w_plus = u_plus[j] @ w_plus
            w_minus = u_minus[j] @ w_minus
        else:
            w_plus = u_minus[j] @ w_plus
            w_minus = u_plus[j] @ w_minus
    return w_plus, w_minus


def pulsed_overlaps(bath: DiscretizedBath, thermal: ThermalParams, seq: PulseSequence) -> np.ndarray:
    """Per-mode complex overlaps ``Tr[W+ rho_k W-^dagger]`` for a flip sequence."""
    w_plus, w_minus = _branch_products(bath.omegas, bath.etas, seq.durations())
    m = np.conj(np.swapaxes(w_minus, -1, -2)) @ w_plus
    p = thermal_populations(bath.omegas, thermal)
    return p * m[:, 0, 0] + (1.0 - p) * m[:, 1, 1]


def coherence_spin_pulsed(bath: DiscretizedBath, thermal: ThermalParams, seq: PulseSequence) -> complex:
    """Complex coherence factor ``rho_+-(T) / rho_+-(0)`` under a flip sequence.

    After an odd number of flips the qubit ends in the swapped frame; only
    the modulus is meaningful then.
    """
    overlaps = pulsed_overlaps(bath, thermal, seq)
    return complex(np.prod(overlaps))


def periodic_cycle_phase(omegas, etas, tau):
    d = np.hypot(omegas, etas)
    s = np.sin(d * tau)
    with np.errstate(invalid="ignore", divide="ignore"):
        half = np.where(d > 0, omegas * np.abs(s) / np.where(d > 0, d, 1.0), 0.0)
    # 2 arcsin keeps precision where arccos(1 - 2 half^2) would not
    return 2.0 * np.arcsin(np.clip(half, 0.0, 1.0)), d, s


def periodic_overlap(omegas, etas, tau: float, n: int, form: str = "exact") -> np.ndarray:
    """Per-mode overlap after ``n`` cycles ``(U- U+)`` of interval ``tau``.

    ``form="exact"`` is ``1 - 2 eta^2 sin^2(d tau) sin^2(n phi) / (d^2 - omega^2 sin^2(d tau))``,
    obtained by diagonalizing the one-cycle matrix. The two ``printed_*``
    forms evaluate ``1 - 2 F (eta/d)^2 sin^2(d t)`` with
    ``F = |sin(n phi) / (2 sin phi)|``, reading ``t`` as the interval
    (``printed_interval``) or as the total time ``2 n tau`` (``printed_total``).
    """
    omegas = np.asarray(omegas, dtype=float)
    etas = np.asarray(etas, dtype=float)
    if form == "exact":
        phi, d, s = periodic_cycle_phase(omegas, etas, tau)
        denom = omegas**2 * (1.0 - s**2) + etas**2
        with np.errstate(invalid="ignore", divide="ignore"):
            loss = np.where(etas > 0, 2.0 * etas**2 * s**2 / np.where(etas > 0, denom, 1.0), 0.0)
        return 1.0 - loss * np.sin(n * phi) ** 2
    if form in ("printed_interval", "printed_total"):
        t = tau if form == "printed_interval" else 2 * n * tau
        phi, d, s = periodic_cycle_phase(omegas, etas, t)
        sin_phi = np.sin(phi)
        with np.errstate(invalid="ignore", divide="ignore"):
            filt = np.where(
                np.abs(sin_phi) > 1e-12,
                np.abs(np.sin(n * phi) / (2.0 * np.where(sin_phi != 0, sin_phi, 1.0))),
                n / 2.0,
            )
        d2 = d**2
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(d2 > 0, etas**2 / np.where(d2 > 0, d2, 1.0), 0.0)
        return 1.0 - 2.0 * filt * ratio * s**2
    raise ValueError(f"unknown periodic form {form!r}; expected one of {PERIODIC_FORMS}")


def gamma_spin_periodic(bath: DiscretizedBath, tau: float, n: int, form: str = "exact") -> float:
    """Dephasing rate after ``n`` pulse pairs at interval ``tau`` (``T = 2 n tau``).

    Returns ``+inf`` where a mode is dephased completely.
    """
    if not tau > 0:
        raise SequenceError("tau must be > 0")
    if int(n) != n or n < 1:
        raise SequenceError("n must be an integer >= 1")
    log_c = _log_modulus(periodic_overlap(bath.omegas, bath.etas, tau, int(n), form))
    return math.inf if math.isinf(log_c) else -log_c / (2 * n * tau)


@dataclass(frozen=True)
class PeriodicCycle:
    """Spectral data of the one-cycle matrix ``U-(tau) U+(tau)`` for one mode.

    The cycle matrix is ``x I + i (y sz + z_y sy)`` with
    ``x = 1 - 2 (omega/d)^2 sin^2(d tau)``, ``y = (omega/d) sin(2 d tau)`` and
    eigenvalues ``x +/- i sqrt(1 - x^2)``. The eigenvectors are
    ``(|0> - i alpha |1>)`` and ``(alpha |0> + i |1>)``, each over
    ``sqrt(1 + alpha^2)``, with ``alpha = sqrt(1 - x^2 - y^2) / (sqrt(1 - x^2) + y)``.
    """

    x: float
    y: float
    alpha: float
    lambda_plus: complex
    lambda_minus: complex
    v_plus: np.ndarray = field(repr=False)
    v_minus: np.ndarray = field(repr=False)
    matrix: np.ndarray = field(repr=False)

    def power(self, n: int) -> np.ndarray:
        """``(U- U+)^n`` from the spectral decomposition."""
        return (
            self.lambda_plus**n * np.outer(self.v_plus, self.v_plus.conj())
            + self.lambda_minus**n * np.outer(self.v_minus, self.v_minus.conj())
        )


def periodic_cycle(mode: BathMode, tau: float) -> PeriodicCycle:
    w, e = mode.omega, mode.eta
    u_plus = spin_mode_unitary(mode, "+", tau)
    u_minus = spin_mode_unitary(mode, "-", tau)
    matrix = u_minus @ u_plus
    d = dressed_frequency(mode)
    s = math.sin(d * tau)
    ratio = w / d if d > 0 else 0.0
    x = 1.0 - 2.0 * ratio**2 * s**2
    y = ratio * math.sin(2.0 * d * tau)
    r = math.sqrt(max(0.0, 1.0 - x * x))
    lam_p, lam_m = complex(x, r), complex(x, -r)
    # sy coefficient of the cycle matrix is -2 omega eta sin^2(d tau) / d^2
    z_y = math.sqrt(max(0.0, 1.0 - x * x - y * y))
    if r + y > 1e-14:
        alpha = z_y / (r + y)
        v_plus = np.array([1.0, -1j * alpha]) / math.sqrt(1.0 + alpha**2)
        v_minus = np.array([alpha, 1j]) / math.sqrt(1.0 + alpha**2)
    else:
        # cycle axis along -sz (or identity): eigenvectors are the basis states
        alpha = math.inf
        v_plus = np.array([0.0, -1j])
        v_minus = np.array([1.0, 0.0], dtype=complex)
        if r < 1e-14:
            v_plus = np.array([1.0, 0.0], dtype=complex)
            v_minus = np.array([0.0, 1.0], dtype=complex)
    return PeriodicCycle(x, y, alpha, lam_p, lam_m, v_plus, v_minus, matrix)
