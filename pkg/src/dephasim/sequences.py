"""Instantaneous pi-flip sequences on ``[0, T]``.

A sequence stores the flip times strictly inside ``(0, T)``. Under the
periodic convention used throughout, ``n`` pulses at interval ``tau`` give
``T = n * tau`` and flips at ``tau, 2 tau, ..., (n-1) tau``; the n-th pulse
coincides with the readout at ``T`` and only toggles the final qubit frame,
which does not change ``|rho_+-|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "SequenceError",
    "PulseSequence",
    "free_sequence",
    "periodic_sequence",
    "uhrig_sequence",
    "custom_sequence",
]

TAGS = ("free", "periodic", "uhrig_interval", "uhrig_standard", "custom")


class SequenceError(ValueError):
    """Raised for invalid flip times or an unconstructible generator."""


@dataclass(frozen=True)
class PulseSequence:
    flips: tuple[float, ...]
    total_time: float
    tag: str = "custom"

    def __post_init__(self):
        T = float(self.total_time)
        if not (math.isfinite(T) and T > 0):
            raise SequenceError(f"total time must be finite and > 0, got {self.total_time!r}")
        flips = tuple(float(t) for t in self.flips)
        if any(not (0.0 < t < T) for t in flips):
            raise SequenceError("every flip time must lie strictly inside (0, T)")
        if any(b <= a for a, b in zip(flips, flips[1:])):
            raise SequenceError("flip times must be strictly increasing")
        if self.tag not in TAGS:
            raise SequenceError(f"unknown sequence tag {self.tag!r}")
        object.__setattr__(self, "flips", flips)
        object.__setattr__(self, "total_time", T)

    @property
    def n_flips(self) -> int:
        return len(self.flips)

    def boundaries(self) -> np.ndarray:
        """Segment edges ``[0, t_1, ..., t_n, T]``."""
        return np.array((0.0, *self.flips, self.total_time))

    def durations(self) -> np.ndarray:
        return np.diff(self.boundaries())


def free_sequence(T: float) -> PulseSequence:
    return PulseSequence((), T, "free")


def periodic_sequence(tau: float, n: int) -> PulseSequence:
    """``n`` equally spaced pulses, total time ``n * tau``."""
    if not (math.isfinite(tau) and tau > 0):
        raise SequenceError("tau must be > 0")
    if int(n) != n or n < 1:
        raise SequenceError("n must be an integer >= 1")
    n = int(n)
    return PulseSequence(tuple(j * tau for j in range(1, n)), n * tau, "periodic")


def uhrig_sequence(T: float, N: int, variant: str = "standard") -> PulseSequence:
    """Uhrig-type aperiodic sequence.

    ``variant="standard"`` places ``N`` flips at ``T sin^2(j pi / (2N + 2))``.
    ``variant="interval"`` reads ``T sin^2(n pi / N)`` as consecutive intervals;
    those intervals vanish at ``n = N`` and sum to ``N T / 2``, so the
    construction is checked and rejected with a diagnostic when it does not
    yield flips inside ``(0, T)``.
    """
    if not (math.isfinite(T) and T > 0):
        raise SequenceError("T must be > 0")
    if int(N) != N or N < 1:
        raise SequenceError("N must be an integer >= 1")
    N = int(N)
    j = np.arange(1, N + 1)
    if variant == "standard":
        flips = T * np.sin(j * np.pi / (2 * N + 2)) ** 2
        return PulseSequence(tuple(flips), T, "uhrig_standard")
    if variant == "interval":
        intervals = T * np.sin(j * np.pi / N) ** 2
        flips = np.cumsum(intervals)
        problems = []
        tiny = 1e-12 * T
        zero = [int(k) for k in j[intervals <= tiny]]
        if zero:
            problems.append(f"intervals vanish at n={zero}")
        if flips[-1] >= T - tiny:
            problems.append(f"cumulative time {flips[-1]:.6g} reaches or exceeds T={T:g}")
        if problems:
            raise SequenceError(
                "interval formula T*sin^2(n*pi/N) gives no valid sequence for "
                f"N={N}: " + "; ".join(problems)
                + f" (intervals={np.round(intervals / T, 12).tolist()} in units of T)"
            )
        return PulseSequence(tuple(flips), T, "uhrig_interval")
    raise SequenceError(f"unknown Uhrig variant {variant!r}")


def custom_sequence(flips: Sequence[float], T: float) -> PulseSequence:
    return PulseSequence(tuple(flips), T, "custom")
