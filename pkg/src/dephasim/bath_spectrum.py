"""Bath coupling spectra and their discretization into finite mode lists.

Both bath engines consume the same :class:`DiscretizedBath`, so a spin bath
and an oscillator bath built from one spectrum share every (omega, eta) pair.
All quantities use hbar = 1; frequencies and couplings carry inverse-time
units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SpectrumError",
    "BathMode",
    "DiscretizedBath",
    "LorentzianSpectrum",
    "ThermalParams",
    "lorentzian_modes",
    "one_over_f_modes",
    "tabulated_modes",
    "correlation_time",
]


class SpectrumError(ValueError):
    """Raised when a spectrum or mode list violates its invariants."""


@dataclass(frozen=True)
class BathMode:
    omega: float
    eta: float

    def __post_init__(self):
        for name in ("omega", "eta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise SpectrumError(f"{name} must be finite, got {value!r}")
            if value < 0:
                raise SpectrumError(f"{name} must be >= 0, got {value!r}")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "eta", float(self.eta))


@dataclass(frozen=True)
class DiscretizedBath:
    """Finite list of bath modes, sorted by frequency.

    ``omegas`` and ``etas`` are read-only numpy views of the same data, used
    by the vectorized engines.
    """

    modes: tuple[BathMode, ...]
    label: str = ""
    omegas: np.ndarray = field(init=False, repr=False, compare=False)
    etas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise SpectrumError("a bath needs at least one mode")
        omegas = np.array([m.omega for m in modes], dtype=float)
        etas = np.array([m.eta for m in modes], dtype=float)
        if np.any(np.diff(omegas) < 0):
            raise SpectrumError("modes must be sorted by omega ascending")
        omegas.setflags(write=False)
        etas.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "etas", etas)

    @classmethod
    def from_arrays(cls, omegas, etas, label: str = "") -> "DiscretizedBath":
        omegas = np.asarray(omegas, dtype=float).ravel()
        etas = np.asarray(etas, dtype=float).ravel()
        if omegas.shape != etas.shape:
            raise SpectrumError("omegas and etas differ in length")
        order = np.argsort(omegas, kind="stable")
        modes = tuple(BathMode(float(w), float(e)) for w, e in zip(omegas[order], etas[order]))
        return cls(modes, label)

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    @property
    def total_weight(self) -> float:
        """Sum of squared couplings."""
        return float(np.sum(self.etas**2))

    def scaled(self, factor: float) -> "DiscretizedBath":
        """Same frequencies with every coupling multiplied by ``factor``."""
        return DiscretizedBath.from_arrays(self.omegas, self.etas * factor, self.label)


@dataclass(frozen=True)
class LorentzianSpectrum:
    """Lorentzian coupling spectrum ``J(w) ~ gamma_c / ((w - omega0)^2 + gamma_c^2)``.

    ``window`` defaults to ``[max(0, omega0 - 10 gamma_c), omega0 + 10 gamma_c]``.
    """

    omega0: float
    gamma_c: float
    weight: float
    modes: int
    window: tuple[float, float] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.omega0) and self.omega0 >= 0):
            raise SpectrumError("omega0 must be finite and >= 0")
        if not (math.isfinite(self.gamma_c) and self.gamma_c > 0):
            raise SpectrumError("gamma_c must be finite and > 0")
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise SpectrumError("weight must be finite and > 0")
        if int(self.modes) != self.modes or self.modes < 1:
            raise SpectrumError("modes must be an integer >= 1")
        if self.window is None:
            lo = max(0.0, self.omega0 - 10.0 * self.gamma_c)
            object.__setattr__(self, "window", (lo, self.omega0 + 10.0 * self.gamma_c))
        lo, hi = (float(v) for v in self.window)
        object.__setattr__(self, "window", (lo, hi))
        _check_window(lo, hi, int(self.modes))


@dataclass(frozen=True)
class ThermalParams:
    """Bath inverse temperature; ``beta = math.inf`` is the zero-temperature state."""

    beta: float = math.inf

    def __post_init__(self):
        beta = float(self.beta)
        if math.isnan(beta) or beta <= 0:
            raise SpectrumError(f"beta must be > 0 or inf, got {self.beta!r}")
        object.__setattr__(self, "beta", beta)

    @classmethod
    def zero_temperature(cls) -> "ThermalParams":
        return cls(math.inf)

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def coth(self, omega, scale: float = 1.0) -> np.ndarray:
        """``coth(scale * beta * omega)``, exactly 1 at zero temperature.

        Raises for ``omega == 0``, where the factor diverges.
        """
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise SpectrumError("thermal factor coth(beta*omega) diverges for omega = 0")
        if self.is_zero_temperature:
            return np.ones_like(omega)
        return 1.0 / np.tanh(scale * self.beta * omega)


def _check_window(lo: float, hi: float, m: int) -> None:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise SpectrumError("window bounds must be finite")
    if lo < 0:
        raise SpectrumError("window lower bound must be >= 0")
    if hi < lo or (hi == lo and m != 1):
        raise SpectrumError(f"window must satisfy lo < hi, got [{lo}, {hi}]")


def _grid(lo: float, hi: float, m: int) -> tuple[np.ndarray, float]:
    # cell centres: a window starting at 0 never emits a zero-frequency mode
    if hi == lo:
        return np.array([lo]), 1.0
    dw = (hi - lo) / m
    return lo + (np.arange(m) + 0.5) * dw, dw


def _normalized(omegas: np.ndarray, raw: np.ndarray, weight: float, label: str) -> DiscretizedBath:
    total = float(np.sum(raw))
    if not total > 0 or not math.isfinite(total):
        raise SpectrumError("window excludes all spectral weight")
    eta2 = raw * (weight / total)
    return DiscretizedBath.from_arrays(omegas, np.sqrt(eta2), label)


def lorentzian_modes(spec: LorentzianSpectrum) -> DiscretizedBath:
    """Discretize a Lorentzian on a uniform grid, normalized so sum(eta^2) == weight."""
    lo, hi = spec.window
    omegas, dw = _grid(lo, hi, int(spec.modes))
    raw = spec.gamma_c / ((omegas - spec.omega0) ** 2 + spec.gamma_c**2) * dw
    label = f"lorentzian(omega0={spec.omega0:g}, gamma_c={spec.gamma_c:g}, M={spec.modes})"
    return _normalized(omegas, raw, spec.weight, label)


def one_over_f_modes(
    weight_exponent: float,
    window: Sequence[float],
    modes: int,
    weight: float,
) -> DiscretizedBath:
    """Power-law spectrum ``J(w) ~ w**(-weight_exponent)`` on a uniform grid.

    A window reaching down to zero frequency is only accepted for exponents
    below 1; otherwise the integrated weight diverges.
    """
    lo, hi = (float(v) for v in window)
    if weight_exponent < 0 or not math.isfinite(weight_exponent):
        raise SpectrumError("weight_exponent must be finite and >= 0")
    if not (math.isfinite(weight) and weight > 0):
        raise SpectrumError("weight must be finite and > 0")
    if int(modes) != modes or modes < 1:
        raise SpectrumError("modes must be an integer >= 1")
    _check_window(lo, hi, int(modes))
    if lo == 0 and weight_exponent >= 1:
        raise SpectrumError("divergent weight: omega_lo = 0 with exponent >= 1")
    omegas, dw = _grid(lo, hi, int(modes))
    raw = omegas ** (-weight_exponent) * dw
    label = f"one_over_f(exponent={weight_exponent:g}, M={modes})"
    return _normalized(omegas, raw, weight, label)


def tabulated_modes(pairs: Iterable[Sequence[float]], label: str = "tabulated") -> DiscretizedBath:
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise SpectrumError("tabulated spectrum needs at least one (omega, eta) pair")
    modes = sorted((BathMode(float(w), float(e)) for w, e in pairs), key=lambda m: m.omega)
    return DiscretizedBath(tuple(modes), label)


def correlation_time(spec: LorentzianSpectrum) -> float:
    return 1.0 / spec.gamma_c
