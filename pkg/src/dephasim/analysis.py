"""Zeno / anti-Zeno characterization of periodic pi-pulse control.

The enhancement ratio compares controlled and free coherence at the same
elapsed time ``T = n tau``: ``R = C_pulsed(T) / C_free(T)``. ``R > 1`` is the
Zeno regime (control protects the qubit), ``R < 1`` the anti-Zeno regime.

The spin bath is evaluated with the exact 2x2 matrix product for any ``n``.
The oscillator bath uses the printed periodic rate by default
(``boson_convention="printed"``) or the displacement engine with the
standard thermal weight (``"standard"``).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from . import boson_bath, spin_bath
from .bath_spectrum import DiscretizedBath, ThermalParams
from .sequences import periodic_sequence
from .spin_bath import DephasingResult

__all__ = [
    "KINDS",
    "RatioError",
    "NoCrossoverError",
    "log_enhancement",
    "enhancement_ratio",
    "ZenoMap",
    "zeno_map",
    "crossover_interval",
    "ShapeFit",
    "short_time_shape",
    "thread_count",
]

KINDS = ("spin", "boson")
COHERENCE_FLOOR = 1e-30
_LOG_FLOOR = math.log(COHERENCE_FLOOR)


class RatioError(ArithmeticError):
    """Free coherence is below the floor, so the ratio is meaningless."""


class NoCrossoverError(ValueError):
    """``R - 1`` does not change sign inside the requested bracket."""


def thread_count() -> int:
    """Worker cap from ``DEPHASIM_THREADS`` (default: CPU count)."""
    raw = os.environ.get("DEPHASIM_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"DEPHASIM_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def _log_free(kind: str, bath: DiscretizedBath, thermal: ThermalParams, T: float, boson_convention: str) -> float:
    if kind == "spin":
        return spin_bath._log_modulus(spin_bath.free_overlap(bath.omegas, bath.etas, T))
    if boson_convention == "printed":
        return -T * boson_bath.gamma_boson_free(bath, thermal, T)
    return boson_bath.log_coherence_boson_exact(bath, thermal, boson_bath.free_sequence(T), boson_convention)


def _log_pulsed(kind, bath, thermal, tau, n, boson_convention) -> float:
    if kind == "spin":
        return spin_bath._log_modulus(spin_bath.pulsed_overlaps(bath, thermal, periodic_sequence(tau, n)))
    if boson_convention == "printed":
        return -n * tau * boson_bath.gamma_boson_periodic(bath, thermal, tau, n)
    return boson_bath.log_coherence_boson_exact(bath, thermal, periodic_sequence(tau, n), boson_convention)


def log_enhancement(
    kind: str,
    bath: DiscretizedBath,
    thermal: ThermalParams,
    tau: float,
    n: int,
    boson_convention: str = "printed",
) -> float:
    """``ln R``; positive in the Zeno regime."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    log_free = _log_free(kind, bath, thermal, n * tau, boson_convention)
    if log_free < _LOG_FLOOR:
        raise RatioError(f"free {kind} coherence at T={n * tau:g} is below {COHERENCE_FLOOR:g}")
    return _log_pulsed(kind, bath, thermal, tau, n, boson_convention) - log_free


def enhancement_ratio(kind, bath, thermal, tau, n, boson_convention: str = "printed") -> float:
    return math.exp(log_enhancement(kind, bath, thermal, tau, n, boson_convention))


@dataclass(frozen=True)
class ZenoMap:
    """Enhancement ratios on a ``(tau, n)`` grid; ``ratios[i, j]`` is ``R(taus[i], ns[j])``.

    Cells where the free coherence fell below the floor hold ``nan``.
    """

    taus: np.ndarray
    ns: np.ndarray
    ratios: np.ndarray
    kind: str
    tau_unit: float = 1.0
    masked: np.ndarray = field(default=None, repr=False)

    def rows(self):
        """``(tau, n, R)`` triples in tau-major order."""
        for i, tau in enumerate(self.taus):
            for j, n in enumerate(self.ns):
                yield float(tau), int(n), float(self.ratios[i, j])


def zeno_map(
    kind: str,
    bath: DiscretizedBath,
    thermal: ThermalParams,
    taus: Sequence[float],
    ns: Sequence[int],
    boson_convention: str = "printed",
    tau_unit: float = 1.0,
    workers: int | None = None,
) -> ZenoMap:
    taus = np.asarray(taus, dtype=float)
    ns = np.asarray(ns, dtype=int)
    if taus.ndim != 1 or ns.ndim != 1 or taus.size == 0 or ns.size == 0:
        raise ValueError("tau and n grids must be non-empty 1-D sequences")
    if np.any(np.diff(taus) <= 0) or np.any(np.diff(ns) <= 0):
        raise ValueError("tau and n grids must be strictly increasing")
    if np.any(taus <= 0) or np.any(ns < 1):
        raise ValueError("tau must be > 0 and n >= 1")
    ratios = np.full((taus.size, ns.size), np.nan)

    def cell(idx):
        i, j = idx
        try:
            ratios[i, j] = enhancement_ratio(kind, bath, thermal, taus[i] * tau_unit, int(ns[j]), boson_convention)
        except RatioError:
            pass

    cells = [(i, j) for i in range(taus.size) for j in range(ns.size)]
    workers = workers or thread_count()
    if workers == 1:
        for c in cells:
            cell(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(cell, cells))
    return ZenoMap(taus, ns, ratios, kind, tau_unit, np.isnan(ratios))


def crossover_interval(
    kind: str,
    bath: DiscretizedBath,
    thermal: ThermalParams,
    n: int,
    bracket: tuple[float, float],
    scan: int = 400,
    rtol: float = 1e-4,
    boson_convention: str = "printed",
) -> float:
    """First ``tau`` (scanning upward) at which ``R - 1`` changes sign.

    The bracket is scanned on ``scan`` uniform points to isolate the first
    sign change, which is then refined by bisection to relative ``rtol``.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")

    def f(tau):
        return log_enhancement(kind, bath, thermal, tau, n, boson_convention)

    grid = np.linspace(lo, hi, scan)
    values = np.array([f(t) for t in grid])
    signs = np.sign(values)
    change = np.nonzero(signs[1:] != signs[:-1])[0]
    if change.size == 0:
        regime = "Zeno" if signs[0] > 0 else "anti-Zeno"
        raise NoCrossoverError(f"no crossover in [{lo:g}, {hi:g}] for n={n}: R stays in the {regime} regime")
    k = int(change[0])
    a, b = grid[k], grid[k + 1]
    if values[k] == 0:
        return float(a)
    if values[k + 1] == 0:
        return float(b)
    return float(bisect(f, a, b, xtol=1e-14, rtol=rtol))


@dataclass(frozen=True)
class ShapeFit:
    shape: str
    r2_exponential: float
    r2_gaussian: float
    samples: int


def _r2(x: np.ndarray, y: np.ndarray) -> float:
    coeffs = np.polyfit(x, y, 1)
    resid = y - np.polyval(coeffs, x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0:
        return 1.0 if float(np.sum(resid**2)) == 0 else 0.0
    return 1.0 - float(np.sum(resid**2)) / ss_tot


def short_time_shape(
    result: DephasingResult,
    threshold: float = 0.9,
    quality: float = 0.99,
    min_samples: int = 10,
) -> ShapeFit:
    """Classify the early decay as ``gaussian``, ``exponential`` or ``indeterminate``.

    The window is the leading run of samples with ``C > threshold``;
    ``-ln C`` is fitted linearly against ``t`` and against ``t^2``.
    """
    c = result.coherence
    above = c > threshold
    stop = int(np.argmin(above)) if not above.all() else c.size
    if stop < min_samples:
        raise ValueError(f"short-time window holds {stop} samples with C > {threshold}; need {min_samples}")
    t = result.times[:stop]
    y = -np.log(c[:stop])
    r2_exp = _r2(t, y)
    r2_gauss = _r2(t**2, y)
    best = max(r2_exp, r2_gauss)
    if best < quality:
        shape = "indeterminate"
    else:
        shape = "gaussian" if r2_gauss > r2_exp else "exponential"
    return ShapeFit(shape, r2_exp, r2_gauss, stop)
