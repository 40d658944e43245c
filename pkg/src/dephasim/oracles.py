"""Brute-force reference computations used to validate the closed forms.

Every oracle works on a single mode: the model has no inter-mode coupling,
so multi-mode results are products of single-mode factors. Matrix
exponentials are taken through Hermitian eigendecompositions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import boson_bath, spin_bath
from .bath_spectrum import BathMode, DiscretizedBath, ThermalParams
from .sequences import PulseSequence, periodic_sequence

__all__ = [
    "FockConvergenceError",
    "FockConfig",
    "FockReport",
    "CommutatorReport",
    "MagnusReport",
    "spin_hamiltonian_oracle",
    "fock_oracle_coherence",
    "commutator_check",
    "magnus_check",
    "periodic_form_deviations",
    "select_periodic_form",
]

_SZ = np.diag([1.0, -1.0]).astype(complex)
_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g|


class FockConvergenceError(RuntimeError):
    """The truncated Fock space is too small for the requested accuracy."""


def _hermitian_expm(h: np.ndarray, t: float, sign: float = -1.0) -> np.ndarray:
    """``exp(sign * i * t * h)`` for Hermitian ``h``."""
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(sign * 1j * t * vals)) @ vecs.conj().T


def spin_hamiltonian_oracle(mode: BathMode, branch, t: float) -> np.ndarray:
    """Exponentiate ``omega sz +/- eta sx`` numerically.

    Uses the same sign as the closed-form propagators, ``exp(+i H t)``.
    """
    sign = 1 if branch in (1, "+", "plus") else -1
    if branch not in (1, -1, "+", "-", "plus", "minus"):
        raise ValueError(f"invalid branch {branch!r}")
    h = mode.omega * _SZ + sign * mode.eta * _SX
    return _hermitian_expm(h, t, sign=+1.0)


@dataclass(frozen=True)
class FockConfig:
    dim: int = 64
    tol: float = 1e-6
    growth: float = 1.5

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValueError("Fock dimension must be an integer >= 2")
        if self.growth <= 1:
            raise ValueError("growth factor must exceed 1")


@dataclass(frozen=True)
class FockReport:
    """Oracle coherence under both thermal conventions plus the analytic paths.

    ``coherence`` uses the bath state ``exp(-beta omega b^dag b)``;
    ``coherence_doubled_beta`` uses ``exp(-2 beta omega b^dag b)``, whose
    thermal factor is ``coth(beta omega)``.
    """

    coherence: float
    coherence_doubled_beta: float
    dim: int
    truncation_error: float
    engine_standard: float
    engine_printed: float
    printed_rate_path: float | None
    matches: tuple[str, ...] = field(default=())

    def lines(self) -> list[str]:
        out = [
            f"fock oracle (D={self.dim}, truncation {self.truncation_error:.2e}):",
            f"  exp(-beta w n) state     : {self.coherence:.12g}",
            f"  exp(-2 beta w n) state   : {self.coherence_doubled_beta:.12g}",
            f"  engine, standard weight  : {self.engine_standard:.12g}",
            f"  engine, printed weight    : {self.engine_printed:.12g}",
        ]
        if self.printed_rate_path is not None:
            out.append(f"  printed rate formula     : {self.printed_rate_path:.12g}")
        out.append(f"  oracle agrees with       : {', '.join(self.matches) or 'none'}")
        return out


def _fock_ops(dim: int) -> tuple[np.ndarray, np.ndarray]:
    b = np.diag(np.sqrt(np.arange(1, dim)), k=1).astype(complex)
    return b, np.diag(np.arange(dim, dtype=float)).astype(complex)


def _fock_coherence(mode: BathMode, beta_eff: float, seq: PulseSequence, dim: int) -> float:
    b, num = _fock_ops(dim)
    x = b + b.conj().T
    h_plus = mode.omega * num + mode.eta * x
    h_minus = mode.omega * num - mode.eta * x
    w_plus = np.eye(dim, dtype=complex)
    w_minus = np.eye(dim, dtype=complex)
    for j, dt in enumerate(seq.durations()):
        u_p = _hermitian_expm(h_plus, dt)
        u_m = _hermitian_expm(h_minus, dt)
        if j % 2 == 0:
            w_plus, w_minus = u_p @ w_plus, u_m @ w_minus
        else:
            w_plus, w_minus = u_m @ w_plus, u_p @ w_minus
    if math.isinf(beta_eff):
        pops = np.zeros(dim)
        pops[0] = 1.0
    else:
        logs = -beta_eff * mode.omega * np.arange(dim)
        pops = np.exp(logs - logs.max())
        pops /= pops.sum()
    overlap = np.einsum("n,in,in->", pops, w_minus.conj(), w_plus)
    return float(abs(overlap))


def fock_oracle_coherence(
    mode: BathMode,
    thermal: ThermalParams,
    seq: PulseSequence,
    fock: FockConfig = FockConfig(),
    rtol: float = 1e-8,
) -> FockReport:
    """Simulate ``omega b^dag b +/- eta (b + b^dag)`` in a truncated Fock basis.

    The result is accepted only if enlarging the basis by ``fock.growth``
    changes it by less than ``fock.tol``.
    """
    if mode.omega <= 0:
        raise ValueError("Fock oracle needs omega > 0")
    if not thermal.is_zero_temperature:
        nbar = 1.0 / math.expm1(thermal.beta * mode.omega)
        if nbar > fock.dim / 10:
            warnings.warn(f"thermal occupation {nbar:.3g} is not small against D={fock.dim}", stacklevel=2)
    big = int(math.ceil(fock.dim * fock.growth))
    results = {}
    for beta_eff, key in ((thermal.beta, "std"), (2.0 * thermal.beta, "alt")):
        small_c = _fock_coherence(mode, beta_eff, seq, fock.dim)
        big_c = _fock_coherence(mode, beta_eff, seq, big)
        err = abs(big_c - small_c)
        if err >= fock.tol:
            raise FockConvergenceError(
                f"Fock truncation not converged: D={fock.dim} -> {big} changes coherence by {err:.3e}"
            )
        results[key] = (big_c, err)

    single = DiscretizedBath((mode,), "oracle mode")
    engine_std = boson_bath.coherence_boson_exact(single, thermal, seq, "standard")
    engine_printed = boson_bath.coherence_boson_exact(single, thermal, seq, "printed")
    printed_rate = None
    if seq.n_flips == 0:
        T = seq.total_time
        printed_rate = math.exp(-T * boson_bath.gamma_boson_free(single, thermal, T))

    coherence, err_std = results["std"]
    doubled, err_alt = results["alt"]
    matches = []
    candidates = [("engine_standard", engine_std), ("engine_printed", engine_printed)]
    if printed_rate is not None:
        candidates.append(("printed_rate", printed_rate))
    for name, value in candidates:
        if abs(value - coherence) <= rtol * max(coherence, 1e-300) + 1e-14:
            matches.append(f"{name} (exp(-beta w n) state)")
        if abs(value - doubled) <= rtol * max(doubled, 1e-300) + 1e-14:
            matches.append(f"{name} (exp(-2 beta w n) state)")
    return FockReport(
        coherence=coherence,
        coherence_doubled_beta=doubled,
        dim=big,
        truncation_error=max(err_std, err_alt),
        engine_standard=engine_std,
        engine_printed=engine_printed,
        printed_rate_path=printed_rate,
        matches=tuple(matches),
    )


@dataclass(frozen=True)
class CommutatorReport:
    kind: str
    commutator: np.ndarray = field(repr=False)
    coefficient: complex
    predicted: complex
    deviation: float
    identity_proportional: bool
    traceless: bool
    matches_prediction: bool
    sign_matches_printed: bool

    @property
    def passed(self) -> bool:
        if self.kind == "boson":
            return self.matches_prediction and self.identity_proportional
        zero = abs(self.predicted) < 1e-12
        return self.matches_prediction and self.traceless and (zero or not self.identity_proportional)


def commutator_check(
    kind: str,
    mode: BathMode,
    t: float,
    t_prime: float,
    dim: int = 64,
    tol: float = 1e-8,
) -> CommutatorReport:
    """Compute ``[H_I(t), H_I(t')]`` and test its structure.

    Bosons: ``H_I(t) = eta (e^{-i w t} b + e^{i w t} b^dag)``; the commutator
    should be ``-2 i eta^2 sin(w (t - t'))`` times the identity. The
    truncated basis corrupts only the highest level, which is excluded.

    Spins: ``H_I(t) = eta (e^{-i w t} s- + e^{i w t} s+)``; the commutator is
    ``coefficient * sz`` with ``coefficient = +2 i eta^2 sin(w (t - t'))``
    for ``sz |e> = +|e>``. The printed sign ``-2 i`` corresponds to the
    opposite ``sz`` orientation; ``sign_matches_printed`` records this.
    """
    w, e = mode.omega, mode.eta
    s = t - t_prime
    printed = -2j * e**2 * math.sin(w * s)
    if kind == "boson":
        b, _ = _fock_ops(dim)

        def h_int(time):
            return e * (np.exp(-1j * w * time) * b + np.exp(1j * w * time) * b.conj().T)

        comm = h_int(t) @ h_int(t_prime) - h_int(t_prime) @ h_int(t)
        block = comm[: dim - 1, : dim - 1]
        coefficient = complex(np.mean(np.diag(block)))
        deviation = float(np.max(np.abs(block - coefficient * np.eye(dim - 1))))
        predicted = printed
        identity_prop = deviation <= tol * max(1.0, e**2)
        traceless = abs(np.trace(block)) <= tol
    elif kind == "spin":
        s_minus = _SPLUS.conj().T

        def h_int(time):
            return e * (np.exp(-1j * w * time) * s_minus + np.exp(1j * w * time) * _SPLUS)

        comm = h_int(t) @ h_int(t_prime) - h_int(t_prime) @ h_int(t)
        coefficient = complex(np.trace(comm @ _SZ) / 2.0)
        predicted = 2j * e**2 * math.sin(w * s)
        deviation = float(np.max(np.abs(comm - predicted * _SZ)))
        offdiag = float(np.max(np.abs(comm - np.trace(comm) / 2.0 * np.eye(2))))
        identity_prop = offdiag <= tol * max(1.0, e**2)
        traceless = abs(np.trace(comm)) <= tol
        block = comm
    else:
        raise ValueError(f"kind must be 'spin' or 'boson', got {kind!r}")
    matches = abs(coefficient - predicted) <= tol * max(1.0, e**2) and deviation <= tol * max(1.0, e**2)
    return CommutatorReport(
        kind=kind,
        commutator=block,
        coefficient=coefficient,
        predicted=predicted,
        deviation=deviation,
        identity_proportional=bool(identity_prop),
        traceless=bool(traceless),
        matches_prediction=bool(matches),
        sign_matches_printed=bool(abs(coefficient - printed) <= tol * max(1.0, e**2)),
    )


@dataclass(frozen=True)
class MagnusReport:
    unitary_deviation: float
    phase_cancels: bool
    coherence_with_phase: float
    coherence_without_phase: float


def magnus_check(mode: BathMode, t: float, dim: int = 64, block: int = 12) -> MagnusReport:
    """Second-order Magnus form against the numerically propagated oscillator.

    Compares the interaction-picture propagator ``exp(i H_B t) exp(-i H_+/- t)``
    with ``exp(i t f) exp(+/-(alpha b^dag - alpha^* b))`` where
    ``alpha = eta (1 - e^{i w t}) / w`` and ``t f = eta^2 (w t - sin w t) / w^2``,
    on the lowest ``block`` Fock levels. The phase sign follows from
    ``U = T exp(-i int H_I)``; it is common to both branches and drops out of
    the coherence either way.
    """
    w, e = mode.omega, mode.eta
    if w <= 0:
        raise ValueError("Magnus check needs omega > 0")
    b, num = _fock_ops(dim)
    bd = b.conj().T
    x = b + bd
    alpha = e * (1 - np.exp(1j * w * t)) / w
    phase = e**2 * (w * t - math.sin(w * t)) / w**2
    free_back = _hermitian_expm(w * num, t, sign=+1.0)
    worst = 0.0
    closed = {}
    for sign in (1, -1):
        numeric = free_back @ _hermitian_expm(w * num + sign * e * x, t)
        # sign (alpha b^dag - alpha^* b) = -i K with K Hermitian
        k = 1j * sign * (alpha * bd - np.conj(alpha) * b)
        disp = _hermitian_expm(k, 1.0)
        closed[sign] = disp
        magnus = np.exp(1j * phase) * disp
        worst = max(worst, float(np.max(np.abs((numeric - magnus)[:block, :block]))))
    vac = np.zeros(dim)
    vac[0] = 1.0
    with_phase = abs(np.vdot(np.exp(-1j * phase) * closed[-1] @ vac, np.exp(-1j * phase) * closed[1] @ vac))
    without_phase = abs(np.vdot(closed[-1] @ vac, closed[1] @ vac))
    return MagnusReport(worst, bool(abs(with_phase - without_phase) < 1e-14), float(with_phase), float(without_phase))


def periodic_form_deviations(
    configs,
    thermal: ThermalParams = ThermalParams(),
) -> dict[str, float]:
    """Largest coherence deviation of each closed periodic form from the matrix product.

    ``configs`` is an iterable of ``(bath, tau, n_pairs)``.
    """
    worst = {form: 0.0 for form in spin_bath.PERIODIC_FORMS}
    for bath, tau, n in configs:
        reference = abs(spin_bath.coherence_spin_pulsed(bath, thermal, periodic_sequence(tau, 2 * n)))
        for form in spin_bath.PERIODIC_FORMS:
            gamma = spin_bath.gamma_spin_periodic(bath, tau, n, form)
            value = 0.0 if math.isinf(gamma) else math.exp(-2 * n * tau * gamma)
            worst[form] = max(worst[form], abs(value - reference))
    return worst


def select_periodic_form(deviations: dict[str, float], tol: float = 1e-8) -> str | None:
    """First form (in preference order) whose deviation is within ``tol``."""
    for form in ("printed_interval", "printed_total", "exact"):
        if deviations.get(form, math.inf) <= tol:
            return form
    return None
