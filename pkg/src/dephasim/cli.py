"""Command-line driver: ``dephasim <task> --config <path> [--out <dir>]``.

The configuration is INI-style text (sections of ``key = value`` lines).
Unknown sections or keys are rejected, and every error names its line.
Exit codes: 0 success, 1 configuration error, 2 numerical error,
3 validation failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import analysis, boson_bath, master_eq, oracles, spin_bath
from .bath_spectrum import (
    DiscretizedBath,
    LorentzianSpectrum,
    SpectrumError,
    ThermalParams,
    BathMode,
    correlation_time,
    lorentzian_modes,
    one_over_f_modes,
    tabulated_modes,
)
from .sequences import (
    PulseSequence,
    SequenceError,
    custom_sequence,
    free_sequence,
    periodic_sequence,
    uhrig_sequence,
)

__all__ = ["TASKS", "ConfigError", "RunConfig", "parse_config", "run", "main"]

TASKS = ("free-decay", "pulsed-decay", "zeno-map", "compare-me", "validate")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3

# closed periodic spin form written into every CSV header
ADOPTED_PERIODIC_FORM = "exact"


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


_SCHEMA: dict[str, dict[str, str]] = {
    "run": {"task": "str", "kind": "str", "output": "str", "boson_convention": "str"},
    "spectrum": {
        "kind": "str",
        "omega0": "float",
        "gamma_c": "float",
        "weight": "float",
        "window": "floats",
        "modes": "int",
        "exponent": "float",
        "pairs": "pairs",
    },
    "thermal": {"beta": "beta"},
    "sequence": {
        "kind": "str",
        "tau": "float",
        "n": "int",
        "T": "float",
        "N": "int",
        "variant": "str",
        "times": "floats",
    },
    "grid": {"t_max": "float", "samples": "int"},
    "zeno": {
        "tau_min": "float",
        "tau_max": "float",
        "tau_samples": "int",
        "n_values": "ints",
        "tau_unit": "str",
        "crossover": "bool",
    },
    "validate": {"seed": "int", "draws": "int"},
}

_REQUIRED = {
    "free-decay": ("spectrum", "grid"),
    "pulsed-decay": ("spectrum", "sequence"),
    "zeno-map": ("spectrum", "zeno"),
    "compare-me": ("spectrum", "grid"),
    "validate": (),
}


@dataclass
class RunConfig:
    task: str
    kind: str = "both"
    boson_convention: str = "printed"
    output: str | None = None
    spectrum: dict[str, Any] = field(default_factory=dict)
    beta: float = math.inf
    sequence: dict[str, Any] = field(default_factory=dict)
    grid: dict[str, Any] = field(default_factory=dict)
    zeno: dict[str, Any] = field(default_factory=dict)
    validate: dict[str, Any] = field(default_factory=dict)
    digest: str = ""
    lines: dict[tuple[str, str], int] = field(default_factory=dict, repr=False)

    @property
    def kinds(self) -> tuple[str, ...]:
        return ("spin", "boson") if self.kind == "both" else (self.kind,)

    def line(self, section: str, key: str | None = None) -> int | None:
        return self.lines.get((section, key or ""))


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped[0] in "#;":
            continue
        header = re.fullmatch(r"\[([^\]]+)\]", stripped)
        if header:
            section = header.group(1).strip()
            lines.setdefault((section, ""), number)
            continue
        key = re.split(r"[=:]", stripped, maxsplit=1)[0].strip()
        lines.setdefault((section, key), number)
    return lines


def _convert(kind: str, raw: str):
    raw = raw.strip()
    if kind == "str":
        return raw
    if kind == "int":
        value = float(raw)
        if value != int(value):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    if kind == "float":
        value = float(raw)
        if math.isnan(value):
            raise ValueError("nan is not allowed")
        return value
    if kind == "beta":
        if raw.lower() in ("inf", "infinity", "+inf"):
            return math.inf
        return float(raw)
    if kind == "bool":
        lowered = raw.lower()
        if lowered in ("yes", "true", "on", "1"):
            return True
        if lowered in ("no", "false", "off", "0"):
            return False
        raise ValueError(f"expected yes/no, got {raw!r}")
    if kind in ("floats", "ints"):
        parts = [p for p in re.split(r"[,\s]+", raw) if p]
        if not parts:
            raise ValueError("expected a comma-separated list")
        return [_convert(kind[:-1], p) for p in parts]
    if kind == "pairs":
        pairs = []
        for item in (p for p in raw.split(",") if p.strip()):
            omega, _, eta = item.partition(":")
            if not _:
                raise ValueError(f"expected omega:eta, got {item.strip()!r}")
            pairs.append((float(omega), float(eta)))
        return pairs
    raise AssertionError(kind)


def parse_config(text: str, task: str | None = None) -> RunConfig:
    """Parse and validate configuration text for ``task``.

    ``task`` may come from the command line, from ``[run] task``, or both
    (they must then agree).
    """
    lines = _key_lines(text)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("malformed line", lineno) from None

    values: dict[str, dict[str, Any]] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", lines.get((section, "")))
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", lines.get((section, key)))
            try:
                values[section][key] = _convert(_SCHEMA[section][key], raw)
            except ValueError as exc:
                raise ConfigError(f"[{section}] {key}: {exc}", lines.get((section, key))) from None

    run_block = values.get("run", {})
    file_task = run_block.get("task")
    if task and file_task and task != file_task:
        raise ConfigError(f"[run] task {file_task!r} disagrees with command-line task {task!r}", lines.get(("run", "task")))
    task = task or file_task
    if task not in TASKS:
        raise ConfigError(f"unknown or missing task {task!r}; expected one of {', '.join(TASKS)}")
    for section in _REQUIRED[task]:
        if section not in values:
            raise ConfigError(f"task {task} requires a [{section}] section")

    cfg = RunConfig(
        task=task,
        kind=run_block.get("kind", "both"),
        boson_convention=run_block.get("boson_convention", "printed"),
        output=run_block.get("output"),
        spectrum=values.get("spectrum", {}),
        beta=values.get("thermal", {}).get("beta", math.inf),
        sequence=values.get("sequence", {}),
        grid=values.get("grid", {}),
        zeno=values.get("zeno", {}),
        validate=values.get("validate", {}),
        digest=hashlib.sha256(text.encode()).hexdigest(),
        lines=lines,
    )
    _check(cfg)
    return cfg


def _need(cfg: RunConfig, section: str, block: dict, keys) -> None:
    for key in keys:
        if key not in block:
            raise ConfigError(f"task {cfg.task} requires [{section}] {key}", cfg.line(section))


def _positive(cfg: RunConfig, section: str, block: dict, key: str) -> None:
    if key in block and not block[key] > 0:
        raise ConfigError(f"[{section}] {key} must be > 0 (task {cfg.task})", cfg.line(section, key))


def _check(cfg: RunConfig) -> None:
    if cfg.kind not in ("spin", "boson", "both"):
        raise ConfigError(f"[run] kind must be spin, boson or both, got {cfg.kind!r}", cfg.line("run", "kind"))
    if cfg.boson_convention not in boson_bath.CONVENTIONS:
        raise ConfigError(
            f"[run] boson_convention must be one of {boson_bath.CONVENTIONS}", cfg.line("run", "boson_convention")
        )
    if not (cfg.beta > 0):
        raise ConfigError("[thermal] beta must be > 0 or inf", cfg.line("thermal", "beta"))

    if cfg.spectrum:
        spec = cfg.spectrum
        kind = spec.get("kind")
        needs = {
            "lorentzian": ("omega0", "gamma_c", "weight", "modes"),
            "one_over_f": ("exponent", "window", "modes", "weight"),
            "tabulated": ("pairs",),
        }
        if kind not in needs:
            raise ConfigError(
                "[spectrum] kind must be lorentzian, one_over_f or tabulated", cfg.line("spectrum", "kind") or cfg.line("spectrum")
            )
        _need(cfg, "spectrum", spec, needs[kind])
        if "window" in spec and len(spec["window"]) != 2:
            raise ConfigError("[spectrum] window needs two values: lo, hi", cfg.line("spectrum", "window"))
        for key in ("gamma_c", "weight", "modes"):
            _positive(cfg, "spectrum", spec, key)
        try:
            cfg.bath = build_bath(cfg)
        except SpectrumError as exc:
            raise ConfigError(f"[spectrum] {exc}", cfg.line("spectrum")) from None

    if cfg.task in ("free-decay", "compare-me"):
        _need(cfg, "grid", cfg.grid, ("t_max", "samples"))
        _positive(cfg, "grid", cfg.grid, "t_max")
        _positive(cfg, "grid", cfg.grid, "samples")

    if cfg.task == "pulsed-decay":
        seq = cfg.sequence
        kind = seq.get("kind")
        needs = {"periodic": ("tau", "n"), "uhrig": ("T", "N"), "custom": ("T", "times")}
        if kind not in needs:
            raise ConfigError("[sequence] kind must be periodic, uhrig or custom", cfg.line("sequence", "kind") or cfg.line("sequence"))
        _need(cfg, "sequence", seq, needs[kind])
        for key in ("tau", "n", "T", "N"):
            _positive(cfg, "sequence", seq, key)
        try:
            cfg.pulses = build_sequence(cfg)
        except SequenceError as exc:
            raise ConfigError(f"[sequence] {exc}", cfg.line("sequence")) from None

    if cfg.task == "zeno-map":
        z = cfg.zeno
        _need(cfg, "zeno", z, ("tau_min", "tau_max", "tau_samples", "n_values"))
        for key in ("tau_min", "tau_max", "tau_samples"):
            _positive(cfg, "zeno", z, key)
        if not z["tau_min"] < z["tau_max"]:
            raise ConfigError("[zeno] tau_min must be < tau_max", cfg.line("zeno", "tau_min"))
        ns = z["n_values"]
        if any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigError("[zeno] n_values must be increasing integers >= 1", cfg.line("zeno", "n_values"))
        unit = z.get("tau_unit", "absolute")
        if unit not in ("absolute", "correlation"):
            raise ConfigError("[zeno] tau_unit must be absolute or correlation", cfg.line("zeno", "tau_unit"))
        if unit == "correlation" and cfg.spectrum.get("kind") != "lorentzian":
            raise ConfigError("[zeno] tau_unit = correlation needs a lorentzian spectrum", cfg.line("zeno", "tau_unit"))


def build_bath(cfg: RunConfig) -> DiscretizedBath:
    spec = cfg.spectrum
    kind = spec["kind"]
    if kind == "lorentzian":
        window = tuple(spec["window"]) if "window" in spec else None
        return lorentzian_modes(
            LorentzianSpectrum(spec["omega0"], spec["gamma_c"], spec["weight"], spec["modes"], window)
        )
    if kind == "one_over_f":
        return one_over_f_modes(spec["exponent"], spec["window"], spec["modes"], spec["weight"])
    return tabulated_modes(spec["pairs"])


def build_sequence(cfg: RunConfig) -> PulseSequence:
    seq = cfg.sequence
    kind = seq["kind"]
    if kind == "periodic":
        return periodic_sequence(seq["tau"], seq["n"])
    if kind == "uhrig":
        return uhrig_sequence(seq["T"], seq["N"], seq.get("variant", "standard"))
    return custom_sequence(seq["times"], seq["T"])


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def _write_csv(path: Path, cfg: RunConfig, header: list[str], rows) -> None:
    comment = (
        f"# dephasim task={cfg.task} config_sha256={cfg.digest} "
        f"periodic_spin_form={ADOPTED_PERIODIC_FORM} "
        f"boson_convention={cfg.boson_convention} boson_thermal_factor=coth(beta*omega)"
    )
    out = [comment, ",".join(header)]
    out.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(out) + "\n")


def _times(cfg: RunConfig) -> np.ndarray:
    t_max, samples = cfg.grid["t_max"], cfg.grid["samples"]
    return t_max * np.arange(1, samples + 1) / samples


def _task_free_decay(cfg: RunConfig, out: Path, thermal: ThermalParams) -> int:
    times = _times(cfg)
    columns = []
    header = ["t"]
    if "spin" in cfg.kinds:
        columns.append(spin_bath.spin_free_decay(cfg.bath, times).coherence)
        header.append("C_spin")
    if "boson" in cfg.kinds:
        if cfg.boson_convention == "printed":
            columns.append(boson_bath.boson_free_decay(cfg.bath, thermal, times).coherence)
        else:
            columns.append(
                [boson_bath.coherence_boson_exact(cfg.bath, thermal, free_sequence(t), cfg.boson_convention) for t in times]
            )
        header.append("C_boson")
    _write_csv(out / "free_decay.csv", cfg, header, zip(times, *columns))
    return EXIT_OK


def _pulsed_values(kind, cfg, thermal, seq: PulseSequence) -> tuple[float, float]:
    T = seq.total_time
    if kind == "spin":
        log_c = spin_bath._log_modulus(spin_bath.pulsed_overlaps(cfg.bath, thermal, seq))
        log_free = spin_bath._log_modulus(spin_bath.free_overlap(cfg.bath.omegas, cfg.bath.etas, T))
        return math.exp(log_c), math.exp(log_free)
    if cfg.boson_convention == "printed" and seq.tag in ("periodic", "free"):
        n = seq.n_flips + 1
        tau = T / n
        pulsed = math.exp(-T * boson_bath.gamma_boson_periodic(cfg.bath, thermal, tau, n))
        free = math.exp(-T * boson_bath.gamma_boson_free(cfg.bath, thermal, T))
        return pulsed, free
    pulsed = boson_bath.coherence_boson_exact(cfg.bath, thermal, seq, cfg.boson_convention)
    free = boson_bath.coherence_boson_exact(cfg.bath, thermal, free_sequence(T), cfg.boson_convention)
    return pulsed, free


def _task_pulsed_decay(cfg: RunConfig, out: Path, thermal: ThermalParams) -> int:
    seq = cfg.pulses
    if seq.tag == "periodic":
        tau = cfg.sequence["tau"]
        steps = [periodic_sequence(tau, j) for j in range(1, cfg.sequence["n"] + 1)]
    else:
        steps = [seq]
    header = ["T", "pulses"]
    for kind in cfg.kinds:
        header += [f"C_{kind}", f"C_{kind}_free", f"R_{kind}"]
    rows = []
    for step in steps:
        pulses = step.n_flips + 1 if step.tag == "periodic" else step.n_flips
        row: list = [step.total_time, pulses]
        for kind in cfg.kinds:
            pulsed, free = _pulsed_values(kind, cfg, thermal, step)
            row += [pulsed, free, pulsed / free if free > analysis.COHERENCE_FLOOR else math.nan]
        rows.append(row)
    _write_csv(out / "pulsed_decay.csv", cfg, header, rows)
    return EXIT_OK


def _task_zeno_map(cfg: RunConfig, out: Path, thermal: ThermalParams) -> int:
    z = cfg.zeno
    taus = np.linspace(z["tau_min"], z["tau_max"], z["tau_samples"])
    unit = 1.0
    if z.get("tau_unit", "absolute") == "correlation":
        s = cfg.spectrum
        unit = correlation_time(LorentzianSpectrum(s["omega0"], s["gamma_c"], s["weight"], s["modes"], s.get("window") and tuple(s["window"])))
    crossover_rows = []
    for kind in cfg.kinds:
        zmap = analysis.zeno_map(kind, cfg.bath, thermal, taus, z["n_values"], cfg.boson_convention, tau_unit=unit)
        _write_csv(out / f"zeno_map_{kind}.csv", cfg, ["tau", "n", "R"], zmap.rows())
        if z.get("crossover", True):
            for n in z["n_values"]:
                try:
                    tau_star = analysis.crossover_interval(
                        kind, cfg.bath, thermal, int(n), (taus[0] * unit, taus[-1] * unit),
                        boson_convention=cfg.boson_convention,
                    ) / unit
                except analysis.NoCrossoverError:
                    tau_star = math.nan
                crossover_rows.append([kind, int(n), tau_star])
    if crossover_rows:
        _write_csv(out / "crossover.csv", cfg, ["kind", "n", "tau_star"], crossover_rows)
    return EXIT_OK


def _task_compare_me(cfg: RunConfig, out: Path, thermal: ThermalParams) -> int:
    times = _times(cfg)
    bath = cfg.bath
    header = ["t"]
    columns = []
    if "spin" in cfg.kinds:
        with np.errstate(divide="ignore"):
            exact = -np.log(spin_bath.spin_free_decay(bath, times).coherence)
        columns += [exact, [master_eq.gamma_me_spin_free(bath, t) for t in times]]
        header += ["exponent_spin_exact", "exponent_spin_me"]
    if "boson" in cfg.kinds:
        columns += [
            [t * boson_bath.gamma_boson_free(bath, thermal, t) for t in times],
            [t * master_eq.gamma_me_boson(bath, thermal, t) for t in times],
        ]
        header += ["exponent_boson_exact", "exponent_boson_me"]
    _write_csv(out / "compare_me.csv", cfg, header, zip(times, *columns))
    rows = []
    for kind in cfg.kinds:
        report = master_eq.validity_check(bath, kind)
        rows.append([kind, report.max_ratio, report.threshold, "valid" if report.valid else "invalid"])
    _write_csv(out / "validity.csv", cfg, ["kind", "max_ratio", "threshold", "verdict"], rows)
    return EXIT_OK


@dataclass
class Check:
    name: str
    status: str
    max_error: float
    note: str = ""


def validation_checks(seed: int = 0, draws: int = 1000) -> tuple[list[Check], list[str]]:
    """Oracle suite shared by the ``validate`` task and the test-suite."""
    rng = np.random.default_rng(seed)
    checks: list[Check] = []
    notes: list[str] = []

    def add(name, err, tol, note=""):
        checks.append(Check(name, "pass" if err <= tol else "fail", float(err), note))

    worst = 0.0
    for _ in range(draws):
        w, e = rng.uniform(0, 5, 2)
        t = rng.uniform(0, 10)
        branch = 1 if rng.random() < 0.5 else -1
        mode = BathMode(w, e)
        diff = np.abs(oracles.spin_hamiltonian_oracle(mode, branch, t) - spin_bath.spin_mode_unitary(mode, branch, t))
        worst = max(worst, float(diff.max()))
    add("spin_unitary_vs_hamiltonian", worst, 1e-10)

    configs = []
    for _ in range(50):
        w, e = rng.uniform(0.05, 3, 2)
        configs.append((tabulated_modes([(w, e)]), float(rng.uniform(0.01, 3)), int(rng.integers(1, 31))))
    for _ in range(10):
        m = int(rng.integers(2, 9))
        pairs = list(zip(rng.uniform(0.05, 3, m), rng.uniform(0.0, 1.5, m)))
        configs.append((tabulated_modes(pairs), float(rng.uniform(0.01, 3)), int(rng.integers(1, 31))))
    deviations = oracles.periodic_form_deviations(configs)
    adopted = oracles.select_periodic_form(deviations)
    for form, dev in deviations.items():
        status = "pass" if dev <= 1e-8 else ("fail" if form == adopted else "deviates")
        checks.append(Check(f"periodic_spin_form_{form}", status, dev))
    checks.append(Check("periodic_spin_form_adopted", "pass" if adopted == ADOPTED_PERIODIC_FORM else "fail",
                        deviations.get(ADOPTED_PERIODIC_FORM, math.inf), f"adopted={adopted}"))
    notes.append(
        "periodic spin closed form: "
        + ", ".join(f"{k} max |dC| = {v:.3e}" for k, v in deviations.items())
        + f"; adopted: {adopted}"
    )

    worst_t = worst_free = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 6))
        bath = tabulated_modes(list(zip(rng.uniform(0.05, 3, m), rng.uniform(0, 1.5, m))))
        T = float(rng.uniform(0.1, 5))
        k = int(rng.integers(0, 6))
        seq = custom_sequence(sorted(rng.uniform(0, T, k)), T) if k else free_sequence(T)
        vals = [abs(spin_bath.coherence_spin_pulsed(bath, ThermalParams(b), seq)) for b in (0.01, 1.0, 100.0, math.inf)]
        worst_t = max(worst_t, max(vals) - min(vals))
        empty = abs(spin_bath.coherence_spin_pulsed(bath, ThermalParams(1.0), free_sequence(T)))
        worst_free = max(worst_free, abs(empty - spin_bath.coherence_spin_free(bath, T)))
    add("spin_temperature_independence", worst_t, 1e-12)
    add("spin_empty_sequence_vs_free", worst_free, 1e-12)

    worst_cycle = 0.0
    for _ in range(200):
        mode = BathMode(*rng.uniform(0.01, 3, 2))
        cyc = spin_bath.periodic_cycle(mode, float(rng.uniform(0.01, 3)))
        n = int(rng.integers(1, 20))
        worst_cycle = max(
            worst_cycle,
            abs(abs(cyc.lambda_plus) - 1),
            abs(np.vdot(cyc.v_plus, cyc.v_minus)),
            float(np.abs(cyc.power(n) - np.linalg.matrix_power(cyc.matrix, n)).max()),
        )
    add("periodic_cycle_spectral", worst_cycle, 1e-10)

    worst_bp = worst_bf = 0.0
    for _ in range(50):
        m = int(rng.integers(1, 6))
        bath = tabulated_modes(list(zip(rng.uniform(0.05, 3, m), rng.uniform(0, 1.5, m))))
        thermal = ThermalParams(float(rng.choice([0.5, 2.0, math.inf])))
        tau, n = float(rng.uniform(0.01, 2)), int(rng.integers(1, 25))
        closed = math.exp(-n * tau * boson_bath.gamma_boson_periodic(bath, thermal, tau, n))
        engine = boson_bath.coherence_boson_exact(bath, thermal, periodic_sequence(tau, n), "printed")
        worst_bp = max(worst_bp, abs(closed - engine))
        T = n * tau
        closed_free = math.exp(-T * boson_bath.gamma_boson_free(bath, thermal, T))
        worst_bf = max(worst_bf, abs(closed_free - boson_bath.coherence_boson_exact(bath, thermal, T=T)))
    add("boson_periodic_vs_engine", worst_bp, 1e-8)
    add("boson_free_vs_engine", worst_bf, 1e-12)

    worst_fock = 0.0
    mode = BathMode(1.0, 0.5)
    for thermal in (ThermalParams(), ThermalParams(1.0)):
        for seq in (free_sequence(1.3), periodic_sequence(0.4, 6), uhrig_sequence(2.0, 3)):
            report = oracles.fock_oracle_coherence(mode, thermal, seq)
            worst_fock = max(worst_fock, abs(report.coherence - report.engine_standard))
            if seq.n_flips == 0 and not thermal.is_zero_temperature:
                notes.extend(report.lines())
    add("fock_vs_engine_standard", worst_fock, 1e-8)

    b_rep = oracles.commutator_check("boson", BathMode(1.0, 1.0), math.pi / 2, 0.0)
    s_rep = oracles.commutator_check("spin", BathMode(1.0, 1.0), math.pi / 2, 0.0)
    checks.append(Check("commutator_boson_c_number", "pass" if b_rep.passed else "fail", b_rep.deviation))
    checks.append(Check("commutator_spin_operator", "pass" if s_rep.passed else "fail", s_rep.deviation,
                        f"sign matches printed: {s_rep.sign_matches_printed}"))
    notes.append(
        f"spin commutator coefficient {s_rep.coefficient:.6g} (sz|e>=+|e>); printed -2i eta^2 sin "
        f"matches only for the opposite sz orientation"
    )

    mag = oracles.magnus_check(BathMode(1.0, 0.7), 1.3)
    add("magnus_second_order_boson", mag.unitary_deviation if mag.phase_cancels else math.inf, 1e-8)

    bath = lorentzian_modes(LorentzianSpectrum(0.5, 1.0, 1.0, 50))
    th = ThermalParams(2.0)
    diff = max(
        abs(master_eq.gamma_me_boson(bath, th, t=0.7) - boson_bath.gamma_boson_free(bath, th, 0.7)),
        abs(master_eq.gamma_me_boson(bath, th, tau=0.2, n=7) - boson_bath.gamma_boson_periodic(bath, th, 0.2, 7)),
    )
    add("me_boson_identity", diff, 0.0)
    return checks, notes


def _task_validate(cfg: RunConfig, out: Path, thermal: ThermalParams) -> int:
    checks, notes = validation_checks(cfg.validate.get("seed", 0), cfg.validate.get("draws", 1000))
    _write_csv(out / "validate.csv", cfg, ["check", "status", "max_error"], [[c.name, c.status, c.max_error] for c in checks])
    report = [f"{c.status.upper():8s} {c.name:36s} max_error={c.max_error:.3e} {c.note}".rstrip() for c in checks]
    report += ["", *notes]
    text = "\n".join(report) + "\n"
    (out / "validate_report.txt").write_text(text)
    print(text, end="")
    return EXIT_VALIDATION if any(c.status == "fail" for c in checks) else EXIT_OK


_TASK_FUNCS: dict[str, Callable[[RunConfig, Path, ThermalParams], int]] = {
    "free-decay": _task_free_decay,
    "pulsed-decay": _task_pulsed_decay,
    "zeno-map": _task_zeno_map,
    "compare-me": _task_compare_me,
    "validate": _task_validate,
}


def run(cfg: RunConfig, out_dir: str | Path | None = None) -> int:
    out = Path(out_dir or cfg.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    thermal = ThermalParams(cfg.beta)
    try:
        return _TASK_FUNCS[cfg.task](cfg, out, thermal)
    except (SpectrumError, SequenceError) as exc:
        print(f"dephasim: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (oracles.FockConvergenceError, analysis.RatioError, FloatingPointError) as exc:
        print(f"dephasim: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dephasim", description=__doc__.splitlines()[0])
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", required=True, type=Path, help="INI-style run configuration")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default: [run] output or cwd)")
    args = parser.parse_args(argv)
    try:
        text = args.config.read_text()
    except OSError as exc:
        print(f"dephasim: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, args.task)
    except ConfigError as exc:
        print(f"dephasim: {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
