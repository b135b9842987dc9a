"""Command-line interface: scenario runs, circuit export, spectra, heatmaps.

Configuration is line-oriented ``key = value`` text with ``#`` comments.
Unknown keys are rejected.  Every config key has a mirroring command-line
flag that overrides the file value; environment variables are never
consulted.  Exit codes: 0 success, 2 configuration error, 3 numerical
diagnostic failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import circuit as circuit_mod
from . import nmr, report, splitop
from .grid import delta_state, make_grid
from .potential import BUILTIN_TAGS, PotentialSpec, builtin_scenario, tabulate

__all__ = [
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_DIAGNOSTIC",
    "EXIT_IO",
    "ConfigError",
    "DiagnosticError",
    "RunConfig",
    "parse_config",
    "run",
    "compile_circuit",
    "spectrum",
    "plot",
    "main",
    "entry_point",
]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIAGNOSTIC = 3
EXIT_IO = 4

ENGINES = ("statevector", "circuit", "exact-oracle", "nmr")

# Engine cross-agreement is checked whenever the dense routes are cheap.
AGREEMENT_TOLERANCE = 1e-9
_CROSS_CHECK_MAX_QUBITS = 8


class ConfigError(Exception):
    """Invalid configuration text, key, value, or combination."""


class DiagnosticError(Exception):
    """A numerical self-check failed during a run."""


@dataclass
class RunConfig:
    scenario: str
    n_qubits: int
    length: float
    dt: float
    steps: int
    start_index: int
    potential_file: str | None = None
    engine: str = "statevector"
    decay: bool = False
    t2_seconds: float = nmr.T2_EFFECTIVE_SECONDS
    step_wall_seconds: float = nmr.STEP_WALL_SECONDS
    momentum_convention: str = "box"
    output_dir: str = "out"


_INT_KEYS = ("n_qubits", "steps", "start_index")
_FLOAT_KEYS = ("length", "dt", "t2_seconds", "step_wall_seconds")
_STR_KEYS = ("scenario", "potential_file", "engine", "momentum_convention", "output_dir")
_BOOL_KEYS = ("decay",)
_ALL_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS + _BOOL_KEYS

# Builtin scenarios pin the lattice, potential, and start site; only the
# keys below may be overridden on top of them.
_BUILTIN_OVERRIDABLE = {
    "scenario",
    "dt",
    "steps",
    "engine",
    "decay",
    "t2_seconds",
    "step_wall_seconds",
    "momentum_convention",
    "output_dir",
}


def _entries_from_text(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def _parse_value(key: str, text: str):
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
        if key in _BOOL_KEYS:
            lowered = text.lower()
            if lowered in ("true", "on", "1", "yes"):
                return True
            if lowered in ("false", "off", "0", "no"):
                return False
            raise ValueError(text)
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r} for key {key!r}") from exc
    return text


def _config_from_entries(entries: dict[str, str]) -> RunConfig:
    values = {key: _parse_value(key, text) for key, text in entries.items()}
    scenario = values.get("scenario")
    if scenario is None:
        raise ConfigError("missing required key 'scenario'")

    if scenario in BUILTIN_TAGS:
        base = builtin_scenario(scenario)
        for key in values:
            if key not in _BUILTIN_OVERRIDABLE:
                raise ConfigError(
                    f"key {key!r} cannot be overridden for builtin scenario {scenario!r}"
                )
        config = RunConfig(
            scenario=scenario,
            n_qubits=base.grid.n_qubits,
            length=base.grid.length,
            dt=values.get("dt", base.dt),
            steps=values.get("steps", base.default_steps),
            start_index=base.start_index,
        )
    elif scenario == "custom":
        required = ("n_qubits", "length", "dt", "start_index", "potential_file")
        missing = [key for key in required if key not in values]
        if missing:
            raise ConfigError(f"custom scenario is missing required keys: {', '.join(missing)}")
        config = RunConfig(
            scenario="custom",
            n_qubits=values["n_qubits"],
            length=values["length"],
            dt=values["dt"],
            steps=values.get("steps", 10),
            start_index=values["start_index"],
            potential_file=values["potential_file"],
        )
    else:
        raise ConfigError(f"unknown scenario {scenario!r}; expected {BUILTIN_TAGS + ('custom',)}")

    for key in ("engine", "decay", "t2_seconds", "step_wall_seconds", "momentum_convention",
                "output_dir"):
        if key in values:
            setattr(config, key, values[key])

    if config.engine not in ENGINES:
        raise ConfigError(f"unknown engine {config.engine!r}; expected one of {ENGINES}")
    if config.engine == "nmr" and config.n_qubits != 4:
        raise ConfigError("the nmr engine models a 4-qubit register readout")
    if config.momentum_convention not in splitop.MOMENTUM_CONVENTIONS:
        raise ConfigError(
            f"unknown momentum convention {config.momentum_convention!r}; "
            f"expected one of {splitop.MOMENTUM_CONVENTIONS}"
        )
    if config.steps < 0:
        raise ConfigError(f"steps must be non-negative, got {config.steps}")
    if not config.dt > 0.0:
        raise ConfigError(f"dt must be positive, got {config.dt}")
    if not config.t2_seconds > 0.0:
        raise ConfigError(f"t2_seconds must be positive, got {config.t2_seconds}")
    if config.step_wall_seconds < 0.0:
        raise ConfigError(f"step_wall_seconds must be non-negative, got {config.step_wall_seconds}")

    try:
        grid = make_grid(config.n_qubits, config.length)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if not 0 <= config.start_index < grid.n_sites:
        raise ConfigError(
            f"start_index {config.start_index} out of range [0, {grid.n_sites - 1}]"
        )
    return config


def parse_config(text: str) -> RunConfig:
    """Parse config text into a validated RunConfig."""
    return _config_from_entries(_entries_from_text(text))


def _load_potential_values(path: str, n_sites: int) -> PotentialSpec:
    lines = Path(path).read_text(encoding="utf-8").split()
    try:
        values = [float(token) for token in lines]
    except ValueError as exc:
        raise ConfigError(f"potential file {path!r} has a non-numeric entry") from exc
    if len(values) != n_sites:
        raise ConfigError(
            f"potential file {path!r} has {len(values)} values, grid needs {n_sites}"
        )
    if not all(np.isfinite(values)):
        raise ConfigError(f"potential file {path!r} contains non-finite values")
    return PotentialSpec.from_values(values)


def _build_problem(config: RunConfig):
    """Grid, tabulated potential, and Trotter plan for a config."""
    if config.scenario in BUILTIN_TAGS:
        base = builtin_scenario(config.scenario)
        grid, vspec = base.grid, base.potential
    else:
        grid = make_grid(config.n_qubits, config.length)
        vspec = _load_potential_values(config.potential_file, grid.n_sites)
    vtable = tabulate(vspec, grid)
    plan = splitop.make_plan(grid, vtable, config.dt, config.momentum_convention)
    return grid, vtable, plan


def _table_statevector(plan, start_index: int, steps: int) -> np.ndarray:
    record = splitop.evolve(plan, delta_state(plan.grid, start_index), steps)
    return record.probability_table()


def _table_circuit(plan, start_index: int, steps: int) -> np.ndarray:
    circ = circuit_mod.step_circuit(plan)
    psi = delta_state(plan.grid, start_index).amplitudes
    columns = [np.abs(psi) ** 2]
    for _ in range(steps):
        psi = circuit_mod.apply_circuit(circ, psi)
        columns.append(np.abs(psi) ** 2)
    return np.column_stack(columns)


def _table_oracle(config: RunConfig, grid, vtable, steps: int) -> np.ndarray:
    u = splitop.exact_propagator(grid, vtable, config.dt, config.momentum_convention)
    psi = delta_state(grid, config.start_index).amplitudes
    columns = [np.abs(psi) ** 2]
    for _ in range(steps):
        psi = u @ psi
        columns.append(np.abs(psi) ** 2)
    return np.column_stack(columns)


def _nmr_signals(plan, spec, start_index: int, steps: int) -> np.ndarray:
    """Raw readout differences per step, one column per step count."""
    step_u = splitop.step_matrix(plan)
    u = np.eye(plan.grid.n_sites, dtype=complex)
    columns = []
    for m in range(steps + 1):
        if m > 0:
            u = step_u @ u
        columns.append(nmr.experiment_signals(spec, u, start_index))
    return np.column_stack(columns)


def run(config: RunConfig) -> dict[str, Path]:
    """Execute a configured run and write every artifact; returns the paths."""
    grid, vtable, plan = _build_problem(config)
    steps = config.steps
    spin_spec = nmr.default_spin_system()

    raw_signals = None
    if config.engine == "statevector":
        table = _table_statevector(plan, config.start_index, steps)
    elif config.engine == "circuit":
        table = _table_circuit(plan, config.start_index, steps)
    elif config.engine == "exact-oracle":
        table = _table_oracle(config, grid, vtable, steps)
    else:
        raw_signals = _nmr_signals(plan, spin_spec, config.start_index, steps)
        table = splitop.normalize_columns(raw_signals)

    if grid.n_qubits <= _CROSS_CHECK_MAX_QUBITS and config.engine != "exact-oracle":
        reference = _table_statevector(plan, config.start_index, steps)
        others = {"circuit": _table_circuit(plan, config.start_index, steps)}
        if grid.n_qubits == 4:
            others["nmr"] = splitop.normalize_columns(
                _nmr_signals(plan, spin_spec, config.start_index, steps)
            )
        for name, candidate in others.items():
            gap = float(np.max(np.abs(candidate - reference)))
            if gap > AGREEMENT_TOLERANCE:
                raise DiagnosticError(
                    f"engine {name!r} disagrees with statevector by {gap:.3e} "
                    f"(tolerance {AGREEMENT_TOLERANCE:g})"
                )

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    paths["probabilities"] = out_dir / "probabilities.csv"
    report.write_probabilities_csv(paths["probabilities"], grid, table)

    if grid.n_qubits <= splitop.MAX_DENSE_QUBITS:
        oracle = _table_oracle(config, grid, vtable, steps)
        rms = [splitop.rms_error(table[:, m], oracle[:, m]) for m in range(steps + 1)]
        paths["rms"] = out_dir / "rms.csv"
        report.write_rms_csv(paths["rms"], rms)
        paths["rms_png"] = out_dir / "rms.png"
        report.save_rms_png(paths["rms_png"], rms, title=f"{config.scenario}: engine vs oracle")

    if config.engine == "nmr":
        signals = raw_signals.copy()
        if config.decay:
            for m in range(steps + 1):
                signals[:, m] = nmr.decay_model(
                    signals[:, m], m, config.step_wall_seconds, config.t2_seconds
                )
        for m in range(steps + 1):
            lines = nmr.ancilla_spectrum(spin_spec, signals[:, m])
            path = out_dir / f"spectrum_step{m}.csv"
            report.write_spectrum_csv(path, lines)
            paths[f"spectrum_step{m}"] = path

    paths["heatmap_png"] = out_dir / "heatmap.png"
    report.save_heatmap_png(paths["heatmap_png"], grid, table, title=config.scenario)
    return paths


def compile_circuit(config: RunConfig) -> Path:
    """Write the gate list of one compiled step to the output directory."""
    if config.n_qubits > splitop.MAX_DENSE_QUBITS:
        raise ConfigError(
            f"circuit export is limited to {splitop.MAX_DENSE_QUBITS} qubits, "
            f"got {config.n_qubits}"
        )
    _, _, plan = _build_problem(config)
    circ = circuit_mod.step_circuit(plan)
    lowered = circuit_mod.lowered_gate_counts(circ)
    lowered_text = " ".join(f"{kind}={count}" for kind, count in lowered.items())
    text = circuit_mod.format_gates(circ) + f"# lowered {lowered_text}\n"
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "circuit.txt"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def spectrum(output_dir: str, pops_state: int | None = None, all_spins: bool = False) -> list[Path]:
    """Write the ancilla line table for equilibrium or a POPS preparation."""
    spec = nmr.default_spin_system()
    dev = nmr.equilibrium_deviation(spec)
    if pops_state is not None:
        if not 0 <= pops_state < spec.n_register_states:
            raise ConfigError(
                f"pops state {pops_state} out of range [0, {spec.n_register_states - 1}]"
            )
        dev = nmr.pops(dev, nmr.invert_transition(dev, pops_state))
    intensities = nmr.readout_intensities(dev)
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / "spectrum.csv"]
    report.write_spectrum_csv(paths[0], nmr.ancilla_spectrum(spec, intensities))
    if all_spins:
        path = out_dir / "all_lines.csv"
        lines = nmr.all_lines(spec)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("spin,neighbor_state,frequency_hz\n")
            for line in lines:
                fh.write(
                    f"{line.spin},{line.neighbor_state:04b},"
                    f"{report.format_float(line.frequency_hz)}\n"
                )
        paths.append(path)
    return paths


def plot(csv_path: str, output_path: str) -> Path:
    """Render a probabilities CSV as the deterministic SVG heatmap."""
    table = report.read_probabilities_csv(csv_path)
    svg = report.render_heatmap_svg(table)
    out = Path(output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
    return out


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument("--scenario", choices=BUILTIN_TAGS + ("custom",))
    parser.add_argument("--n-qubits", dest="n_qubits")
    parser.add_argument("--length")
    parser.add_argument("--dt")
    parser.add_argument("--steps")
    parser.add_argument("--start-index", dest="start_index")
    parser.add_argument("--potential-file", dest="potential_file")
    parser.add_argument("--engine", choices=ENGINES)
    parser.add_argument("--decay", choices=("on", "off"))
    parser.add_argument("--t2-seconds", dest="t2_seconds")
    parser.add_argument("--step-wall-seconds", dest="step_wall_seconds")
    parser.add_argument("--momentum-convention", dest="momentum_convention",
                        choices=splitop.MOMENTUM_CONVENTIONS)
    parser.add_argument("--output-dir", dest="output_dir")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    entries: dict[str, str] = {}
    if args.config is not None:
        entries = _entries_from_text(Path(args.config).read_text(encoding="utf-8"))
    for key in _ALL_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            entries[key] = value
    return _config_from_entries(entries)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsim1d",
        description="Split-operator dynamics on a qubit register with spectral readout emulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="propagate a scenario and write csv/figure artifacts")
    _add_config_flags(p_run)

    p_compile = sub.add_parser("compile", help="export the gate list of one compiled step")
    _add_config_flags(p_compile)

    p_spectrum = sub.add_parser("spectrum", help="write the ancilla line table")
    p_spectrum.add_argument("--pops", type=int, default=None,
                            help="prepare a pair-of-states difference at this register state")
    p_spectrum.add_argument("--all", action="store_true", dest="all_spins",
                            help="also write every spin's lines")
    p_spectrum.add_argument("--output-dir", dest="output_dir", default="out")

    p_plot = sub.add_parser("plot", help="render a probabilities csv as an SVG heatmap")
    p_plot.add_argument("csv", help="path to a probabilities.csv file")
    p_plot.add_argument("--output", default="heatmap.svg")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            paths = run(_config_from_args(args))
            for name in sorted(paths):
                print(f"{name}: {paths[name]}")
        elif args.command == "compile":
            path = compile_circuit(_config_from_args(args))
            print(f"circuit: {path}")
        elif args.command == "spectrum":
            for path in spectrum(args.output_dir, args.pops, args.all_spins):
                print(f"spectrum: {path}")
        elif args.command == "plot":
            print(f"heatmap: {plot(args.csv, args.output)}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DiagnosticError as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
