"""Command-line front end: ``qubitmaps {steady,sweep,evolve,threshold,validate}``.

Parameters come from built-in defaults (the reference set: T=10, omega_c=100,
s=1, g=1, f1=f2=1, model=both), then an optional ``key = value`` config file,
then command-line flags. Exit status: 0 success, 1 computation or check
failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathParams
from .checks import run_checks
from .dynamics import (
    closed_form_steady_state,
    from_bloch,
    negativity_threshold,
    positivity_report,
    propagate,
    steady_state,
    to_bloch,
)
from .errors import BracketError, DomainError, NoCrossingError, QubitMapsError
from .integrals import QuadratureConfig, shift_integrals
from .kernels import QubitParams, build_generator

STEADY_COLUMNS = ["omega0", "model", "rho_pp", "rho_mm", "rho_pm_re", "rho_pm_im", "vx", "vy",
                  "vz", "min_eig", "g0", "n0", "D0", "Delta", "Delta_plus", "Delta_minus", "error"]
EVOLVE_COLUMNS = ["model", "t", "rho_pp", "rho_mm", "rho_pm_re", "rho_pm_im", "abs_rho_pm",
                  "vx", "vy", "vz", "trace_defect", "dist_to_steady"]


class UsageError(Exception):
    pass


@dataclass
class SweepSpec:
    param: str = "omega0"
    start: float = 1.0
    stop: float = 50.0
    steps: int = 200
    spacing: str = "linear"

    def grid(self):
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.steps)
        return np.linspace(self.start, self.stop, self.steps)


@dataclass
class EvolveSpec:
    t_max: float = 1.0
    samples: int = 101
    rho0: tuple = (1.0, 0.0, 0.0)


@dataclass
class OutputSpec:
    path: str | None = None
    format: str = "csv"
    precision: int = 12


@dataclass
class RunConfig:
    model: str = "both"
    qubit: QubitParams = field(default_factory=QubitParams)
    bath: BathParams = field(default_factory=lambda: BathParams(1.0, 1.0, 100.0, 10.0))
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    evolve: EvolveSpec = field(default_factory=EvolveSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    bracket: tuple = (1.0, 50.0)
    golden: str | None = None
    tolerance: float = 1e-10

    @property
    def models(self):
        return ["redfield", "lindblad"] if self.model == "both" else [self.model]


# config-file / flag key -> (section, attribute, parser)
def _floats(text):
    return tuple(float(v) for v in str(text).split(","))


_KEYS = {
    "model": (None, "model", str),
    "qubit.omega0": ("qubit", "omega0", float),
    "qubit.f1": ("qubit", "f1", float),
    "qubit.f2": ("qubit", "f2", float),
    "bath.g": ("bath", "g", float),
    "bath.s": ("bath", "s", float),
    "bath.omega_c": ("bath", "omega_c", float),
    "bath.T": ("bath", "T", float),
    "quadrature.rel_tol": ("quadrature", "rel_tol", float),
    "quadrature.abs_tol": ("quadrature", "abs_tol", float),
    "quadrature.tail_cutoff_multiplier": ("quadrature", "tail_cutoff_multiplier", float),
    "quadrature.excision_halfwidth_factor": ("quadrature", "excision_halfwidth_factor", float),
    "sweep.param": ("sweep", "param", str),
    "sweep.from": ("sweep", "start", float),
    "sweep.to": ("sweep", "stop", float),
    "sweep.steps": ("sweep", "steps", int),
    "sweep.spacing": ("sweep", "spacing", str),
    "evolve.t_max": ("evolve", "t_max", float),
    "evolve.samples": ("evolve", "samples", int),
    "evolve.rho0": ("evolve", "rho0", _floats),
    "output.path": ("output", "path", str),
    "output.format": ("output", "format", str),
    "output.precision": ("output", "precision", int),
    "threshold.bracket": (None, "bracket", _floats),
    "threshold.golden": (None, "golden", str),
    "validate.tolerance": (None, "tolerance", float),
}

_FLAG_KEYS = {
    "model": "model", "omega0": "qubit.omega0", "f1": "qubit.f1", "f2": "qubit.f2",
    "T": "bath.T", "g": "bath.g", "s": "bath.s", "omega_c": "bath.omega_c",
    "out": "output.path", "format": "output.format", "precision": "output.precision",
    "param": "sweep.param", "from_": "sweep.from", "to": "sweep.to", "steps": "sweep.steps",
    "spacing": "sweep.spacing", "t_max": "evolve.t_max", "samples": "evolve.samples",
    "rho0": "evolve.rho0", "bracket": "threshold.bracket", "golden": "threshold.golden",
    "tolerance": "validate.tolerance", "rel_tol": "quadrature.rel_tol",
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def build_config(values: dict) -> RunConfig:
    """Apply ``values`` (dotted keys, raw strings or typed) to the defaults."""
    sections = {"qubit": {}, "bath": {}, "quadrature": {}, "sweep": {}, "evolve": {},
                "output": {}, None: {}}
    for key, raw in values.items():
        section, attr, parse = _KEYS[key]
        try:
            sections[section][attr] = parse(raw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {raw!r}") from exc
    base = RunConfig()
    try:
        cfg = replace(
            base,
            qubit=replace(base.qubit, **sections["qubit"]),
            bath=replace(base.bath, **sections["bath"]),
            quadrature=replace(base.quadrature, **sections["quadrature"]),
            sweep=replace(base.sweep, **sections["sweep"]),
            evolve=replace(base.evolve, **sections["evolve"]),
            output=replace(base.output, **sections["output"]),
            **sections[None],
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.model not in ("redfield", "lindblad", "both"):
        raise UsageError(f"--model must be redfield, lindblad or both, got {cfg.model!r}")
    if cfg.output.format not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {cfg.output.format!r}")
    if not 6 <= cfg.output.precision <= 17:
        raise UsageError("--precision must lie in [6, 17]")
    sw = cfg.sweep
    if sw.param != "omega0":
        raise UsageError("only omega0 sweeps are supported")
    if sw.spacing not in ("linear", "log"):
        raise UsageError("--spacing must be linear or log")
    if sw.steps < 2 or not sw.start < sw.stop or sw.start <= 0:
        raise UsageError("sweep needs 0 < from < to and steps >= 2")
    ev = cfg.evolve
    if ev.t_max < 0 or ev.samples < 1 or len(ev.rho0) != 3:
        raise UsageError("evolve needs t_max >= 0, samples >= 1 and --rho0 x,y,z")
    if len(cfg.bracket) != 2 or not 0 < cfg.bracket[0] < cfg.bracket[1]:
        raise UsageError(f"bracket must be 'lo,hi' with 0 < lo < hi, got {cfg.bracket!r}")
    if not cfg.tolerance > 0:
        raise UsageError("--tolerance must be > 0")


# ----------------------------------------------------------------------------
# formatting


def fmt(value, precision):
    if value is None or value == "":
        return ""
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0:
        value = 0.0  # drop the sign of -0.0
    return format(value, f".{precision - 1}e")


def render(rows, columns, output: OutputSpec) -> str:
    if output.format == "json":
        clean = [{c: (r.get(c) if not isinstance(r.get(c), float) or math.isfinite(r[c])
                      else str(r[c])) for c in columns} for r in rows]
        return json.dumps(clean, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([fmt(r.get(c), output.precision) for c in columns])
    return buf.getvalue()


def emit(text, output: OutputSpec):
    if output.path:
        with open(output.path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------------------
# commands


def _steady_rows(cfg: RunConfig, qubit: QubitParams):
    try:
        shifts = shift_integrals(cfg.bath, qubit.omega0, cfg.quadrature)
    except QubitMapsError as exc:
        return [{"omega0": qubit.omega0, "model": m, "error": f"{type(exc).__name__}: {exc}"}
                for m in cfg.models]
    base = {"omega0": qubit.omega0, "g0": shifts.g0, "n0": shifts.n0, "D0": shifts.D0.value,
            "Delta": shifts.delta, "Delta_plus": shifts.delta_plus,
            "Delta_minus": shifts.delta_minus, "error": ""}
    rows = []
    for model in cfg.models:
        row = dict(base, model=model)
        try:
            rho = steady_state(build_generator(model, qubit, cfg.bath, shifts=shifts))
            v = to_bloch(rho)
            row.update(rho_pp=rho.rho_pp, rho_mm=rho.rho_mm, rho_pm_re=rho.rho_pm.real,
                       rho_pm_im=rho.rho_pm.imag, vx=v.vx, vy=v.vy, vz=v.vz,
                       min_eig=positivity_report(rho).min_eigenvalue)
        except (QubitMapsError, ArithmeticError) as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


def cmd_steady(cfg: RunConfig) -> int:
    rows = _steady_rows(cfg, cfg.qubit)
    emit(render(rows, STEADY_COLUMNS, cfg.output), cfg.output)
    failed = [r["error"] for r in rows if r["error"]]
    if failed:
        raise ComputationFailed("; ".join(failed))
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    rows = []
    for w in cfg.sweep.grid():
        rows.extend(_steady_rows(cfg, replace(cfg.qubit, omega0=float(w))))
    emit(render(rows, STEADY_COLUMNS, cfg.output), cfg.output)
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    ev = cfg.evolve
    try:
        rho0 = from_bloch(ev.rho0)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    times = np.array([0.0]) if ev.t_max == 0 or ev.samples == 1 else \
        np.linspace(0.0, ev.t_max, ev.samples)
    shifts = shift_integrals(cfg.bath, cfg.qubit.omega0, cfg.quadrature)
    rows = []
    for model in cfg.models:
        gen = build_generator(model, cfg.qubit, cfg.bath, shifts=shifts)
        traj = propagate(gen, rho0, times)
        for t, rho in zip(traj.times, traj.states):
            v = to_bloch(rho)
            rows.append({"model": model, "t": t, "rho_pp": rho.rho_pp, "rho_mm": rho.rho_mm,
                         "rho_pm_re": rho.rho_pm.real, "rho_pm_im": rho.rho_pm.imag,
                         "abs_rho_pm": abs(rho.rho_pm), "vx": v.vx, "vy": v.vy, "vz": v.vz,
                         "trace_defect": abs(rho.rho_pp + rho.rho_mm - 1),
                         "dist_to_steady": ""})
        try:
            st = steady_state(gen)
            rows[-1]["dist_to_steady"] = float(np.linalg.norm(traj.states[-1].vec() - st.vec()))
        except (QubitMapsError, ArithmeticError):
            rows[-1]["dist_to_steady"] = "no-unique-steady-state"
    emit(render(rows, EVOLVE_COLUMNS, cfg.output), cfg.output)
    return 0


def cmd_threshold(cfg: RunConfig) -> int:
    report = {"bracket": list(cfg.bracket), "f1": cfg.qubit.f1, "f2": cfg.qubit.f2}
    status = 0
    for model in cfg.models:
        try:
            w = negativity_threshold(cfg.qubit, cfg.bath, model, cfg.bracket, cfg.quadrature)
            report[model] = {"omega0_star": w}
        except NoCrossingError as exc:
            report[model] = {"omega0_star": None, "message": str(exc)}
        except BracketError as exc:
            report[model] = {"omega0_star": None, "error": str(exc)}
            status = 1
    if cfg.golden and report.get("redfield", {}).get("omega0_star") is not None:
        with open(cfg.golden, encoding="utf-8") as fh:
            golden = json.load(fh)
        ref = float(golden["omega0_star"])
        tol = float(golden.get("tol", 1e-6))
        got = report["redfield"]["omega0_star"]
        report["golden"] = {"omega0_star": ref, "tol": tol, "diff": got - ref,
                            "match": abs(got - ref) <= tol}
        if abs(got - ref) > tol:
            status = 1
    if cfg.output.format == "json":
        emit(json.dumps(report, indent=1) + "\n", cfg.output)
    else:
        lines = []
        for model in cfg.models:
            r = report[model]
            if r["omega0_star"] is not None:
                lines.append(f"{model}: omega0* = {fmt(r['omega0_star'], cfg.output.precision)}")
            else:
                lines.append(f"{model}: {r.get('message') or r.get('error')}")
        if "golden" in report:
            g = report["golden"]
            lines.append(f"golden: {fmt(g['omega0_star'], cfg.output.precision)} "
                         f"diff {fmt(g['diff'], 6)} {'match' if g['match'] else 'MISMATCH'}")
        emit("\n".join(lines) + "\n", cfg.output)
    return status


def cmd_validate(cfg: RunConfig) -> int:
    results = run_checks(cfg.qubit, cfg.bath, cfg.quadrature, cfg.tolerance)
    if cfg.output.format == "json":
        text = json.dumps([r.__dict__ for r in results], indent=1) + "\n"
    else:
        text = "".join(f"{r.status.upper():7s} {r.name:28s} {r.seconds:7.3f}s  {r.detail}\n"
                       for r in results)
    emit(text, cfg.output)
    failed = [r.name for r in results if r.status == "fail"]
    if failed:
        raise ComputationFailed("failed checks: " + ", ".join(failed))
    return 0


class ComputationFailed(Exception):
    pass


COMMANDS = {"steady": cmd_steady, "sweep": cmd_sweep, "evolve": cmd_evolve,
            "threshold": cmd_threshold, "validate": cmd_validate}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="redfield | lindblad | both (default both)")
    common.add_argument("--omega0", type=float, help="qubit splitting")
    common.add_argument("--f1", type=float, help="dephasing coupling f1")
    common.add_argument("--f2", type=float, help="dissipative coupling f2")
    common.add_argument("--T", type=float, help="bath temperature")
    common.add_argument("--g", type=float, help="spectral strength")
    common.add_argument("--s", type=float, help="spectral exponent")
    common.add_argument("--omega-c", dest="omega_c", type=float, help="cutoff frequency")
    common.add_argument("--rel-tol", dest="rel_tol", type=float, help="quadrature rel. tolerance")
    common.add_argument("--config", help="key = value parameter file")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", help="csv | json")
    common.add_argument("--precision", type=int, help="significant digits, 6..17")
    common.add_argument("--error-json", action="store_true",
                        help="print errors as JSON on stdout")

    parser = _Parser(prog="qubitmaps", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("steady", parents=[common], help="steady state per model")
    sw = sub.add_parser("sweep", parents=[common], help="steady states over an omega0 grid")
    sw.add_argument("--param")
    sw.add_argument("--from", dest="from_", type=float)
    sw.add_argument("--to", type=float)
    sw.add_argument("--steps", type=int)
    sw.add_argument("--spacing")
    ev = sub.add_parser("evolve", parents=[common], help="propagate an initial state")
    ev.add_argument("--t-max", dest="t_max", type=float)
    ev.add_argument("--samples", type=int)
    ev.add_argument("--rho0", help="initial Bloch vector x,y,z")
    th = sub.add_parser("threshold", parents=[common], help="omega0 where rho_pp turns negative")
    th.add_argument("--bracket", help="lo,hi (default 1,50)")
    th.add_argument("--golden", help="JSON file with omega0_star (and optional tol)")
    va = sub.add_parser("validate", parents=[common], help="run the self-check suite")
    va.add_argument("--tolerance", type=float, help="base check tolerance (default 1e-10)")
    return parser


def config_from_args(args) -> RunConfig:
    values = read_config_file(args.config) if args.config else {}
    for dest, key in _FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[key] = value
    return build_config(values)


def main(argv=None) -> int:
    error_json = argv is not None and "--error-json" in argv or \
        argv is None and "--error-json" in sys.argv[1:]

    def fail(code, exc):
        if error_json:
            print(json.dumps({"error": type(exc).__name__, "message": str(exc), "status": code}))
        else:
            print(f"qubitmaps: error: {exc}", file=sys.stderr)
        return code

    try:
        args = make_parser().parse_args(argv)
        cfg = config_from_args(args)
    except (UsageError, OSError) as exc:
        return fail(2, exc)
    try:
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        return fail(2, exc)
    except (ComputationFailed, QubitMapsError, ArithmeticError) as exc:
        return fail(1, exc)


if __name__ == "__main__":
    sys.exit(main())
