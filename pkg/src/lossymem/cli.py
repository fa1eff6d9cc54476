"""Command-line entry point.

Examples::

    lossymem spectrum --epsilon 0.3 --eta 0.7 --samples 512
    lossymem eigs --epsilon 0.3 --eta 0.7 --n 20 --setup AB
    lossymem capacity-classical --epsilon 0 --eta 0.6 --photons 8
    lossymem sweep --which classical --photons 8 --step 0.05 --output fig2a.csv
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .allocation import is_infinite
from .capacity import (
    WHICH,
    capacity_grid,
    classical_capacity,
    classical_capacity_bounds,
    quantum_capacity,
    quantum_capacity_unconstrained,
)
from .errors import ConvergenceError
from .gaussian import verify_equivalence
from .model import ChannelParams, Setup, memory_matrix
from .spectral import TWO_PI, diagonalize, quantile_deviation, symbol_tau

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own status for unknown flags / malformed values
EXIT_INVALID = 3
EXIT_OUTPUT = 4
EXIT_CONVERGENCE = 5
EXIT_VERIFY_FAILED = 6

DEFAULT_FORMAT = {
    "spectrum": "csv", "eigs": "csv", "capacity-classical": "json", "capacity-quantum": "json",
    "bounds": "csv", "verify": "json", "sweep": "csv",
}


@dataclass
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "csv"


def _fmt(value):
    """Shortest round-trip text for floats; ``inf`` for divergent rates."""
    if value is None:
        return ""
    if is_infinite(value):
        return "inf"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if is_infinite(value):
        return "inf"
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def render(config: RunConfig, header: list[str], rows: list[list], extra: dict | None = None) -> str:
    if config.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    payload = {
        "command": config.subcommand,
        "parameters": config.parameters,
        "columns": header,
        "rows": rows,
    }
    if extra:
        payload.update(extra)
    return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"


# --- validation -------------------------------------------------------------

def _unit(name, value):
    if value is None or not 0.0 <= value <= 1.0:
        raise ValueError(f"--{name} must lie in [0, 1], got {value}")


def _positive(name, value, integer=False):
    if value is None or not value > 0 or (not integer and not math.isfinite(value)):
        raise ValueError(f"--{name} must be positive, got {value}")


def validate(config: RunConfig) -> None:
    p = config.parameters
    cmd = config.subcommand
    if cmd != "sweep":
        _unit("epsilon", p["epsilon"])
        _unit("eta", p["eta"])
    if cmd in ("capacity-classical", "bounds") or (cmd == "capacity-quantum" and not p.get("unconstrained")):
        _positive("photons", p.get("photons"))
    if cmd == "sweep" and p["which"] != "quantum-unconstrained":
        _positive("photons", p.get("photons"))
    if cmd in ("eigs", "verify"):
        _positive("n", p["n"], integer=True)
    if cmd == "spectrum" and p["samples"] < 2:
        raise ValueError(f"--samples must be at least 2, got {p['samples']}")
    if cmd == "bounds":
        for j in p["J"]:
            _positive("J", j, integer=True)
    if cmd == "verify":
        if p["setup"] not in ("EE", "AB"):
            raise ValueError("verify supports --setup EE or AB only")
        _positive("trials", p["trials"], integer=True)
    if cmd == "sweep":
        step = p["step"]
        _positive("step", step)
        if step > 1 or abs(round(1.0 / step) * step - 1.0) > 1e-9:
            raise ValueError(f"--step must divide 1 evenly, got {step}")
    if "tol" in p:
        _positive("tol", p["tol"])


# --- subcommands --------------------------------------------------------------

def _spectrum(config):
    p = config.parameters
    z = np.linspace(0.0, TWO_PI, p["samples"])
    tau = symbol_tau(p["epsilon"], p["eta"], z)
    return render(config, ["z", "tau"], [[float(a), float(b)] for a, b in zip(z, tau)])


def _eigs(config):
    p = config.parameters
    params = ChannelParams(p["epsilon"], p["eta"], p["n"], p["setup"])
    taus = diagonalize(memory_matrix(params)).taus
    rows = [[k, float(t)] for k, t in enumerate(taus, start=1)]
    dev, outliers = quantile_deviation(taus, p["epsilon"], p["eta"])
    extra = {"quantile_deviation": dev, "outliers": [float(o) for o in outliers]}
    return render(config, ["k", "tau_k"], rows, extra)


def _result_row(res):
    m = res.meta
    return [res.kind.value, m["epsilon"], m["eta"], m.get("N"), res.value, res.lagrange]


_RESULT_HEADER = ["kind", "epsilon", "eta", "N", "value", "lagrange"]


def _capacity_classical(config):
    p = config.parameters
    res = classical_capacity(p["epsilon"], p["eta"], p["photons"], tol=p["tol"])
    return render(config, _RESULT_HEADER, [_result_row(res)], {"value": res.value})


def _capacity_quantum(config):
    p = config.parameters
    if p["unconstrained"]:
        res = quantum_capacity_unconstrained(p["epsilon"], p["eta"], tol=p["tol"])
    else:
        res = quantum_capacity(p["epsilon"], p["eta"], p["photons"], tol=p["tol"])
    return render(config, _RESULT_HEADER, [_result_row(res)], {"value": res.value})


def _bounds(config):
    p = config.parameters
    rows = []
    for j in p["J"]:
        lower, upper = classical_capacity_bounds(p["epsilon"], p["eta"], p["photons"], j, tol=p["tol"])
        rows.append([j, lower.value, upper.value, upper.value - lower.value])
    return render(config, ["J", "lower", "upper", "gap"], rows)


def _verify(config):
    p = config.parameters
    params = ChannelParams(p["epsilon"], p["eta"], p["n"], p["setup"])
    dev = verify_equivalence(params, trials=p["trials"], seed=p["seed"])
    passed = dev < p["tol"]
    text = render(config, ["setup", "n", "trials", "seed", "deviation", "passed"],
                  [[p["setup"], p["n"], p["trials"], p["seed"], dev, passed]],
                  {"deviation": dev, "passed": passed})
    return text, (EXIT_OK if passed else EXIT_VERIFY_FAILED)


def _sweep(config):
    p = config.parameters
    steps = int(round(1.0 / p["step"]))
    grid = [k / steps for k in range(steps + 1)]
    points = capacity_grid(grid, grid, which=p["which"], n_photons=p["photons"] or 1.0,
                           tol=p["tol"], workers=p["workers"])
    rows = []
    for pt in points:
        res = pt.result
        rows.append([pt.epsilon, pt.eta, None if res is None else res.value,
                     None if res is None else res.lagrange, pt.error])
    return render(config, ["epsilon", "eta", "value", "lagrange", "error"], rows)


HANDLERS = {
    "spectrum": _spectrum, "eigs": _eigs, "capacity-classical": _capacity_classical,
    "capacity-quantum": _capacity_quantum, "bounds": _bounds, "verify": _verify, "sweep": _sweep,
}


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Validate, compute, and write one subcommand's output; return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        validate(config)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    try:
        out = HANDLERS[config.subcommand](config)
    except ConvergenceError as exc:
        print(f"error: no convergence: {exc}", file=stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    text, status = out if isinstance(out, tuple) else (out, EXIT_OK)
    if config.output in (None, "-"):
        stdout.write(text)
    else:
        try:
            Path(config.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"error: cannot write {config.output}: {exc.strerror or exc}", file=stderr)
            return EXIT_OUTPUT
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lossymem", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, channel=True):
        if channel:
            sp.add_argument("--epsilon", type=float, required=True, help="memory transmissivity")
            sp.add_argument("--eta", type=float, required=True, help="signal transmissivity")
        sp.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)

    sp = sub.add_parser("spectrum", help="sample the asymptotic transmissivity curve tau(z)")
    common(sp)
    sp.add_argument("--samples", type=int, default=512)

    sp = sub.add_parser("eigs", help="effective transmissivities at finite n")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--setup", choices=[s.value for s in Setup], default="EE")

    sp = sub.add_parser("capacity-classical", help="classical capacity C")
    common(sp)
    sp.add_argument("--photons", "-N", type=float, required=True, help="mean photon number per mode")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("capacity-quantum", help="quantum capacity Q, or Q_inf with --unconstrained")
    common(sp)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--photons", "-N", type=float)
    group.add_argument("--unconstrained", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("bounds", help="block lower/upper bounds on C")
    common(sp)
    sp.add_argument("--photons", "-N", type=float, required=True)
    sp.add_argument("--J", type=int, nargs="+", default=[1, 8, 64])
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("verify", help="check the unraveling on random Gaussian inputs")
    common(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--setup", choices=("EE", "AB"), default="EE")
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-10)

    sp = sub.add_parser("sweep", help="capacity on a square (epsilon, eta) grid")
    common(sp, channel=False)
    sp.add_argument("--which", choices=WHICH, default="classical")
    sp.add_argument("--photons", "-N", type=float, default=None)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--tol", type=float, default=1e-9)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in ("subcommand", "output", "format")}
    if args.subcommand == "sweep" and params["photons"] is None and params["which"] != "quantum-unconstrained":
        params["photons"] = 8.0
    fmt = args.format or DEFAULT_FORMAT[args.subcommand]
    return RunConfig(args.subcommand, params, args.output, fmt)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    raise SystemExit(main())
