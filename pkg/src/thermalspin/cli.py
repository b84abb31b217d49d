"""Command-line frontend.

Every subcommand parses its flags, calls the library and prints or writes the
result.  ``--config FILE`` (YAML or JSON) supplies defaults whose keys are flag
names (``two-s`` or ``two_s``); explicit flags win, including over a config key
from the same mutually exclusive group (``--beta-a`` overrides ``xa``).

Exit status: 0 on success, 2 on usage errors (bad flags, out-of-range values,
unwritable destinations), 1 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml

from . import __version__
from .distill import project_extremal, top_level
from .entanglement import log_negativity
from .errors import ConsistencyError
from .evolve import apply_splitter_diagonal
from .experiments import (
    FIG3_TEMPERATURES,
    EmitError,
    SweepSpec,
    json_safe,
    compare_port_configs,
    emit,
    fig1,
    fig2,
    fig3,
    r2_grid,
    sweep_over_reflectivity,
    sweep_over_spin,
)
from .fock_core import SplitterParams, splitter_coefficient
from .states import SpinDim, ThermalSpec, product_input, thermal_diagonal

OUTDIR_ENV = "THERMALSPIN_OUTDIR"
PROG = "thermalspin"

# flags that cannot be combined; a flag given on the command line drops its
# siblings from the config
EXCLUSIVE = [("xa", "beta-a"), ("xb", "beta-b", "vac-b"), ("spins", "max-two-s")]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _unit(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"value {text} outside [0, 1]")
    return value


def _beta(text: str) -> float:
    value = float(text)
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"beta must be >= 0, got {text}")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="YAML/JSON file of flag defaults")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--two-s", type=_non_negative_int, required=True, help="truncation 2S")
    p.add_argument("--r2", type=_unit, required=True, help="reflectivity |R|^2")
    a = p.add_mutually_exclusive_group(required=True)
    a.add_argument("--xa", type=_unit, help="Boltzmann ratio of port A")
    a.add_argument("--beta-a", type=_beta, help="hbar*omega/kT of port A (x = exp(-beta))")
    b = p.add_mutually_exclusive_group(required=True)
    b.add_argument("--xb", type=_unit, help="Boltzmann ratio of port B")
    b.add_argument("--beta-b", type=_beta, help="hbar*omega/kT of port B")
    b.add_argument("--vac-b", action="store_true", help="vacuum on port B")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--workers", type=_positive_int, help="worker processes (default: CPU count)")


def _add_spin_grid(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--spins", type=_non_negative_int, nargs="+", metavar="2S")
    g.add_argument("--max-two-s", type=_non_negative_int, help="use 2S = 1..N")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description="Entanglement from truncated thermal states at a beam splitter.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeff", help="print the amplitude row f(m, n, 0..m+n)")
    _add_common(p)
    p.add_argument("--m", type=_non_negative_int, required=True)
    p.add_argument("--n", type=_non_negative_int, required=True)
    p.add_argument("--r2", type=_unit, required=True)
    p.add_argument("--literal", action="store_true", help="unnormalized m! n! prefactor (diagnostic)")

    for name, text in (("negativity", "log-negativity report"), ("distill", "extremal-projection outcome")):
        p = sub.add_parser(name, help=f"print the {text} as JSON")
        _add_common(p)
        _add_state_flags(p)

    p = sub.add_parser("sweep-s", help="sweep over 2S at fixed reflectivity")
    _add_common(p)
    _add_spin_grid(p)
    p.add_argument("--r2", type=_unit, default=0.5)
    p.add_argument("--xa", type=_unit, nargs="+", default=[1.0])
    b = p.add_mutually_exclusive_group()
    b.add_argument("--xb", type=_unit, nargs="+", help="port B ratios (default: same as port A)")
    b.add_argument("--vac-b", action="store_true")
    _add_output_flags(p)

    p = sub.add_parser("sweep-r", help="sweep over 2S and reflectivity")
    _add_common(p)
    _add_spin_grid(p)
    p.add_argument("--r2-step", type=float, default=0.01)
    p.add_argument("--xa", type=_unit, nargs="+", default=[1.0])
    b = p.add_mutually_exclusive_group()
    b.add_argument("--xb", type=_unit, nargs="+")
    b.add_argument("--vac-b", action="store_true")
    p.add_argument("--maxima-out", metavar="PATH", help="also write per-spin maxima here")
    _add_output_flags(p)

    p = sub.add_parser("compare-ports", help="vacuum on port B versus thermal on both")
    _add_common(p)
    _add_spin_grid(p)
    p.add_argument("--x", type=_unit, nargs="+", default=list(FIG3_TEMPERATURES))
    p.add_argument("--r2", type=_unit, default=0.5)
    _add_output_flags(p)

    for name, default_max in (("fig1", 24), ("fig2", 12), ("fig3", 24)):
        p = sub.add_parser(name, help=f"write {name}_*.csv reproduction data")
        _add_common(p)
        p.add_argument("--outdir", help=f"output directory (default: ${OUTDIR_ENV} or .)")
        p.add_argument("--max-two-s", type=_positive_int, default=default_max)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--workers", type=_positive_int)
        if name == "fig2":
            p.add_argument("--step", type=float, default=0.01)
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            if command in action.choices:
                return action.choices[command]
    raise UsageError(f"invalid choice: {command!r}")


def _config_tokens(sub: argparse.ArgumentParser, config: dict, given: set[str]) -> list[str]:
    options = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                options[opt[2:]] = action
    blocked = set(given)
    for group in EXCLUSIVE:
        if given & set(group):
            blocked |= set(group)
    tokens = []
    for raw_key, value in config.items():
        key = str(raw_key).replace("_", "-")
        if key not in options or key in ("config", "help"):
            raise UsageError(f"unknown config key {raw_key!r} for {sub.prog}")
        if key in blocked:
            continue
        action = options[key]
        if action.nargs == 0:
            if value:
                tokens.append(f"--{key}")
        elif isinstance(value, list):
            tokens += [f"--{key}", *map(str, value)]
        else:
            tokens += [f"--{key}", str(value)]
    return tokens


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"config {path} is not valid YAML/JSON") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must be a mapping of flag names to values")
    return data


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    argv = list(argv)
    commands = [i for i, tok in enumerate(argv) if not tok.startswith("-")]
    if not commands or "--config" not in argv[commands[0]:]:
        return parser.parse_args(argv)
    pos = commands[0]
    sub = _subparser(parser, argv[pos])
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv[pos + 1 :])
    given = {tok[2:].split("=")[0] for tok in argv[pos + 1 :] if tok.startswith("--")}
    tokens = _config_tokens(sub, _load_config(known.config), given)
    return parser.parse_args(argv[: pos + 1] + tokens + argv[pos + 1 :])


def _port_x(args, port: str) -> float:
    x = getattr(args, f"x{port}")
    beta = getattr(args, f"beta_{port}")
    if port == "b" and args.vac_b:
        return 0.0
    return math.exp(-beta) if beta is not None else x


def _print_json(data) -> None:
    print(json.dumps(_json_tree(data), indent=2))


def _json_tree(data):
    if isinstance(data, dict):
        return {k: _json_tree(v) for k, v in data.items()}
    return json_safe(data)


def _spins(args) -> tuple[int, ...]:
    return tuple(args.spins) if args.spins is not None else tuple(range(1, args.max_two_s + 1))


def _emit(records, args) -> None:
    if args.out:
        emit(records, args.format, args.out)
    else:
        emit(records, args.format, sys.stdout)


def run(args: argparse.Namespace) -> None:
    cmd = args.command
    if cmd == "coeff":
        params = SplitterParams(args.r2)
        row = [splitter_coefficient(args.m, args.n, M, params, literal=args.literal) for M in range(args.m + args.n + 1)]
        print(json.dumps(json_safe(row)))
    elif cmd in ("negativity", "distill"):
        spin = SpinDim(args.two_s)
        x_a, x_b = _port_x(args, "a"), _port_x(args, "b")
        rho = apply_splitter_diagonal(
            product_input(thermal_diagonal(ThermalSpec(spin, x_a)), thermal_diagonal(ThermalSpec(spin, x_b))),
            SplitterParams(args.r2),
        )
        report = log_negativity(rho).to_dict()
        if cmd == "negativity":
            _print_json(report)
        else:
            outcome = project_extremal(rho, spin, top_level(spin, x_a, x_b))
            _print_json({"negativity": report, "distill": outcome.to_dict()})
    elif cmd == "sweep-s":
        spec = SweepSpec(_spins(args), (args.r2,), tuple(args.xa), tuple(args.xb) if args.xb else None, args.vac_b)
        _emit(sweep_over_spin(spec, args.workers), args)
    elif cmd == "sweep-r":
        try:
            grid = r2_grid(args.r2_step)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        spec = SweepSpec(_spins(args), grid, tuple(args.xa), tuple(args.xb) if args.xb else None, args.vac_b)
        records, peaks = sweep_over_reflectivity(spec, args.workers)
        _emit(records, args)
        if args.maxima_out:
            emit(peaks, args.format, args.maxima_out)
    elif cmd == "compare-ports":
        _emit(compare_port_configs(_spins(args), args.x, args.r2, args.workers), args)
    elif cmd in ("fig1", "fig2", "fig3"):
        outdir = Path(args.outdir or os.environ.get(OUTDIR_ENV) or ".")
        try:
            outdir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise EmitError(f"cannot create {outdir}: {exc.strerror or exc}") from exc
        kwargs = {"max_two_s": args.max_two_s, "workers": args.workers, "fmt": args.format}
        if cmd == "fig2":
            try:
                r2_grid(args.step)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            kwargs["step"] = args.step
        for path in {"fig1": fig1, "fig2": fig2, "fig3": fig3}[cmd](outdir, **kwargs):
            print(path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        run(args)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except EmitError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"{PROG}: internal consistency failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    return 0
