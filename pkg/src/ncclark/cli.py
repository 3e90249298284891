"""``ncclark`` command line.

Every subcommand writes one JSON report (or a CSV table with
``--format csv`` where a table exists) and exits with 0 when all residuals
are within tolerance, 2 when a verdict is inconclusive and 1 on failures or
errors. Errors are reported as JSON on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import checks as C
from .builtins import GRAMMAR, expected_quasi_extreme, parse_builtin, parse_complex, parse_vector
from .gns import complex_matrix_csv
from .hbspace import sample_points
from .reports import SCHEMA_VERSION, Report
from .series import Multiplier, TruncatedSeries, _check_unimodular
from .states import MomentState


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which means "inconclusive" here
        raise CliError(message)


# input loading


def load_multiplier(args) -> Multiplier:
    if args.builtin and args.multiplier:
        raise CliError("give either --builtin or --multiplier, not both")
    if args.builtin:
        return parse_builtin(args.builtin, args.d, args.N)
    if args.multiplier:
        data = _read_json(args.multiplier)
        series = TruncatedSeries.from_json(data)
        if args.d is not None and args.d != series.d:
            raise CliError(f"multiplier file has d={series.d}, but --d {args.d} was given")
        return Multiplier(series, data.get("label"))
    raise CliError("a multiplier is required: --builtin SPEC or --multiplier FILE")


def load_state(args, degree: int) -> MomentState:
    """State from ``--state FILE`` or ``mu_alpha`` of the multiplier (first ``--alpha``)."""
    if getattr(args, "state", None):
        mu = MomentState.from_json(_read_json(args.state))
        if mu.N < degree:
            raise CliError(f"state known to degree {mu.N}, degree {degree} needed")
        return mu
    b = load_multiplier(args)
    return C.ac_state(b, _alphas(args)[0], degree)


def _read_json(path: str):
    p = Path(path)
    if not p.exists():
        raise CliError(f"file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON ({exc})") from exc


def _alphas(args) -> list[complex]:
    raw = args.alpha or ["1"]
    out = []
    for a in raw:
        v = parse_complex(a)
        _check_unimodular(v)
        out.append(v)
    return out


def _zetas(args, b: Multiplier) -> list[np.ndarray]:
    if not args.zeta:
        return C.default_zetas(b)
    out = []
    for z in args.zeta:
        v = parse_vector(z)
        if len(v) != b.d:
            raise CliError(f"zeta {z!r} has dimension {len(v)}, expected {b.d}")
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise CliError(f"zeta {z!r} is not on the unit sphere")
        out.append(v)
    return out


def _points(args, d: int, radius: Optional[float] = None) -> np.ndarray:
    return sample_points(d, args.points, args.radius if radius is None else radius, args.seed)


def _load_bj(path: str, d: int):
    data = _read_json(path)
    try:
        series = [TruncatedSeries.from_json(s) for s in data["bj"]]
        norms = [float(x) for x in data["normSq"]]
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path}: expected {{'bj': [series...], 'normSq': [...]}}") from exc
    if len(series) != d:
        raise CliError(f"{path}: {len(series)} tables for d={d}")
    return series, norms


def _gleason_data(args, b: Multiplier):
    if getattr(args, "bj", None):
        series, norms = _load_bj(args.bj, b.d)
        return C.gleason_data(b, bj=series, bj_norm_sq=norms)
    return C.gleason_data(b, max_degree=args.max_degree)


# subcommands


def cmd_moments(args) -> Report:
    return C.moments_check(load_multiplier(args), _alphas(args)[0], args.N)


def cmd_gram(args) -> Report:
    return C.gram_check(load_state(args, 2 * args.N), args.N)


def cmd_quasiextreme(args) -> Report:
    expect = None
    if args.builtin:
        expect = expected_quasi_extreme(load_multiplier(args).label)
    return C.quasiextreme_check(load_state(args, 2 * args.N), args.N, expect)


def cmd_gns(args) -> Report:
    return C.gns_check(load_state(args, 2 * args.N), args.N)


def cmd_extend(args) -> Report:
    degree = max(2 * args.N, 2 * args.max_len)
    return C.extend_check(load_state(args, degree), args.max_len, args.N)


def cmd_fantappie(args) -> Report:
    b = load_multiplier(args)
    return C.fantappie_check(b, _alphas(args), _points(args, b.d), args.radius)


def cmd_gleason(args) -> Report:
    b = load_multiplier(args)
    g = _gleason_data(args, b)
    return C.gleason_check(b, _points(args, b.d), g, seed=args.seed)


def cmd_clark(args) -> Report:
    b = load_multiplier(args)
    alphas = _alphas(args) if args.alpha else list(C.DEFAULT_ALPHAS)
    return C.clark_check(_gleason_data(args, b), alphas, _points(args, b.d))


def cmd_boundary(args) -> Report:
    b = load_multiplier(args)
    g = _gleason_data(args, b) if args.bj else None
    return C.boundary_check(b, _zetas(args, b), _alphas(args), g, _points(args, b.d), args.max_degree)


def cmd_disintegrate(args) -> Report:
    b = load_multiplier(args)
    return C.disintegrate_check(b, _points(args, b.d), args.nodes)


def cmd_resolvent(args) -> Report:
    b = load_multiplier(args)
    return C.resolvent_check(_gleason_data(args, b), _points(args, b.d, min(args.radius, 0.6)))


def cmd_oracle(args) -> Report:
    return C.oracle_check(args.d or 2, args.max_len, args.max_degree)


def cmd_suite(args) -> Report:
    b = load_multiplier(args)
    alphas = _alphas(args) if args.alpha else list(C.DEFAULT_ALPHAS)
    zetas = _zetas(args, b) if args.zeta else None
    return C.suite(b, args.N, args.points, args.seed, args.max_len, alphas, zetas)


# CSV exports


def report_csv(rep: Report) -> str:
    if hasattr(rep, "_table"):
        mu = rep._table
        rows = ["index,re,im"]
        rows += [f"{' '.join(map(str, n))},{float(v.real)!r},{float(v.imag)!r}" for n, v in zip(mu.basis.exps, mu.moments)]
        return "\n".join(rows) + "\n"
    if hasattr(rep, "_matrix"):
        return complex_matrix_csv(rep._matrix)
    if hasattr(rep, "_curve"):
        degrees, curve = rep._curve
        return "N,distanceSq\n" + "".join(f"{n},{c!r}\n" for n, c in zip(degrees, curve))
    if hasattr(rep, "_schedules"):
        rows = ["zetaIndex,radius,value,tailBound"]
        for zi, ang in rep._schedules:
            rows += [f"{zi},{line}" for line in ang.csv().splitlines()[1:]]
        return "\n".join(rows) + "\n"
    raise CliError(f"no CSV export for check {rep.check!r}; use --format json")


COMMANDS = {
    "moments": (cmd_moments, "moment table of mu_alpha"),
    "gram": (cmd_gram, "GNS Gram matrix and its positivity"),
    "quasiextreme": (cmd_quasiextreme, "distance curve of [I] over N"),
    "gns": (cmd_gns, "GNS tuple, coisometry defect and vector state"),
    "extend": (cmd_extend, "extension to words and its consistency"),
    "fantappie": (cmd_fantappie, "unitarity of the Fantappie transform on samples"),
    "gleason": (cmd_gleason, "Gleason solution b_j and its residuals"),
    "clark": (cmd_clark, "Clark intertwining per alpha"),
    "boundary": (cmd_boundary, "angular derivative and eigenvalue check per zeta and alpha"),
    "disintegrate": (cmd_disintegrate, "average of mu_alpha over the circle"),
    "resolvent": (cmd_resolvent, "functional model kernel via the Neumann series"),
    "oracle": (cmd_oracle, "symbolic products against Fock matrices"),
    "suite": (cmd_suite, "every applicable check for one multiplier"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_argument_group("input")
    src.add_argument("--builtin", help="builtin multiplier, see the grammar below")
    src.add_argument("--multiplier", metavar="FILE", help='JSON table {"d", "N", "coeffs"}')
    src.add_argument("--state", metavar="FILE", help="JSON moment state (gram, quasiextreme, gns, extend)")
    src.add_argument("--bj", metavar="FILE", help='explicit Gleason data {"bj": [...], "normSq": [...]}')
    src.add_argument("--d", type=int, help="dimension")
    src.add_argument("--N", type=int, default=8, help="truncation degree (default 8)")
    src.add_argument("--max-len", type=int, default=5, help="word length for extend and oracle (default 5)")
    src.add_argument("--max-degree", type=int, default=6, help="largest projection degree searched (default 6)")
    src.add_argument("--alpha", action="append", help="unimodular alpha, repeatable, e.g. 1, 1j, -1")
    src.add_argument("--zeta", action="append", help="sphere point c1,c2,..., repeatable")
    src.add_argument("--points", type=int, default=12, help="number of sample points (default 12)")
    src.add_argument("--radius", type=float, default=0.5, help="sample radius (default 0.5)")
    src.add_argument("--nodes", type=int, default=512, help="quadrature nodes (default 512)")
    src.add_argument("--seed", type=int, default=0)
    out = common.add_argument_group("output")
    out.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")
    out.add_argument("--format", choices=("json", "csv"), default="json")

    parser = _Parser(
        prog="ncclark",
        description="Finite-degree checks for Aleksandrov-Clark states on the Drury-Arveson space.",
        epilog="builtin grammar:\n" + GRAMMAR + "\nexit codes: 0 ok, 2 inconclusive, 1 failure or error",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"ncclark {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext, description=helptext,
                       epilog="builtin grammar:\n" + GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def _validate(args) -> None:
    if args.N < 1:
        raise CliError("--N must be >= 1")
    if args.points < 1:
        raise CliError("--points must be >= 1")
    if not 0 < args.radius <= 0.6:
        raise CliError("--radius must lie in (0, 0.6]")
    if args.max_len < 1 or args.max_degree < 1 or args.nodes < 1:
        raise CliError("--max-len, --max-degree and --nodes must be >= 1")
    if args.d is not None and args.d < 1:
        raise CliError("--d must be >= 1")


def _emit_error(exc: BaseException) -> int:
    payload = {"schemaVersion": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc)}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliError("a subcommand is required; see --help")
        _validate(args)
        rep = COMMANDS[args.command][0](args)
        text = report_csv(rep) if args.format == "csv" else rep.dumps()
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except Exception as exc:
        return _emit_error(exc)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return rep.exit_code()


if __name__ == "__main__":
    sys.exit(main())
