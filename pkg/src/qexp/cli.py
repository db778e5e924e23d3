"""Command line front end: ``qexp <subcommand> [--flags]``.

Exit codes: 0 ok, 1 domain or usage error, 2 verification failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import records
from .base import BasePair, new_base, reference_base, solve_base
from .cylinders import level_partition
from .density import DEFAULT_DEPTH, invariant_densities
from .errors import ConsistencyError, QexpError
from .ergodic import (
    SampleReport,
    birkhoff_averages,
    chebyshev_gap,
    count_expansions,
    mixing_correlation,
    uniforms,
    univoque_profile,
)
from .maps import expansion
from .stepfn import StepFunction
from .transfer import FPOperator, iterate

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which here means "verification failed"
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    q0: float | None
    q1: float | None
    fmt: str
    output: str | None


def _float_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return a, b


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qexp", description=__doc__.splitlines()[0], allow_abbrev=False)
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp, default_fmt="csv"):
        sp.add_argument("--q0", type=float)
        sp.add_argument("--q1", type=float)
        sp.add_argument("--format", dest="fmt", choices=("csv", "json", "table"), default=default_fmt)
        sp.add_argument("--output", help="write here instead of stdout")
        return sp

    common(sub.add_parser("base", help="validate a base pair and print its constants"), "json")

    sp = common(sub.add_parser("expand", help="greedy or lazy orbit and digits of x"))
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--kind", choices=("greedy", "lazy"), default="greedy")

    sp = common(sub.add_parser("density", help="normalized invariant density as pieces"))
    sp.add_argument("--kind", choices=("greedy", "lazy"), default="greedy")
    sp.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    sp.add_argument("--csv", action="store_true", help="same as --format csv")
    sp.add_argument("--figure1", action="store_true", help="greedy density at the reference base, support only")
    sp.add_argument("--gnuplot", help="also write a two-column step data file here")

    sp = common(sub.add_parser("transfer", help="iterate the transfer operator from the uniform density"))
    sp.add_argument("--kind", choices=("greedy", "lazy"), default="greedy")
    sp.add_argument("--n", type=int, default=60)

    sp = common(sub.add_parser("partition", help="cylinder intervals of one level"))
    sp.add_argument("--level", type=int, default=3)
    sp.add_argument("--kind", choices=("greedy", "lazy"), default="greedy")

    sp = common(sub.add_parser("ergodic", help="Monte Carlo and orbit statistics"))
    sp.add_argument("--stat", choices=("birkhoff", "gap", "univoque", "mixing", "count"), required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--depth", type=_int_list, default=[64], help="orbit length, word depth, or a list for univoque")
    sp.add_argument("--kind", choices=("greedy", "lazy"), default="greedy")
    sp.add_argument("--x", type=float, help="starting point for --stat count")
    sp.add_argument("--set-a", type=_float_pair, help="interval A as lo,hi for --stat mixing")
    sp.add_argument("--set-b", type=_float_pair, help="interval B as lo,hi for --stat mixing")

    sp = common(sub.add_parser("solve-base", help="base whose critical points have the given expansions"), "json")
    sp.add_argument("--greedy-word", required=True, help="greedy digits of r before the tail")
    sp.add_argument("--lazy-word", required=True, help="lazy digits of ell before the tail")
    sp.add_argument("--greedy-tail", choices=("zeros", "ones"), default="zeros")
    sp.add_argument("--lazy-tail", choices=("zeros", "ones"), default="ones")

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--profile", choices=("desk", "ci"), default="desk")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", dest="fmt", choices=("csv", "json", "table"), default="table")
    sp.add_argument("--output")
    return p


def _base(args) -> BasePair:
    if args.q0 is None or args.q1 is None:
        raise UsageError("--q0 and --q1 are required")
    return new_base(args.q0, args.q1)


# -- subcommands --------------------------------------------------------------------


def cmd_base(args):
    return "base", [_base(args).as_dict()]


def cmd_solve_base(args):
    Q = solve_base(args.greedy_word, args.lazy_word, args.greedy_tail, args.lazy_tail)
    return "base", [Q.as_dict()]


def cmd_expand(args):
    Q = _base(args)
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    orb = expansion(Q, args.x, args.n, args.kind)
    rows = [
        {"step": k, "x": x, "digit": orb.digits[k] if k < len(orb.digits) else None}
        for k, x in enumerate(orb.points)
    ]
    return "expansion", rows


def stepfn_rows(f: StepFunction, support_only: bool = False) -> list[dict]:
    pieces = f.support_pieces() if support_only else list(f.pieces())
    return [{"piece_index": i, "left": a, "right": b, "value": v} for i, (a, b, v) in enumerate(pieces)]


def cmd_density(args):
    if args.figure1:
        if args.q0 is not None or args.q1 is not None:
            print("note: --figure1 uses the solved reference base", file=sys.stderr)
        Q, kind = reference_base(), "greedy"
    else:
        Q, kind = _base(args), args.kind
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")
    h = invariant_densities(Q, args.depth).density(kind)
    if args.gnuplot:
        with open(args.gnuplot, "w") as fh:
            for a, b, v in h.pieces():
                fh.write("%.17g %.17g\n%.17g %.17g\n\n" % (a, v, b, v))
    return "stepfn", stepfn_rows(h, support_only=args.figure1)


def cmd_transfer(args):
    Q = _base(args)
    f0 = StepFunction.constant(Q.right, 1.0 / Q.right)
    res = iterate(FPOperator(Q, args.kind), f0, args.n, stop_early=False)
    keys = ("n", "l1_increment", "breakpoint_count", "mass_outside_support")
    return "transfer", [dict(zip(keys, row)) for row in res.rows()]


def cmd_partition(args):
    Q = _base(args)
    rows = [
        {
            "word": c.word_str,
            "left": c.domain.lo,
            "right": c.domain.hi,
            "image_right": c.image.hi,
            "weight": c.weight,
        }
        for c in level_partition(Q, args.level, args.kind)
    ]
    return "partition", rows


def _report(Q, statistic, depth, n, seed, mean, stderr):
    return SampleReport(Q, n, depth, seed, statistic, mean, stderr).as_row()


def cmd_ergodic(args):
    Q = _base(args)
    depth = args.depth[0]
    n, seed = args.samples, args.seed
    if args.stat == "birkhoff":
        xs = uniforms(seed, n, 0.0, Q.right)
        avgs = birkhoff_averages(Q, xs, depth, args.kind)
        se = float(avgs.std(ddof=1) / n**0.5) if n > 1 else 0.0
        rows = [_report(Q, f"birkhoff_{args.kind}", depth, n, seed, float(avgs.mean()), se)]
    elif args.stat == "gap":
        g = chebyshev_gap(Q, invariant_densities(Q, depth))
        rows = [
            _report(Q, name, depth, 0, seed, v, 0.0)
            for name, v in (("mean_greedy", g.mean_greedy), ("midpoint", g.midpoint), ("mean_lazy", g.mean_lazy))
        ]
    elif args.stat == "univoque":
        rows = [r.as_row() for r in univoque_profile(Q, args.depth, n, seed)]
    elif args.stat == "mixing":
        d = invariant_densities(Q)
        lo, hi = FPOperator(Q, args.kind).support
        A = args.set_a or (lo, lo + 0.5 * (hi - lo))
        B = args.set_b or A
        series = mixing_correlation(Q, d, A, B, depth, n, seed, args.kind)
        rows = [
            _report(Q, "mixing_correlation", k, n, seed, float(v), float(s))
            for k, (v, s) in enumerate(zip(series.values, series.stderr))
        ]
    else:
        if args.x is None:
            raise UsageError("--stat count needs --x")
        rows = [_report(Q, "expansion_count", depth, 1, seed, float(count_expansions(Q, args.x, depth)), 0.0)]
    return "report", rows


def cmd_verify(args):
    from .verify import run_all

    results = run_all(args.profile, args.seed)
    rows = [
        {"number": r.number, "name": r.name, "passed": r.passed, "seconds": r.seconds, "detail": r.detail}
        for r in results
    ]
    if args.fmt == "table":
        text = "".join(r.line() + "\n" for r in results)
    else:
        text = records.emit("verify", rows, args.fmt)
    return text, all(r.passed for r in results)


COMMANDS = {
    "base": cmd_base,
    "solve-base": cmd_solve_base,
    "expand": cmd_expand,
    "density": cmd_density,
    "transfer": cmd_transfer,
    "partition": cmd_partition,
    "ergodic": cmd_ergodic,
}


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def dispatch(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.subcommand == "density" and args.csv:
            args.fmt = "csv"
        config = RunConfig(args.subcommand, getattr(args, "q0", None), getattr(args, "q1", None), args.fmt, args.output)
        if config.subcommand == "verify":
            text, ok = cmd_verify(args)
            _write(text, config.output)
            if not ok:
                raise VerificationFailed("one or more acceptance checks failed")
            return EXIT_OK
        schema, rows = COMMANDS[config.subcommand](args)
        _write(records.emit(schema, rows, config.fmt), config.output)
        return EXIT_OK
    except (VerificationFailed, ConsistencyError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (QexpError, UsageError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
