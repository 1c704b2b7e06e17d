"""Command-line front end.

    unionbound bounds --model hailperin,yat --in inst.json
    unionbound bench --n 4,5,6 --count 100 --seed 1 --format markdown
    unionbound generate --n 5 --seed 3 --out inst.json

Exit codes: 0 success, 2 when a model reports ``prob_infeasible``, 1 on
usage errors, unreadable files, malformed JSON or unknown model tags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .bench import DEFAULT_ZERO_FRAC, MODELS, emit_report, parse_models, run_benchmark, solve_models
from .hailperin import PROB_INFEASIBLE
from .model import Instance, generate_instance
from .yat import DEFAULT_MAX_ROUNDS, DEFAULT_W_SIZE, write_cut_log

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for prob_infeasible here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _cut_options(p):
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS,
                   help="separation rounds per sense for qpbm")
    p.add_argument("--batch", type=int, default=1, help="cuts added per qpbm round")
    p.add_argument("--w-size", type=int, default=DEFAULT_W_SIZE,
                   help="largest literal set in the qpbm cut family")


def _check_cut_options(args):
    if args.max_rounds < 0:
        raise UsageError("--max-rounds must be nonnegative")
    if args.batch < 1:
        raise UsageError("--batch must be at least 1")
    if args.w_size < 4:
        raise UsageError("--w-size must be at least 4")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="unionbound", description="Bounds on the probability of a union of events "
                "from single and pairwise intersection probabilities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("bounds", help="bounds for one instance file")
    b.add_argument("--model", default="hailperin", help=f"comma-separated tags from {','.join(MODELS)}")
    b.add_argument("--in", dest="inp", required=True, help="instance JSON (1-based indices)")
    b.add_argument("--out", help="write result lines here instead of stdout")
    b.add_argument("--mode", choices=("float", "exact"), default="float",
                   help="arithmetic for hailperin, bm, pg, ipg (yat and qpbm are float only)")
    _cut_options(b)
    b.add_argument("--cut-log", help="CSV of the cuts accepted by qpbm")

    r = sub.add_parser("bench", help="seeded batch with relative-error report")
    r.add_argument("--n", type=_int_list, required=True, help="comma-separated sizes")
    r.add_argument("--count", type=int, default=100)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--model", default=",".join(MODELS))
    r.add_argument("--zero-frac", type=float, default=DEFAULT_ZERO_FRAC,
                   help="fraction of atoms forced to zero mass")
    r.add_argument("--mode", choices=("float", "exact"), default="float")
    _cut_options(r)
    r.add_argument("--format", choices=("csv", "markdown"), default="csv")
    r.add_argument("--out")

    g = sub.add_parser("generate", help="write a seeded consistent instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--zero-frac", type=float, default=DEFAULT_ZERO_FRAC)
    g.add_argument("--out")
    return p


def _write(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_instance(path: str) -> Instance:
    try:
        with open(path) as fh:
            return Instance.from_json(json.load(fh))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e.msg} at line {e.lineno})") from None
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path}: not a valid instance ({e})") from None


def run_bounds(args) -> int:
    try:
        models = parse_models(args.model)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not models:
        raise UsageError("no model selected")
    _check_cut_options(args)
    inst = _load_instance(args.inp)
    results, run = solve_models(inst, models, args.mode, args.max_rounds, args.batch, args.w_size)
    _write("".join(results[t].dumps() + "\n" for t in models), args.out)
    if args.cut_log and run is not None:
        with open(args.cut_log, "w") as fh:
            write_cut_log(run.cuts, fh)
    return EXIT_INFEASIBLE if any(r.status == PROB_INFEASIBLE for r in results.values()) else EXIT_OK


def run_bench(args) -> int:
    if args.count < 0:
        raise UsageError("--count must be nonnegative")
    _check_cut_options(args)
    try:
        table = run_benchmark(args.n, args.count, args.seed, args.model, args.zero_frac,
                              args.mode, args.max_rounds, args.batch, args.w_size)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(emit_report(table, args.format), args.out)
    return EXIT_OK


def run_generate(args) -> int:
    try:
        inst = generate_instance(args.n, args.seed, args.zero_frac)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _write(inst.dumps() + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        handler = {"bounds": run_bounds, "bench": run_bench, "generate": run_generate}[args.command]
        return handler(args)
    except UsageError as e:
        print(f"unionbound: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
