"""Command line: ``gcmu solve|check|gen|bench``.

Exit codes: 10 satisfiable (or the model check holds), 20 unsatisfiable (or
it fails), 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from gcmu import formula as fm
from gcmu.bench import (FAMILIES, ParameterError, gen_counter, gen_early, gen_early_gc,
                        gen_init, gen_random, run_bench, write_csv)
from gcmu.model import KripkeStructure, ModelFormatError, mc_eval
from gcmu.parser import parse
from gcmu.propagation import dump_tsv
from gcmu.solver import ORDERS, BudgetExceeded, SolverConfig, dump_graph, parse_policy, solve

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _emit(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _policy(text: str) -> str:
    try:
        parse_policy(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None
    return text


def _int_range(text: str) -> list[int]:
    """``"3"``, ``"1-8"`` or ``"1,2,5"``."""
    out = []
    try:
        for part in filter(None, text.split(",")):
            lo, sep, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    return out


def cmd_solve(args) -> int:
    phi = parse(_read(args.formula))
    if args.serial:
        phi = fm.And(phi, fm.AG_(fm.EX_(fm.Top())))
    cfg = SolverConfig(order=args.order, policy=args.propagate, principals=args.principals,
                       simplify=not args.no_simplify, timeout=args.timeout,
                       max_expansions=args.max_expansions,
                       extract_model=bool(args.model or args.model_dot),
                       final_A=args.dump_propagation is not None)
    out = solve(phi, cfg)
    if args.dump_closure is not None:
        _emit(args.dump_closure, out.closure.dump())
    if args.dump_graph is not None:
        _emit(args.dump_graph, dump_graph(out))
    if args.dump_propagation is not None:
        _emit(args.dump_propagation, dump_tsv(out.graph, out.result))
    if out.model is not None:
        if args.model:
            _emit(args.model, out.model.dumps() + "\n")
        if args.model_dot:
            _emit(args.model_dot, out.model.to_dot())
    stats = {"verdict": out.verdict, **{k: v for k, v in vars(out.stats).items()},
             "formula_size": out.formula.size, "closure_size": len(out.closure)}
    if out.model is not None:
        stats["model_states"] = out.model.n_states
    if not args.quiet:
        print(out.verdict)
        for k, v in stats.items():
            if k != "verdict":
                print(f"{k}={v:.3f}" if isinstance(v, float) else f"{k}={v}")
    if args.stats_csv:
        with open(args.stats_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(stats.keys())
            w.writerow(f"{v:.3f}" if isinstance(v, float) else v for v in stats.values())
    return EXIT_SAT if out.sat else EXIT_UNSAT


def cmd_check(args) -> int:
    try:
        K = KripkeStructure.loads(_read(args.model))
    except (json.JSONDecodeError, ModelFormatError) as e:
        raise ModelFormatError(f"{args.model}: {e}") from e
    phi = parse(_read(args.formula))
    state = args.state if args.state is not None else K.witness
    if state is None:
        raise UsageError("the model has no witness; pass --state")
    if not 0 <= state < K.n_states:
        raise UsageError(f"state {state} is not in the model")
    holds = state in mc_eval(K, phi)
    if not args.quiet:
        print("holds" if holds else "fails")
    return EXIT_SAT if holds else EXIT_UNSAT


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "early":
        phi = gen_early(args.n, args.j, args.k, ex=args.ex, check_range=not args.no_range_check)
    elif fam == "early_gc":
        phi = gen_early_gc(args.n, args.j, args.k, ex=args.ex, check_range=not args.no_range_check)
    elif fam == "counter":
        phi = gen_counter(args.prefix, args.n)
    elif fam == "init":
        phi = gen_init(args.prefix, args.n)
    else:
        phi = gen_random(args.n, args.atoms, args.seed)
    print(fm.to_str(phi))
    return 0


def cmd_bench(args) -> int:
    params = []
    for n in args.n:
        if args.family == "random":
            params += [{"n": n, "atoms": args.atoms, "seed": s}
                       for s in range(args.seed, args.seed + args.count)]
        elif args.family == "counter":
            params.append({"n": n})
        else:
            p = {"n": n}
            if args.j is not None:
                p["j"] = args.j
            if args.k is not None:
                p["k"] = args.k
            params.append(p)
    cfg = SolverConfig(order=args.order, policy=args.propagate, principals=args.principals,
                       simplify=not args.no_simplify)
    records = run_bench(args.family, params, cfg, timeout=args.timeout, jobs=args.jobs)
    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)
    if args.plot:
        from gcmu.report import plot_runtime
        plot_runtime(records, args.plot, title=args.family)
    return 0


def _solver_flags(p):
    p.add_argument("--order", choices=ORDERS, default="fifo", help="expansion order")
    p.add_argument("--propagate", type=_policy, default="adaptive", metavar="POLICY",
                   help="final, every:K or adaptive (default)")
    p.add_argument("--principals", choices=("single", "all"), default="single",
                   help="non-modal rule instances per node")
    p.add_argument("--no-simplify", action="store_true",
                   help="plain disjunction rule without clash and subsumption pruning")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gcmu", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide satisfiability of a formula file ('-' for stdin)")
    p.add_argument("formula")
    _solver_flags(p)
    p.add_argument("--timeout", type=float, metavar="SECS")
    p.add_argument("--max-expansions", type=int, metavar="N")
    p.add_argument("--serial", action="store_true", help="conjoin AG EX true (serial models)")
    p.add_argument("--model", metavar="JSON", help="write the extracted model")
    p.add_argument("--model-dot", metavar="DOT", help="write the extracted model as DOT")
    p.add_argument("--stats-csv", metavar="PATH")
    for name in ("closure", "graph", "propagation"):
        p.add_argument(f"--dump-{name}", nargs="?", const="-", metavar="PATH",
                       help=f"write the {name} dump (stdout without PATH)")
    p.add_argument("-q", "--quiet", action="store_true", help="no output, exit code only")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="model check a formula on a JSON model")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--state", type=int, help="state to check (default: the witness)")
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("gen", help="print a benchmark formula")
    p.add_argument("family", choices=("early", "early_gc", "counter", "init", "random"))
    p.add_argument("--n", type=int, required=True, help="bits, or operators for random")
    p.add_argument("--j", type=int, default=4)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--ex", action="store_true", help="replace AX by EX")
    p.add_argument("--no-range-check", action="store_true", help="allow j >= n")
    p.add_argument("--prefix", default="x", help="counter name for counter/init")
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time a sweep and write CSV")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=_int_range, required=True, metavar="RANGE", help="e.g. 1-8 or 2,4,6")
    p.add_argument("--j", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--atoms", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="random formulas per n")
    _solver_flags(p)
    p.add_argument("--timeout", type=float, default=60.0, metavar="SECS")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", metavar="CSV", help="output file (default stdout)")
    p.add_argument("--plot", metavar="PNG", help="also render runtime against n")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    try:
        return args.func(args)
    except UsageError as e:
        print(f"gcmu: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as e:
        print(f"gcmu: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (fm.FormulaError, BudgetExceeded, ModelFormatError, OSError) as e:
        print(f"gcmu: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
