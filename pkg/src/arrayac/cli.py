"""Command line front end: propagate, solve, check, bench, crossword."""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time

from .arrac import arrac_fixpoint
from .core import CONST, FRESH, CSPModel, ModelError, PropagationStats, validate_model
from .crossword import CrosswordSpec, build_crossword, render
from .dsl import ParseError, format_model, parse_model
from .generate import random_instances
from .oracle import SearchSpaceTooLarge, ac_closure_oracle
from .rules import rsarr_closure
from .solver import ENGINES, SearchOptions, propagate, solve

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def load_model(path: str, allow_nonlinear: bool = False) -> CSPModel:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
        return validate_model(parse_model(text, allow_nonlinear), allow_nonlinear)
    except ParseError as exc:
        raise InputError("\n".join(f"{path}:{issue}" for issue in exc.issues)) from None
    except (OSError, ModelError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _shown(model: CSPModel, all_vars: bool):
    return lambda var: all_vars or var.kind not in (CONST, FRESH)


def _fmt_values(values) -> str:
    return "{" + ", ".join(map(str, values)) + "}"


def _fmt_stats(stats: PropagationStats) -> str:
    return " ".join(f"{k}={v}" for k, v in stats.as_dict().items())


def cmd_propagate(args) -> int:
    model = load_model(args.file, args.allow_nonlinear)
    res = propagate(model, engine=args.engine, early_restart=args.early_restart)
    domains = res.as_dict(_shown(model, args.all_vars))
    status = "failure" if res.failed else "stable"
    if args.json:
        payload = {"domains": domains, "stats": res.stats.as_dict(), "status": status}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for name, values in domains.items():
            print(f"{name}: {_fmt_values(values)}")
        print(f"status: {status}")
        print(f"stats: {_fmt_stats(res.stats)}")
    return EXIT_FAIL if res.failed else EXIT_OK


def cmd_solve(args) -> int:
    model = load_model(args.file, args.allow_nonlinear)
    opts = SearchOptions(engine=args.engine, var_order=args.var_order, limit=None if args.all else 1)
    res = solve(model, opts)
    show = _shown(model, args.all_vars)
    names = [v.name for v in model.vars if show(v)]
    for k, sol in enumerate(res.named(), start=1):
        print(f"solution {k}: " + ", ".join(f"{n}={sol[n]}" for n in names))
    if not res.solutions:
        print("no solution")
    print(f"solutions: {len(res.solutions)}")
    print(f"backtracks: {res.stats.backtracks}")
    if args.stats:
        print(f"stats: {_fmt_stats(res.stats)}")
    return EXIT_OK if res.solutions else EXIT_FAIL


def diff_engines(model: CSPModel, limit: int = 10**6) -> list[str]:
    """Disagreements between both engines and the brute-force closure."""
    oracle = ac_closure_oracle(model, limit=limit)
    oracle_failed = any(d == 0 for d in oracle)
    out = []
    for name, res in (("naive", rsarr_closure(model)), ("arrac", arrac_fixpoint(model))):
        if res.failed != oracle_failed:
            out.append(f"{name}: failed={res.failed}, oracle failed={oracle_failed}")
            continue
        if oracle_failed:
            continue
        for vid, (got, want) in enumerate(zip(res.domains, oracle)):
            if got != want:
                var = model.vars[vid].name
                out.append(
                    f"{name}: {var} {_fmt_values(model.tokens(got))} != oracle {_fmt_values(model.tokens(want))}"
                )
    return out


def cmd_check(args) -> int:
    models = []
    if args.file:
        models.append((args.file, load_model(args.file, args.allow_nonlinear)))
    if args.random:
        models += [(f"random#{i}", m) for i, m in enumerate(random_instances(args.seed, args.random))]
    if not models:
        raise InputError("nothing to check: give a model file or --random N")
    diverged = 0
    for label, model in models:
        try:
            diff = diff_engines(model)
        except SearchSpaceTooLarge as exc:
            raise InputError(f"{label}: {exc}") from None
        if diff:
            diverged += 1
            for line in diff:
                print(f"{label}: {line}")
    print(f"checked {len(models)} model(s), {diverged} divergent")
    return EXIT_FAIL if diverged else EXIT_OK


def bench(model: CSPModel, repeat: int, full_search: bool = False) -> dict[str, dict[str, float]]:
    """Median time and counters per engine; engines alternate within each repeat."""
    samples = {e: {"time": [], "cell_domain_reads": [], "t_computations": []} for e in ENGINES}
    for _ in range(repeat):
        for engine in ENGINES:
            stats = PropagationStats()
            start = time.perf_counter()
            if full_search:
                stats = solve(model, SearchOptions(engine=engine)).stats
            else:
                propagate(model, engine=engine, stats=stats, record=False)
            elapsed = time.perf_counter() - start
            samples[engine]["time"].append(elapsed)
            samples[engine]["cell_domain_reads"].append(stats.cell_domain_reads)
            samples[engine]["t_computations"].append(stats.t_computations)
    return {e: {k: statistics.median(v) for k, v in s.items()} for e, s in samples.items()}


def cmd_bench(args) -> int:
    if args.crossword:
        model = validate_model(build_crossword(_load_crossword(*args.crossword)))
    elif args.file:
        model = load_model(args.file, args.allow_nonlinear)
    else:
        raise InputError("nothing to benchmark: give a model file or --crossword GRID WORDS")
    result = bench(model, args.repeat, args.search)
    if args.json:
        print(json.dumps(result, sort_keys=True, indent=2))
    else:
        for engine, row in result.items():
            print(
                f"{engine:6s} time={row['time'] * 1e3:.3f}ms "
                f"cell_domain_reads={row['cell_domain_reads']:g} t_computations={row['t_computations']:g}"
            )
    return EXIT_OK


def _load_crossword(grid, words) -> CrosswordSpec:
    try:
        return CrosswordSpec.from_files(grid, words)
    except (OSError, ModelError) as exc:
        raise InputError(str(exc)) from None


def cmd_crossword(args) -> int:
    spec = _load_crossword(args.grid, args.words)
    try:
        model = validate_model(build_crossword(spec))
    except ModelError as exc:
        raise InputError(str(exc)) from None
    if args.emit_model:
        sys.stdout.write(format_model(model))
        return EXIT_OK
    res = solve(model, SearchOptions(engine=args.engine, limit=None if args.all else 1))
    for k, sol in enumerate(res.named()):
        if k:
            print()
        print(render(spec, sol))
    if not res.solutions:
        print("UNSAT")
    if args.stats:
        print(f"backtracks: {res.stats.backtracks}")
        print(f"stats: {_fmt_stats(res.stats)}")
    return EXIT_OK if res.solutions else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arrayac", description="Arc-consistency for array constraints.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized step")
    sub = p.add_subparsers(dest="command", required=True)

    def engine_opt(sp):
        sp.add_argument("--engine", choices=ENGINES, default="arrac")

    def model_opts(sp, required=True):
        sp.add_argument("file", nargs=None if required else "?")
        sp.add_argument("--allow-nonlinear", action="store_true", help="accept repeated variables (incomplete pruning)")
        sp.add_argument("--all-vars", action="store_true", help="also show constants and auxiliary variables")

    sp = sub.add_parser("propagate", parents=[common], help="propagate to a fixpoint and print domains")
    model_opts(sp)
    engine_opt(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--early-restart", action="store_true")
    sp.set_defaults(func=cmd_propagate)

    sp = sub.add_parser("solve", parents=[common], help="search for solutions")
    model_opts(sp)
    engine_opt(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--first", dest="all", action="store_false")
    mode.add_argument("--all", dest="all", action="store_true")
    sp.add_argument("--var-order", choices=["smallest-domain", "first-unbound"], default="smallest-domain")
    sp.add_argument("--stats", action="store_true")
    sp.set_defaults(func=cmd_solve, all=False)

    sp = sub.add_parser("check", parents=[common], help="compare both engines with the brute-force closure")
    model_opts(sp, required=False)
    sp.add_argument("--random", type=int, default=0, metavar="N", help="also check N seeded random models")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("bench", parents=[common], help="time both engines")
    model_opts(sp, required=False)
    sp.add_argument("--crossword", nargs=2, metavar=("GRID", "WORDS"))
    sp.add_argument("--repeat", type=int, default=20)
    sp.add_argument("--search", action="store_true", help="time a full search instead of root propagation")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("crossword", parents=[common], help="fill a crossword grid")
    sp.add_argument("grid")
    sp.add_argument("words")
    engine_opt(sp)
    sp.add_argument("--all", action="store_true", help="print every filling")
    sp.add_argument("--stats", action="store_true")
    sp.add_argument("--emit-model", action="store_true", help="print the model instead of solving")
    sp.set_defaults(func=cmd_crossword)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
