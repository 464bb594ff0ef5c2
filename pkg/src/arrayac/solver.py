"""Depth-first search with propagation at every node."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .arrac import arrac_fixpoint
from .core import CSPModel, PropagationStats, iter_bits
from .rules import ClosureResult, rsarr_closure

NAIVE = "naive"
ARRAC = "arrac"
ENGINES = (NAIVE, ARRAC)


@dataclass
class SearchOptions:
    engine: str = ARRAC
    var_order: str = "smallest-domain"  # or "first-unbound"
    value_order: str = "ascending"
    limit: int | None = None
    stats: bool = True
    early_restart: bool = False
    on_node: Callable[[list[int]], None] | None = None

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.var_order not in ("smallest-domain", "first-unbound"):
            raise ValueError(f"unknown variable order {self.var_order!r}")
        if self.value_order != "ascending":
            raise ValueError(f"unknown value order {self.value_order!r}")


@dataclass
class SearchResult:
    solutions: list[tuple[int, ...]]
    stats: PropagationStats
    model: CSPModel
    complete: bool = True

    def named(self) -> list[dict]:
        tok = self.model.values.token
        names = [v.name for v in self.model.vars]
        return [{n: tok(val) for n, val in zip(names, sol)} for sol in self.solutions]


def propagate(
    model: CSPModel,
    domains: Sequence[int] | None = None,
    engine: str = ARRAC,
    stats: PropagationStats | None = None,
    seed_vars=None,
    early_restart: bool = False,
    record: bool = True,
) -> ClosureResult:
    if engine == NAIVE:
        return rsarr_closure(model, domains=domains, stats=stats, seed_vars=seed_vars, record=record)
    if engine == ARRAC:
        return arrac_fixpoint(
            model, domains, stats=stats, seed_vars=seed_vars, early_restart=early_restart, record=record
        )
    raise ValueError(f"unknown engine {engine!r}")


def _choose(doms: Sequence[int], order: str) -> int | None:
    best, best_size = None, None
    for v, d in enumerate(doms):
        size = d.bit_count()
        if size <= 1:
            continue
        if order == "first-unbound":
            return v
        if best_size is None or size < best_size:
            best, best_size = v, size
    return best


def solve(model: CSPModel, opts: SearchOptions | None = None) -> SearchResult:
    """All (or up to ``opts.limit``) solutions as value-id tuples per variable."""
    opts = opts or SearchOptions()
    stats = PropagationStats()
    solutions: list[tuple[int, ...]] = []

    def node(doms, seed, depth):
        stats.nodes += 1
        res = propagate(model, doms, opts.engine, stats, seed, opts.early_restart, record=False)
        if opts.on_node is not None:
            opts.on_node(res.domains)
        if res.failed:
            if depth > 0:
                stats.backtracks += 1
            return False
        doms = res.domains
        var = _choose(doms, opts.var_order)
        if var is None:
            solutions.append(tuple(d.bit_length() - 1 for d in doms))
            return opts.limit is not None and len(solutions) >= opts.limit
        for val in iter_bits(doms[var]):
            child = list(doms)
            child[var] = 1 << val
            if node(child, [var], depth + 1):
                return True
        return False

    stopped = node(list(model.domains), None, 0)
    return SearchResult(solutions, stats, model, complete=not stopped)
