"""One-pass support discovery for ``x = a[y1,...,yn]`` and its fixpoint driver.

A run guesses that every value is redundant (the sets Y_i and X) and
strikes values off as supporting cells are found, so each addressable cell
domain is read at most once per run.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import ArrayEq, CSPModel, ModelError, PropagationStats, VarEq, index_tuples, iter_bits
from .rules import (
    ClosureResult,
    RuleApplication,
    rule_eq,
    rule_neq,
    rule_rara,
    rule_rara_prime,
    singleton_index,
)


class NotArcConsistent(ModelError):
    pass


@dataclass
class RunTrace:
    """What a single run looked at, for tests and debugging."""

    t_indices: list[tuple] = field(default_factory=list)
    supporting: list[tuple] = field(default_factory=list)
    skipped: list[tuple] = field(default_factory=list)
    rest_reads: list[tuple] = field(default_factory=list)
    aborted: bool = False


def arrac_run(
    c: ArrayEq,
    model: CSPModel,
    doms: list[int],
    stats: PropagationStats | None = None,
    *,
    order: Iterable[tuple[int, ...]] | None = None,
    literal: bool = False,
    early_restart: bool = False,
    trace: RunTrace | None = None,
) -> dict[int, int]:
    """One run on ``doms`` (modified in place). Returns {var: removed bits}.

    ``order`` overrides the lexicographic enumeration of index tuples.
    ``literal`` reproduces the pseudocode exactly: index tuples left over
    when every Y_k has emptied are dropped instead of being checked against
    X, which can remove supported values from D_x.
    """
    if stats is None:
        stats = PropagationStats()
    stats.runs += 1
    cells = model.arrays[c.array].cells
    n = len(c.index)
    dx = doms[c.x]
    ys = [doms[y] for y in c.index]
    Y = list(ys)
    X = dx
    S: list[tuple] = []
    B = iter(order) if order is not None else index_tuples(doms, c.index)

    remaining = None
    if early_restart:
        # unprocessed tuples per (dimension, value); a value still in Y_j whose
        # count hits zero can no longer be supported in this run
        total = 1
        sizes = [y.bit_count() for y in ys]
        for s in sizes:
            total *= s
        remaining = [dict.fromkeys(iter_bits(ys[i]), total // sizes[i] if sizes[i] else 0) for i in range(n)]

    while any(Y):
        b = next(B, None)
        if b is None:
            break
        if any((Y[i] >> b[i]) & 1 for i in range(n)):
            stats.t_computations += 1
            stats.cell_domain_reads += 1
            T = dx & doms[cells[b]]
            if trace is not None:
                trace.t_indices.append(b)
            if T:
                for i in range(n):
                    Y[i] &= ~(1 << b[i])
                X &= ~T
                if trace is not None:
                    trace.supporting.append(b)
        else:
            S.append(b)
            stats.skipped_indices += 1
        if remaining is not None:
            definite = []
            for i in range(n):
                remaining[i][b[i]] -= 1
                if remaining[i][b[i]] == 0 and (Y[i] >> b[i]) & 1:
                    definite.append((i, b[i]))
            if definite:
                if trace is not None:
                    trace.aborted = True
                return _commit(c, doms, stats, {c.index[i]: 1 << v for i, v in definite})

    if not literal:
        for b in B:
            S.append(b)
            stats.skipped_indices += 1
    if trace is not None:
        trace.skipped = list(S)

    for b in S:
        if not X:
            break
        stats.cell_domain_reads += 1
        X &= ~doms[cells[b]]
        if trace is not None:
            trace.rest_reads.append(b)

    removals: dict[int, int] = {}
    for i, y in enumerate(c.index):
        if Y[i]:
            removals[y] = removals.get(y, 0) | Y[i]
    if X:
        removals[c.x] = removals.get(c.x, 0) | X
    return _commit(c, doms, stats, removals)


def _commit(c, doms, stats, removals: dict[int, int]) -> dict[int, int]:
    changed = {}
    for var, rem in removals.items():
        rem &= doms[var]
        if rem:
            doms[var] &= ~rem
            stats.values_pruned += rem.bit_count()
            changed[var] = rem
    return changed


def arrac_fixpoint(
    model: CSPModel,
    domains: Sequence[int] | None = None,
    *,
    stats: PropagationStats | None = None,
    early_restart: bool = False,
    use_rara_prime: bool = False,
    literal: bool = False,
    seed_vars: Iterable[int] | None = None,
    record: bool = True,
) -> ClosureResult:
    """Repeat runs (with the fixed-index rule and Eq/Neq propagation) until stable."""
    if stats is None:
        stats = PropagationStats()
    doms = list(model.domains if domains is None else domains)
    constraints = list(model.constraints)
    watchers = model.watchers()
    log: list[RuleApplication] = []
    queue: deque[int] = deque()
    queued: set[int] = set()

    def schedule(cid):
        if cid not in queued:
            queued.add(cid)
            queue.append(cid)

    if seed_vars is None:
        for cid in range(len(constraints)):
            schedule(cid)
    else:
        for v in seed_vars:
            for cid in watchers[v]:
                schedule(cid)

    failed = any(d == 0 for d in doms)
    while queue and not failed:
        cid = queue.popleft()
        queued.discard(cid)
        c = constraints[cid]
        removed: dict[int, int] = {}
        tag = "arrac"
        if isinstance(c, ArrayEq) and singleton_index(c, doms) is not None:
            if use_rara_prime:
                constraints[cid] = c = rule_rara_prime(c, model, doms)
                stats.rule_applications += 1
                if record:
                    log.append(RuleApplication("rara_prime", cid, None, 0, c))
            else:
                cell, new = rule_rara(c, model, doms, stats)
                if new != doms[cell]:
                    removed[cell] = doms[cell] & ~new
                    doms[cell] = new
                    stats.values_pruned += removed[cell].bit_count()
                    tag = "rara+arrac"
        if isinstance(c, ArrayEq) and all(doms[v] for v in removed):
            for var, rem in arrac_run(c, model, doms, stats, literal=literal, early_restart=early_restart).items():
                removed[var] = removed.get(var, 0) | rem
        if not isinstance(c, ArrayEq):
            fn = rule_eq if isinstance(c, VarEq) else rule_neq
            tag = "eq" if isinstance(c, VarEq) else "neq"
            nx, ny = fn(c, doms)
            for var, new in ((c.x, nx), (c.y, ny)):
                if new != doms[var]:
                    rem = doms[var] & ~new
                    removed[var] = removed.get(var, 0) | rem
                    stats.values_pruned += rem.bit_count()
                    doms[var] = new

        for var, rem in removed.items():
            stats.rule_applications += 1
            if record:
                log.append(RuleApplication(tag, cid, var, rem))
            if doms[var] == 0:
                failed = True
            for other in watchers[var]:
                schedule(other)

    return ClosureResult(
        model=model,
        domains=doms,
        stable=not failed,
        failed=failed,
        log=log,
        stats=stats,
        constraints=constraints,
    )


def supporting_cells(c: ArrayEq, model: CSPModel, domains: Sequence[int]) -> set[tuple]:
    """Index tuples (as tokens) whose cell shares a value with D_x.

    Only meaningful on an arc-consistent constraint; a verification run on a
    copy raises NotArcConsistent otherwise.
    """
    doms = list(domains)
    if arrac_run(c, model, doms) or (
        (res := rule_rara(c, model, doms)) is not None and res[1] != doms[res[0]]
    ):
        raise NotArcConsistent("constraint is not closed; propagate first")
    cells = model.arrays[c.array].cells
    dx = domains[c.x]
    tok = model.values.token
    return {tuple(tok(i) for i in idx) for idx in index_tuples(domains, c.index) if dx & domains[cells[idx]]}
