"""Domain reduction rules for ``x = a[y1,...,yn]`` and a worklist closure driver.

Every rule takes the model (for structure) and a mutable domain table
``doms`` (a list of bit-sets indexed by variable id) and returns the new
domain(s) without writing them; the closure driver commits changes.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import ArrayEq, CSPModel, PropagationStats, VarEq, VarNeq, index_tuples, iter_bits

RARX = "rarx"
RARY = "rary"
RARA = "rara"
RARA_PRIME = "rara_prime"
EQ = "eq"
NEQ = "neq"

DEFAULT_RULES = frozenset({RARX, RARY, RARA, EQ, NEQ})


class NotApplicable(Exception):
    pass


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    constraint: int
    var: int | None
    removed: int = 0
    rewrite: VarEq | None = None


@dataclass
class ClosureResult:
    model: CSPModel
    domains: list[int]
    stable: bool
    failed: bool
    log: list[RuleApplication] = field(default_factory=list)
    stats: PropagationStats = field(default_factory=PropagationStats)
    constraints: list | None = None

    def domain(self, name) -> set:
        return self.model.domain(name, self.domains)

    def as_dict(self, include=None) -> dict[str, list]:
        out = {}
        for vid, var in enumerate(self.model.vars):
            if include is None or include(var):
                out[var.name] = self.model.tokens(self.domains[vid])
        return out


def _stats(stats):
    return stats if stats is not None else PropagationStats()


def rule_rarx(c: ArrayEq, model: CSPModel, doms: Sequence[int], stats=None) -> int:
    """D_x intersected with the union of all addressable cell domains."""
    stats = _stats(stats)
    cells = model.arrays[c.array].cells
    dx = doms[c.x]
    union = 0
    for idx in index_tuples(doms, c.index):
        stats.cell_domain_reads += 1
        union |= doms[cells[idx]]
        if dx & ~union == 0:
            break
    return dx & union


def rule_rary(c: ArrayEq, model: CSPModel, doms: Sequence[int], k: int, stats=None) -> int:
    """D_{y_k} without the values b whose addressable cells all miss D_x.

    ``k`` is zero-based. One sweep builds, per value of dimension k, the
    union of the cell domains addressable with that value.
    """
    stats = _stats(stats)
    cells = model.arrays[c.array].cells
    unions: dict[int, int] = {}
    for idx in index_tuples(doms, c.index):
        stats.cell_domain_reads += 1
        b = idx[k]
        unions[b] = unions.get(b, 0) | doms[cells[idx]]
    dx = doms[c.x]
    keep = 0
    for b, u in unions.items():
        if u & dx:
            keep |= 1 << b
    return doms[c.index[k]] & keep


def singleton_index(c: ArrayEq, doms: Sequence[int]) -> tuple[int, ...] | None:
    """The only index tuple if D_{y1} x ... x D_{yn} is a singleton."""
    out = []
    for y in c.index:
        d = doms[y]
        if d == 0 or d & (d - 1):
            return None
        out.append(d.bit_length() - 1)
    return tuple(out)


def rule_rara(c: ArrayEq, model: CSPModel, doms: Sequence[int], stats=None) -> tuple[int, int] | None:
    """``(cell, D_cell & D_x)`` when the index is fixed, else None."""
    idx = singleton_index(c, doms)
    if idx is None:
        return None
    stats = _stats(stats)
    cell = model.arrays[c.array].cells[idx]
    stats.cell_domain_reads += 1
    return cell, doms[cell] & doms[c.x]


def rule_rara_prime(c: ArrayEq, model: CSPModel, doms: Sequence[int]) -> VarEq:
    """Rewrite ``x = a[y...]`` with a fixed index to ``x = a[b...]``."""
    idx = singleton_index(c, doms)
    if idx is None:
        raise NotApplicable("index is not fixed")
    return VarEq(c.x, model.arrays[c.array].cells[idx])


def rule_eq(c: VarEq, doms: Sequence[int]) -> tuple[int, int]:
    both = doms[c.x] & doms[c.y]
    return both, both


def rule_neq(c: VarNeq, doms: Sequence[int]) -> tuple[int, int]:
    dx, dy = doms[c.x], doms[c.y]
    if dx and dx & (dx - 1) == 0:
        dy &= ~dx
    if dy and dy & (dy - 1) == 0:
        dx &= ~dy
    return dx, dy


def _items(c, cid: int, rules) -> list[tuple]:
    if isinstance(c, ArrayEq):
        out = []
        if RARX in rules:
            out.append((RARX, cid, -1))
        if RARY in rules:
            out.extend((RARY, cid, k) for k in range(len(c.index)))
        if RARA_PRIME in rules:
            out.append((RARA_PRIME, cid, -1))
        elif RARA in rules:
            out.append((RARA, cid, -1))
        return out
    if isinstance(c, VarEq):
        return [(EQ, cid, -1)] if EQ in rules else []
    return [(NEQ, cid, -1)] if NEQ in rules else []


def rsarr_closure(
    model: CSPModel,
    rules: Iterable[str] = DEFAULT_RULES,
    domains: Sequence[int] | None = None,
    *,
    rng: random.Random | None = None,
    stats: PropagationStats | None = None,
    seed_vars: Iterable[int] | None = None,
    record: bool = True,
) -> ClosureResult:
    """Apply the selected rules until none changes a domain or one empties.

    The worklist holds (rule, constraint, dimension) items and is FIFO unless
    ``rng`` is given, in which case items are picked at random. With
    ``seed_vars`` only constraints over those variables are scheduled first;
    use this when ``domains`` is already closed apart from those variables.
    """
    rules = frozenset(rules)
    stats = _stats(stats)
    doms = list(model.domains if domains is None else domains)
    constraints = list(model.constraints)
    watchers = model.watchers()
    log: list[RuleApplication] = []
    queue: deque | list = deque() if rng is None else []
    queued: set[tuple] = set()

    def schedule(cid):
        for item in _items(constraints[cid], cid, rules):
            if item not in queued:
                queued.add(item)
                queue.append(item)

    if seed_vars is None:
        for cid in range(len(constraints)):
            schedule(cid)
    else:
        for v in seed_vars:
            for cid in watchers[v]:
                schedule(cid)

    failed = any(d == 0 for d in doms)
    while queue and not failed:
        if rng is None:
            item = queue.popleft()
        else:
            j = rng.randrange(len(queue))
            queue[j], queue[-1] = queue[-1], queue[j]
            item = queue.pop()
        queued.discard(item)
        tag, cid, k = item
        c = constraints[cid]
        changes: list[tuple[int, int]] = []
        if tag == RARX:
            if not isinstance(c, ArrayEq):
                continue
            changes.append((c.x, rule_rarx(c, model, doms, stats)))
        elif tag == RARY:
            if not isinstance(c, ArrayEq):
                continue
            changes.append((c.index[k], rule_rary(c, model, doms, k, stats)))
        elif tag == RARA:
            if not isinstance(c, ArrayEq):
                continue
            res = rule_rara(c, model, doms, stats)
            if res is not None:
                changes.append(res)
        elif tag == RARA_PRIME:
            if not isinstance(c, ArrayEq) or singleton_index(c, doms) is None:
                continue
            new = rule_rara_prime(c, model, doms)
            constraints[cid] = new
            stats.rule_applications += 1
            if record:
                log.append(RuleApplication(RARA_PRIME, cid, None, 0, new))
            schedule(cid)
            continue
        elif tag == EQ:
            nx, ny = rule_eq(c, doms)
            changes += [(c.x, nx), (c.y, ny)]
        else:
            nx, ny = rule_neq(c, doms)
            changes += [(c.x, nx), (c.y, ny)]

        for var, new in changes:
            old = doms[var]
            if new == old:
                continue
            removed = old & ~new
            doms[var] = new
            stats.rule_applications += 1
            stats.values_pruned += removed.bit_count()
            if record:
                log.append(RuleApplication(tag, cid, var, removed))
            if new == 0:
                failed = True
                break
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


def is_closed(model: CSPModel, doms: Sequence[int], rules: Iterable[str] = DEFAULT_RULES) -> bool:
    """True if no selected rule would change ``doms``."""
    rules = frozenset(rules)
    for c in model.constraints:
        if isinstance(c, ArrayEq):
            if RARX in rules and rule_rarx(c, model, doms) != doms[c.x]:
                return False
            if RARY in rules:
                for k, y in enumerate(c.index):
                    if rule_rary(c, model, doms, k) != doms[y]:
                        return False
            if RARA in rules:
                res = rule_rara(c, model, doms)
                if res is not None and res[1] != doms[res[0]]:
                    return False
        else:
            fn = rule_eq if isinstance(c, VarEq) else rule_neq
            if (EQ if isinstance(c, VarEq) else NEQ) in rules and fn(c, doms) != (doms[c.x], doms[c.y]):
                return False
    return True


def removed_values(model: CSPModel, before: Sequence[int], after: Sequence[int]) -> dict[str, list]:
    out = {}
    for vid, (b, a) in enumerate(zip(before, after)):
        if b != a:
            out[model.vars[vid].name] = [model.values.token(i) for i in iter_bits(b & ~a)]
    return out
