"""Brute-force ground truth: solution enumeration and support-based AC closure.

Nothing here shares code with the propagation engines beyond the model
types; values are checked by evaluating constraints on explicit assignments.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

from .core import ArrayEq, CSPModel, ModelError, VarEq, VarNeq, iter_bits

DEFAULT_LIMIT = 10**6


class SearchSpaceTooLarge(ModelError):
    pass


def _values(bits: int) -> list[int]:
    return list(iter_bits(bits))


def _bind(assignment: dict[int, int], var: int, value: int) -> bool:
    """Bind var:=value unless it is already bound to something else."""
    old = assignment.get(var)
    if old is None:
        assignment[var] = value
        return True
    return old == value


def constraint_solutions(
    model: CSPModel, c, doms: Sequence[int], limit: int = DEFAULT_LIMIT
) -> Iterator[dict[int, int]]:
    """All solutions of one constraint, as partial assignments.

    Variables a solution leaves out do not affect the constraint and may
    take any value of their (nonempty) domain. For an array constraint that
    is every cell except the one the index selects.
    """
    if any(doms[v] == 0 for v in model.constraint_vars(c)):
        return
    if isinstance(c, ArrayEq):
        cells = model.arrays[c.array].cells
        pools = [_values(doms[y]) for y in c.index]
        space = len(_values(doms[c.x]))
        for p in pools:
            space *= len(p)
        if space > limit:
            raise SearchSpaceTooLarge(f"{space} assignments for one constraint")
        for x_val in _values(doms[c.x]):
            for idx in itertools.product(*pools):
                a = {c.x: x_val}
                if not all(_bind(a, y, b) for y, b in zip(c.index, idx)):
                    continue
                cell = cells.get(idx)
                if cell is None:
                    continue
                if not (doms[cell] >> x_val) & 1:
                    continue
                if not _bind(a, cell, x_val):
                    continue
                yield a
        return
    for xv in _values(doms[c.x]):
        for yv in _values(doms[c.y]):
            a: dict[int, int] = {}
            if not (_bind(a, c.x, xv) and _bind(a, c.y, yv)):
                continue
            if isinstance(c, VarEq) and xv != yv:
                continue
            if isinstance(c, VarNeq) and xv == yv:
                continue
            yield a


def supported_domains(model: CSPModel, c, doms: Sequence[int], limit: int = DEFAULT_LIMIT) -> dict[int, int]:
    """For each variable of ``c``, the values that occur in some solution of ``c``."""
    cvars = list(dict.fromkeys(model.constraint_vars(c)))
    support = dict.fromkeys(cvars, 0)
    always_bound: set[int] | None = None
    for sol in constraint_solutions(model, c, doms, limit):
        for v, val in sol.items():
            support[v] |= 1 << val
        always_bound = set(sol) if always_bound is None else always_bound & set(sol)
    if always_bound is None:
        return support
    for v in cvars:
        if v not in always_bound:
            support[v] = doms[v]
    return support


def ac_closure_oracle(
    model: CSPModel, domains: Sequence[int] | None = None, limit: int = DEFAULT_LIMIT
) -> list[int]:
    """Remove unsupported values constraint by constraint until nothing changes."""
    doms = list(model.domains if domains is None else domains)
    changed = True
    while changed:
        changed = False
        for c in model.constraints:
            support = supported_domains(model, c, doms, limit)
            for v, bits in support.items():
                new = doms[v] & bits
                if new != doms[v]:
                    doms[v] = new
                    changed = True
    return doms


def is_arc_consistent(model: CSPModel, doms: Sequence[int], limit: int = DEFAULT_LIMIT) -> bool:
    for c in model.constraints:
        for v, bits in supported_domains(model, c, doms, limit).items():
            if doms[v] & ~bits:
                return False
    return True


def _satisfied(model: CSPModel, c, a: Sequence[int]) -> bool:
    if isinstance(c, ArrayEq):
        idx = tuple(a[y] for y in c.index)
        cell = model.arrays[c.array].cells.get(idx)
        return cell is not None and a[cell] == a[c.x]
    if isinstance(c, VarEq):
        return a[c.x] == a[c.y]
    return a[c.x] != a[c.y]


def check_assignment(model: CSPModel, assignment: Sequence[int]) -> bool:
    """True if a total assignment (value id per variable) satisfies every constraint."""
    return all((model.domains[v] >> val) & 1 for v, val in enumerate(assignment)) and all(
        _satisfied(model, c, assignment) for c in model.constraints
    )


def enumerate_solution_ids(
    model: CSPModel, domains: Sequence[int] | None = None, limit: int = DEFAULT_LIMIT
) -> list[tuple[int, ...]]:
    """All total solutions as value-id tuples, lexicographic by variable id."""
    doms = list(model.domains if domains is None else domains)
    space = 1
    for d in doms:
        space *= d.bit_count()
        if space > limit:
            raise SearchSpaceTooLarge(f"more than {limit} total assignments")
    if space == 0:
        return []
    nvars = len(doms)
    # check each constraint once its highest-numbered variable is assigned
    due: list[list] = [[] for _ in range(nvars)]
    for c in model.constraints:
        due[max(model.constraint_vars(c))].append(c)
    pools = [_values(d) for d in doms]
    out: list[tuple[int, ...]] = []
    a = [0] * nvars

    def dfs(i):
        if i == nvars:
            out.append(tuple(a))
            return
        for val in pools[i]:
            a[i] = val
            if all(_satisfied(model, c, a) for c in due[i]):
                dfs(i + 1)

    dfs(0)
    return out


def enumerate_solutions(
    model: CSPModel, domains: Sequence[int] | None = None, limit: int = DEFAULT_LIMIT
) -> list[dict]:
    """All solutions as {variable name: token} dicts."""
    tok = model.values.token
    names = [v.name for v in model.vars]
    return [{n: tok(val) for n, val in zip(names, sol)} for sol in enumerate_solution_ids(model, domains, limit)]
