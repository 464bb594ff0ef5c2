"""Seeded random models for property tests, ``check --random`` and benchmarks."""

from __future__ import annotations

import random

from .core import CSPModel, ArrayEq, VarEq, VarNeq, validate_model

VALUES = ["A", "B", "C", "D", "E", "F"]


def _subset_with(rng: random.Random, pool, keep, size):
    rest = [v for v in pool if v != keep]
    rng.shuffle(rest)
    out = {keep, *rest[: max(0, size - 1)]}
    return [v for v in pool if v in out]


def random_instance(
    rng: random.Random,
    max_arity: int = 3,
    max_dom: int = 4,
    max_cells: int = 64,
    constraints: int | None = None,
    satisfiable: bool = True,
) -> CSPModel:
    """A validated linear model around one random array.

    With ``satisfiable`` a total assignment is planted first and every
    domain is grown around it, so the model has at least one solution.
    """
    n = rng.randint(1, max_arity)
    while True:
        sizes = [rng.randint(1, max_dom) for _ in range(n)]
        total = 1
        for s in sizes:
            total *= s
        if total <= max_cells:
            break
    dims = [list(range(1, s + 1)) for s in sizes]
    values = VALUES[: max_dom + 2]
    model = CSPModel()

    const_share = rng.random()
    cells: dict[tuple, int] = {}
    planted: dict[int, str] = {}
    for idx in _product(dims):
        name = "a[" + ",".join(map(str, idx)) + "]"
        keep = rng.choice(values)
        if rng.random() < const_share:
            v = model.add_var(name, [keep], "const")
        else:
            v = model.add_var(name, _subset_with(rng, values, keep, rng.randint(1, max_dom)), "cell")
        cells[idx] = v
        planted[v] = keep
    model.add_array("a", cells)
    model.arrays["a"].dims = tuple(tuple(model.values.intern(t) for t in d) for d in dims)

    k = constraints if constraints is not None else rng.choice([1, 1, 1, 2])
    xs = []
    for j in range(k):
        idx = tuple(rng.choice(d) for d in dims)
        ys = []
        for i, d in enumerate(dims):
            dom = _subset_with(rng, d, idx[i], rng.randint(1, len(d))) if satisfiable else rng.sample(d, rng.randint(1, len(d)))
            ys.append(model.add_var(f"y{j}_{i + 1}", dom))
        xval = planted[cells[idx]]
        if satisfiable:
            xdom = _subset_with(rng, values, xval, rng.randint(1, max_dom))
        else:
            xdom = rng.sample(values, rng.randint(1, max_dom))
        x = model.add_var(f"x{j}", xdom)
        xs.append((x, xval))
        model.add_constraint(ArrayEq(x, "a", tuple(ys)))
    if len(xs) == 2 and rng.random() < 0.5:
        (x0, v0), (x1, v1) = xs
        same = v0 == v1 if satisfiable else rng.random() < 0.5
        model.add_constraint(VarEq(x0, x1) if same else VarNeq(x0, x1))
    return validate_model(model)


def _product(dims):
    if not dims:
        yield ()
        return
    for head in dims[0]:
        for rest in _product(dims[1:]):
            yield (head, *rest)


def random_instances(seed: int, count: int, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


def dense_instance(d: int, n: int = 2) -> CSPModel:
    """Every index tuple is part of a solution: a[b] = (sum(b) mod d), x over all d values."""
    model = CSPModel()
    dims = [list(range(1, d + 1)) for _ in range(n)]
    x = model.add_var("x", list(range(d)))
    ys = tuple(model.add_var(f"y{i + 1}", dims[i]) for i in range(n))
    table = _table(dims, (), d)
    model.add_const_array("a", dims, table)
    model.add_constraint(ArrayEq(x, "a", ys))
    return validate_model(model)


def _table(dims, prefix, d):
    if not dims:
        return sum(prefix) % d
    return [_table(dims[1:], (*prefix, b), d) for b in dims[0]]
