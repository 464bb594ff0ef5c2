import itertools
import random

import pytest

from arrayac import ArrayEq, CSPModel, VarEq, decompose, validate_model
from arrayac.core import FRESH, iter_bits
from arrayac.expressions import Access, Const, NonLinearAfterDecomposition, Var
from arrayac.oracle import ac_closure_oracle, enumerate_solution_ids
from arrayac.rules import rsarr_closure
from arrayac.arrac import arrac_fixpoint


def letters_model():
    m = CSPModel()
    words = ["ABCD", "BCDA", "CDAB"]
    m.add_var("E1", words)
    m.add_var("E2", words)
    m.add_const_array("l", [words, [1, 2, 3, 4]], [list(w) for w in words])
    return m


def test_crossing_gets_one_fresh_variable():
    m = letters_model()
    l4 = Access("l", (Var("E1"), Const(4)))
    l3 = Access("l", (Var("E2"), Const(3)))
    out, fresh = decompose(l4, l3, m)
    assert len(fresh) == 1
    v = fresh[0]
    assert m.vars[v].kind == FRESH
    assert [type(c) for c in out] == [ArrayEq, ArrayEq]
    first, second = out
    assert first.x == second.x == v
    assert first.index[0] == m.var("E1") and second.index[0] == m.var("E2")
    assert m.domain(first.index[1]) == {4}
    assert m.domain(second.index[1]) == {3}
    assert m.domain(v) == set("ABCD")


def test_flat_constraint_is_unchanged():
    m = CSPModel()
    m.add_var("x", [1, 2])
    m.add_var("y", [1, 2])
    m.add_const_array("a", [[1, 2]], [2, 1])
    before = len(m.vars)
    out, fresh = decompose(Var("x"), Access("a", (Var("y"),)), m)
    assert out == [ArrayEq(m.var("x"), "a", (m.var("y"),))]
    assert fresh == [] and len(m.vars) == before


def test_variable_equality():
    m = CSPModel()
    m.add_var("x", [1, 2])
    out, fresh = decompose(Var("x"), Const(2), m)
    assert len(out) == 1 and isinstance(out[0], VarEq) and fresh == []


def test_repeated_variable_is_rejected():
    m = CSPModel()
    m.add_var("y", [0, 1])
    m.add_const_array("xor", [[0, 1], [0, 1]], [[0, 1], [1, 0]])
    with pytest.raises(NonLinearAfterDecomposition):
        decompose(Const(1), Access("xor", (Var("y"), Var("y"))), m)
    out, _ = decompose(Const(1), Access("xor", (Var("y"), Var("y"))), m, allow_nonlinear=True)
    assert len(out) == 1


def nested_model(rng):
    """x = a[b[y]] over small random arrays; arrays of variables or constants."""
    m = CSPModel()
    vals = [1, 2, 3]
    m.add_var("x", rng.sample(vals, rng.randint(1, 3)))
    m.add_var("y", rng.sample(vals, rng.randint(1, 3)))
    for name in ("a", "b"):
        cells = {}
        for i in vals:
            dom = rng.sample(vals, rng.randint(1, 3))
            cells[(i,)] = m.add_var(f"{name}[{i}]", dom, "cell")
        m.add_array(name, cells)
    out, fresh = decompose(Var("x"), Access("a", (Access("b", (Var("y"),)),)), m)
    for c in out:
        m.add_constraint(c)
    return validate_model(m), fresh


def composed_supports(m, doms):
    """Brute force over x, y and all cells for x = a[b[y]]."""
    names = ["x", "y"] + [f"{n}[{i}]" for n in "ab" for i in (1, 2, 3)]
    vids = [m.var(n) for n in names]
    pools = [list(iter_bits(doms[v])) for v in vids]
    tok = m.values.token
    support = {v: 0 for v in vids}
    solutions = []
    for combo in itertools.product(*pools):
        val = dict(zip(names, (tok(i) for i in combo)))
        inner = val[f"b[{val['y']}]"]
        if val["x"] == val[f"a[{inner}]"]:
            solutions.append(combo)
            for v, i in zip(vids, combo):
                support[v] |= 1 << i
    return vids, support, solutions


def test_nested_access_shape():
    m, fresh = nested_model(random.Random(0))
    assert len(fresh) == 1
    v = fresh[0]
    inner, outer = m.constraints
    assert inner == ArrayEq(v, "b", (m.var("y"),))
    assert outer == ArrayEq(m.var("x"), "a", (v,))


def test_decomposed_closure_makes_composed_arc_consistent():
    rng = random.Random(17)
    nonfailed = 0
    for _ in range(300):
        m, fresh = nested_model(rng)
        for engine in (rsarr_closure, lambda mm: arrac_fixpoint(mm)):
            res = engine(m)
            vids, support, solutions = composed_supports(m, res.domains)
            if res.failed:
                continue
            nonfailed += 1
            assert solutions
            for v in vids:
                assert res.domains[v] & ~support[v] == 0
    assert nonfailed > 100


def test_decomposed_solutions_project_to_composed():
    rng = random.Random(18)
    for _ in range(150):
        m, fresh = nested_model(rng)
        vids, _, composed = composed_supports(m, m.domains)
        projected = {tuple(sol[v] for v in vids) for sol in enumerate_solution_ids(m)}
        assert projected == set(composed)


def test_pair_closure_equals_composed_closure_on_constants():
    rng = random.Random(19)
    for _ in range(100):
        m = CSPModel()
        vals = [1, 2, 3]
        m.add_var("x", rng.sample(vals, rng.randint(1, 3)))
        m.add_var("y", rng.sample(vals, rng.randint(1, 3)))
        a = [rng.choice(vals) for _ in vals]
        b = [rng.choice(vals) for _ in vals]
        m.add_const_array("a", [vals], a)
        m.add_const_array("b", [vals], b)
        out, _ = decompose(Var("x"), Access("a", (Access("b", (Var("y"),)),)), m)
        for c in out:
            m.add_constraint(c)
        m = validate_model(m)
        doms = ac_closure_oracle(m)
        xs = m.domain("x")
        ys = m.domain("y")
        pairs = [(a[b[y - 1] - 1], y) for y in ys if a[b[y - 1] - 1] in xs]
        if not pairs:
            assert any(d == 0 for d in doms)
            continue
        assert m.domain("x", doms) == {p[0] for p in pairs}
        assert m.domain("y", doms) == {p[1] for p in pairs}
