import random

import pytest

from arrayac import CrosswordSpec, NoFittingWord, SearchOptions, SearchSpaceTooLarge, build_crossword, solve
from arrayac.core import ArrayEq, FRESH, VarNeq, validate_model
from arrayac.crossword import crossings, render
from arrayac.generate import random_instance
from arrayac.oracle import check_assignment, enumerate_solution_ids

from conftest import MODELS, load, table_model

ENGINES = ["naive", "arrac"]


@pytest.mark.parametrize("engine", ENGINES)
def test_table_all_solutions(engine):
    m = table_model()
    res = solve(m, SearchOptions(engine=engine))
    assert sorted(res.solutions) == enumerate_solution_ids(m)
    assert [(s["x"], s["y1"], s["y2"]) for s in sorted(res.named(), key=lambda s: s["x"])] == [
        ("B", 1, 2),
        ("C", 1, 3),
        ("D", 2, 1),
    ]


@pytest.mark.parametrize("engine", ENGINES)
def test_xor_search_is_short(engine, xor_relaxed):
    res = solve(xor_relaxed, SearchOptions(engine=engine))
    assert res.solutions == []
    assert res.stats.nodes - 1 <= 2


@pytest.mark.parametrize("engine", ENGINES)
def test_root_failure_needs_no_backtrack(engine):
    res = solve(load("contradiction.arr"), SearchOptions(engine=engine))
    assert res.solutions == []
    assert res.stats.backtracks == 0
    assert res.stats.nodes == 1


def small_random_models(seed, count):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_instance(rng, max_arity=2, max_dom=3, max_cells=6, satisfiable=rng.random() < 0.7)
        try:
            sols = enumerate_solution_ids(m, limit=10**5)
        except SearchSpaceTooLarge:
            continue
        out.append((m, sols))
    return out


def test_search_matches_enumeration():
    for m, sols in small_random_models(71, 150):
        for engine in ENGINES:
            for order in ("smallest-domain", "first-unbound"):
                res = solve(m, SearchOptions(engine=engine, var_order=order))
                assert sorted(res.solutions) == sols
                assert all(check_assignment(m, s) for s in res.solutions)


def test_solution_limit():
    m = table_model()
    res = solve(m, SearchOptions(limit=1))
    assert len(res.solutions) == 1 and not res.complete


def test_engines_see_identical_nodes():
    for m, _ in small_random_models(72, 60):
        seen = {}
        for engine in ENGINES:
            trail = []
            # a failed node only promises some empty domain, not which one
            solve(m, SearchOptions(engine=engine, on_node=lambda d: trail.append(None if 0 in d else tuple(d))))
            seen[engine] = trail
        assert seen["naive"] == seen["arrac"]


def test_backtracks_count_failed_nodes_below_root():
    for m, _ in small_random_models(73, 80):
        failed = []
        res = solve(m, SearchOptions(on_node=lambda d: failed.append(any(x == 0 for x in d))))
        assert res.stats.backtracks == sum(failed[1:])
        if failed[0]:
            assert res.stats.backtracks == 0 and len(failed) == 1


def test_bad_options():
    with pytest.raises(ValueError):
        SearchOptions(engine="fast")
    with pytest.raises(ValueError):
        SearchOptions(var_order="random")


# -- crossword ----------------------------------------------------------------


def toy_spec():
    return CrosswordSpec(["...", "#.#", "#.#"], ["CAT", "DOG", "ACE", "OAK"])


def test_toy_entries_and_crossing():
    spec = toy_spec()
    assert [(e.name, e.across, e.length) for e in spec.entries] == [("E1", True, 3), ("E2", False, 3)]
    assert [(a.name, pa, d.name, pd) for a, pa, d, pd in crossings(spec)] == [("E1", 2, "E2", 1)]


def test_toy_model_shape():
    m = build_crossword(toy_spec())
    arr = [c for c in m.constraints if isinstance(c, ArrayEq)]
    fresh = [v for v in m.vars if v.kind == FRESH]
    assert len(arr) == 2 and len(fresh) == 1
    assert arr[0].x == arr[1].x == m.var(fresh[0].name)
    assert [c for c in m.constraints if isinstance(c, VarNeq)] == [VarNeq(m.var("E1"), m.var("E2"))]
    assert m.domain("E1") == {"CAT", "DOG", "ACE", "OAK"}


@pytest.mark.parametrize("engine", ENGINES)
def test_toy_solutions_match_enumeration(engine):
    m = validate_model(build_crossword(toy_spec()))
    expected = enumerate_solution_ids(m)
    res = solve(m, SearchOptions(engine=engine))
    assert sorted(res.solutions) == expected
    pairs = {(s["E1"], s["E2"]) for s in res.named()}
    # across letter 2 equals down letter 1, words distinct
    brute = {(a, d) for a in toy_spec().words for d in toy_spec().words if a != d and a[1] == d[0]}
    assert pairs == brute == {("CAT", "ACE"), ("DOG", "OAK"), ("ACE", "CAT"), ("OAK", "ACE")}


def test_no_fitting_word():
    with pytest.raises(NoFittingWord):
        build_crossword(CrosswordSpec([".......", "#######"], ["CAT", "HORSE"]))


def check_filled(spec, grid_text):
    rows = grid_text.splitlines()
    words = []
    for e in spec.entries:
        words.append("".join(rows[r][c] for r, c in e.cells()))
    assert all(w in spec.words for w in words)
    assert len(set(words)) == len(words)


@pytest.mark.parametrize("engine", ENGINES)
def test_lattice_solves(engine):
    spec = CrosswordSpec.from_files(MODELS / "lattice5.grid", MODELS / "lattice5.words")
    m = validate_model(build_crossword(spec))
    res = solve(m, SearchOptions(engine=engine))
    assert len(res.solutions) == 2
    for sol in res.named():
        check_filled(spec, render(spec, sol))


def test_classic_grid_is_backtrack_free():
    spec = CrosswordSpec.from_files(MODELS / "classic.grid", MODELS / "classic.words")
    m = validate_model(build_crossword(spec))
    res = solve(m)
    assert len(res.solutions) == 1
    assert res.stats.backtracks == 0
    assert res.stats.nodes == 1
    check_filled(spec, render(spec, res.named()[0]))
