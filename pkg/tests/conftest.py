from pathlib import Path

import pytest

from arrayac import ArrayEq, CSPModel, parse_model, validate_model

MODELS = Path(__file__).resolve().parent.parent / "models"


def load(name, allow_nonlinear=False):
    text = (MODELS / name).read_text()
    return validate_model(parse_model(text, allow_nonlinear), allow_nonlinear)


def model_from(text, allow_nonlinear=False):
    return validate_model(parse_model(text, allow_nonlinear), allow_nonlinear)


def table_model():
    """x in {B,C,D}, y1 in {1,2}, y2 in {1,2,3}, x = a[y1,y2] over A..F."""
    m = CSPModel()
    x = m.add_var("x", "BCD")
    y1 = m.add_var("y1", [1, 2])
    y2 = m.add_var("y2", [1, 2, 3])
    m.add_const_array("a", [[1, 2], [1, 2, 3]], [list("ABC"), list("DEF")])
    m.add_constraint(ArrayEq(x, "a", (y1, y2)))
    return validate_model(m)


def var_array_model(x_dom, index, cells):
    """One constraint x = a[y...] over an array of variables.

    ``index`` lists the index domains, ``cells`` maps index tuples to cell domains.
    """
    m = CSPModel()
    x = m.add_var("x", x_dom)
    ys = tuple(m.add_var(f"y{i + 1}", d) for i, d in enumerate(index))
    mapping = {key: m.add_var("a[" + ",".join(map(str, key)) + "]", dom, "cell") for key, dom in cells.items()}
    m.add_array("a", mapping)
    m.add_constraint(ArrayEq(x, "a", ys))
    return validate_model(m)


@pytest.fixture
def table():
    return table_model()


@pytest.fixture
def fig2():
    return load("fig2.arr")


@pytest.fixture
def fig3():
    return load("fig3.arr")


@pytest.fixture
def xor_relaxed():
    return load("xor.arr", allow_nonlinear=True)


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
