"""Flattening nested array expressions into linear ``x = a[y...]`` and ``x = y``.

Each nested access is replaced by a fresh variable, innermost first and
left to right, so every output constraint has the flat form the engines
handle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .core import ArrayEq, CSPModel, ModelError, NonLinearConstraint, Token, VarEq, repeated_vars


class NonLinearAfterDecomposition(NonLinearConstraint):
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: Token


@dataclass(frozen=True)
class Access:
    array: str
    args: tuple["Expression", ...]


Expression = Union[Var, Const, Access]


def show(e: Expression) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Const):
        return str(e.value)
    return f"{e.array}[{', '.join(show(a) for a in e.args)}]"


def _check(e: Expression, model: CSPModel) -> None:
    if isinstance(e, Var):
        model.var(e.name)
    elif isinstance(e, Access):
        arr = model.arrays.get(e.array)
        if arr is None:
            raise ModelError(f"unknown array {e.array!r}")
        if len(e.args) != arr.arity:
            raise ModelError(f"{show(e)}: array {e.array!r} has arity {arr.arity}")
        for a in e.args:
            _check(a, model)


def _cell_union(model: CSPModel, array: str) -> int:
    bits = 0
    for v in model.arrays[array].cells.values():
        bits |= model.domains[v]
    return bits


class _Flattener:
    def __init__(self, model: CSPModel):
        self.model = model
        self.out: list = []
        self.fresh: list[int] = []

    def var_for(self, e: Expression) -> int:
        if isinstance(e, Var):
            return self.model.var(e.name)
        if isinstance(e, Const):
            return self.model.add_const(e.value)
        index = tuple(self.var_for(a) for a in e.args)
        v = self.model.fresh_var(_cell_union(self.model, e.array))
        self.fresh.append(v)
        self.out.append(ArrayEq(v, e.array, index))
        return v

    def access(self, x: int, e: Access) -> None:
        index = tuple(self.var_for(a) for a in e.args)
        self.out.append(ArrayEq(x, e.array, index))


def decompose(lhs: Expression, rhs: Expression, model: CSPModel, allow_nonlinear: bool = False):
    """Flatten ``lhs = rhs``, adding fresh variables and constants to ``model``.

    Returns ``(constraints, fresh_vars)``; the constraints are not added to
    the model. A fresh variable starts with the union of the cell domains of
    the array it stands for.
    """
    _check(lhs, model)
    _check(rhs, model)
    f = _Flattener(model)
    if isinstance(lhs, Access) and isinstance(rhs, Access):
        # two lookups meeting in one value: share it through a fresh variable
        left = tuple(f.var_for(a) for a in lhs.args)
        right = tuple(f.var_for(a) for a in rhs.args)
        v = model.fresh_var(_cell_union(model, lhs.array) | _cell_union(model, rhs.array))
        f.fresh.append(v)
        f.out += [ArrayEq(v, lhs.array, left), ArrayEq(v, rhs.array, right)]
    elif isinstance(rhs, Access):
        f.access(f.var_for(lhs), rhs)
    elif isinstance(lhs, Access):
        f.access(f.var_for(rhs), lhs)
    else:
        f.out.append(VarEq(f.var_for(lhs), f.var_for(rhs)))
    if not allow_nonlinear:
        for c in f.out:
            dup = repeated_vars(model, c)
            if dup and isinstance(c, ArrayEq):
                names = ", ".join(model.vars[v].name for v in dup)
                raise NonLinearAfterDecomposition(f"{show(lhs)} = {show(rhs)}: {names} repeated")
    return f.out, f.fresh
