"""Values, bit-set domains, model structure and model validation."""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field, fields
from typing import Hashable, Iterable, Iterator, Sequence

Token = Hashable


class ModelError(Exception):
    """Base class for errors raised while building or checking a model."""


class NonLinearConstraint(ModelError):
    pass


class InvalidIndex(ModelError):
    pass


class EmptyInitialDomain(ModelError):
    pass


class ValueNotInDomain(ModelError):
    pass


class UnknownName(ModelError):
    pass


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the positions of set bits in ascending order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bits_of(ids: Iterable[int]) -> int:
    bits = 0
    for i in ids:
        bits |= 1 << i
    return bits


class Interner:
    """Bijection between user tokens and dense integer ids, in first-seen order."""

    def __init__(self, tokens: Iterable[Token] = ()):
        self._tokens: list[Token] = []
        self._ids: dict[tuple[type, Token], int] = {}
        for tok in tokens:
            self.intern(tok)

    @staticmethod
    def _key(token):
        # keep 1 and True (and 1 and "1") apart
        return (type(token), token)

    def intern(self, token: Token) -> int:
        key = self._key(token)
        vid = self._ids.get(key)
        if vid is None:
            vid = len(self._tokens)
            self._ids[key] = vid
            self._tokens.append(token)
        return vid

    def lookup(self, token: Token) -> int | None:
        return self._ids.get(self._key(token))

    def token(self, vid: int) -> Token:
        return self._tokens[vid]

    def __contains__(self, token) -> bool:
        return self._key(token) in self._ids

    def __len__(self) -> int:
        return len(self._tokens)

    def __iter__(self):
        return iter(self._tokens)


@dataclass(frozen=True)
class Domain:
    """Immutable finite set of interned value ids, stored as a bit-set."""

    bits: int = 0

    @classmethod
    def of(cls, ids: Iterable[int]) -> "Domain":
        return cls(bits_of(ids))

    def __iter__(self):
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, vid: int) -> bool:
        return vid >= 0 and (self.bits >> vid) & 1 == 1

    def __and__(self, other: "Domain") -> "Domain":
        return Domain(self.bits & other.bits)

    def __or__(self, other: "Domain") -> "Domain":
        return Domain(self.bits | other.bits)

    def __sub__(self, other: "Domain") -> "Domain":
        return Domain(self.bits & ~other.bits)

    def issubset(self, other: "Domain") -> bool:
        return self.bits & ~other.bits == 0

    def isdisjoint(self, other: "Domain") -> bool:
        return self.bits & other.bits == 0

    def __repr__(self) -> str:
        return f"Domain({sorted(self)})"


# Variable kinds. A variable's role in a constraint (result, index, cell) is
# positional; the kind only records how the variable came into being.
PLAIN = "plain"
CELL = "cell"
CONST = "const"
FRESH = "fresh"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = PLAIN


@dataclass
class ArrayDef:
    """An n-ary array: constant index tuples (of value ids) mapped to variable ids."""

    name: str
    arity: int
    cells: dict[tuple[int, ...], int] = field(default_factory=dict)
    dims: tuple[tuple[int, ...], ...] | None = None

    def cell(self, index: tuple[int, ...]) -> int:
        return self.cells[index]


@dataclass(frozen=True)
class ArrayEq:
    """``x = array[index...]``."""

    x: int
    array: str
    index: tuple[int, ...]


@dataclass(frozen=True)
class VarEq:
    x: int
    y: int


@dataclass(frozen=True)
class VarNeq:
    x: int
    y: int


Constraint = ArrayEq | VarEq | VarNeq


@dataclass
class PropagationStats:
    runs: int = 0
    cell_domain_reads: int = 0
    t_computations: int = 0
    values_pruned: int = 0
    skipped_indices: int = 0
    rule_applications: int = 0
    backtracks: int = 0
    nodes: int = 0

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def add(self, other: "PropagationStats") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))


class CSPModel:
    """Variables with initial domains, arrays and constraints.

    Domains are held as a list of bit-set ints indexed by variable id; the
    engines copy that list and never touch the model itself.
    """

    def __init__(self, values: Interner | None = None):
        self.values = values if values is not None else Interner()
        self.vars: list[Variable] = []
        self.domains: list[int] = []
        self.names: dict[str, int] = {}
        self.arrays: dict[str, ArrayDef] = {}
        self.constraints: list[Constraint] = []
        self.relaxed: frozenset[int] = frozenset()
        self.validated = False
        self._watchers: list[list[int]] | None = None

    # -- construction ------------------------------------------------------

    def value_ids(self, tokens: Iterable[Token]) -> int:
        return bits_of(self.values.intern(t) for t in tokens)

    def add_var(self, name: str, tokens: Iterable[Token], kind: str = PLAIN) -> int:
        if name in self.names:
            raise ModelError(f"duplicate variable {name!r}")
        vid = len(self.vars)
        self.vars.append(Variable(name, kind))
        self.domains.append(self.value_ids(tokens))
        self.names[name] = vid
        self._watchers = None
        return vid

    def add_const(self, token: Token) -> int:
        """A fresh variable fixed to ``token``; every call makes a new one."""
        n = len(self.vars)
        return self.add_var(f"#{n}:{token}", [token], CONST)

    def fresh_var(self, bits: int, prefix: str = "_v") -> int:
        n = 1
        while f"{prefix}{n}" in self.names:
            n += 1
        vid = self.add_var(f"{prefix}{n}", [], FRESH)
        self.domains[vid] = bits
        return vid

    def add_const_array(self, name: str, dims: Sequence[Sequence[Token]], table) -> ArrayDef:
        """Array of constants; ``table`` is nested by dimension in ``dims`` order."""
        arr = self._new_array(name, dims)
        for key, tokens in _walk(dims, table):
            cell = self.add_var(_cell_name(name, tokens), [key], CONST)
            arr.cells[tuple(self.values.intern(t) for t in tokens)] = cell
        return arr

    def add_var_array(self, name: str, dims: Sequence[Sequence[Token]], tokens: Iterable[Token]) -> ArrayDef:
        arr = self._new_array(name, dims)
        tokens = list(tokens)
        for idx in _product(dims):
            cell = self.add_var(_cell_name(name, idx), tokens, CELL)
            arr.cells[tuple(self.values.intern(t) for t in idx)] = cell
        return arr

    def add_array(self, name: str, cells: dict[tuple[Token, ...], int]) -> ArrayDef:
        """Array over existing variables; keys are token tuples."""
        if name in self.arrays:
            raise ModelError(f"duplicate array {name!r}")
        arities = {len(k) for k in cells}
        if len(arities) != 1:
            raise ModelError(f"array {name!r}: index tuples must share one arity")
        arr = ArrayDef(name, arities.pop())
        for key, var in cells.items():
            arr.cells[tuple(self.values.intern(t) for t in key)] = var
        self.arrays[name] = arr
        self._watchers = None
        return arr

    def _new_array(self, name, dims) -> ArrayDef:
        if name in self.arrays:
            raise ModelError(f"duplicate array {name!r}")
        dim_ids = tuple(tuple(self.values.intern(t) for t in d) for d in dims)
        arr = ArrayDef(name, len(dims), {}, dim_ids)
        self.arrays[name] = arr
        self._watchers = None
        return arr

    def add_constraint(self, c: Constraint) -> None:
        self.constraints.append(c)
        self._watchers = None

    # -- access --------------------------------------------------------------

    def var(self, name: str) -> int:
        try:
            return self.names[name]
        except KeyError:
            raise UnknownName(name) from None

    def domain(self, name_or_id, domains: Sequence[int] | None = None) -> set:
        vid = self.var(name_or_id) if isinstance(name_or_id, str) else name_or_id
        bits = (domains if domains is not None else self.domains)[vid]
        return {self.values.token(i) for i in iter_bits(bits)}

    def tokens(self, bits: int) -> list:
        return [self.values.token(i) for i in iter_bits(bits)]

    def constraint_vars(self, c: Constraint) -> list[int]:
        """Variables of ``c`` with repetitions, in x, index, cells order."""
        if isinstance(c, ArrayEq):
            return [c.x, *c.index, *self.arrays[c.array].cells.values()]
        return [c.x, c.y]

    def watchers(self) -> list[list[int]]:
        """For each variable, the ids of constraints it occurs in."""
        if self._watchers is None:
            w: list[list[int]] = [[] for _ in self.vars]
            for cid, c in enumerate(self.constraints):
                for v in dict.fromkeys(self.constraint_vars(c)):
                    w[v].append(cid)
            self._watchers = w
        return self._watchers

    def copy(self) -> "CSPModel":
        other = copy.copy(self)
        other.vars = list(self.vars)
        other.domains = list(self.domains)
        other.names = dict(self.names)
        other.arrays = {k: ArrayDef(a.name, a.arity, dict(a.cells), a.dims) for k, a in self.arrays.items()}
        other.constraints = list(self.constraints)
        other.values = copy.deepcopy(self.values)
        other._watchers = None
        return other

    def signature(self):
        """Structure with ids replaced by tokens and names; constants by value."""

        def ref(v):
            var = self.vars[v]
            if var.kind == CONST:
                return ("const", self.values.token(next(iter_bits(self.domains[v]))))
            return var.name

        def toks(bits):
            return tuple(sorted(map(repr, self.tokens(bits))))

        variables = tuple(
            sorted(
                (var.name, PLAIN if var.kind == FRESH else var.kind, toks(self.domains[i]))
                for i, var in enumerate(self.vars)
                if var.kind != CONST
            )
        )
        arrays = []
        for name in sorted(self.arrays):
            arr = self.arrays[name]
            cells = tuple(
                sorted((tuple(repr(self.values.token(i)) for i in key), repr(ref(v))) for key, v in arr.cells.items())
            )
            arrays.append((name, arr.arity, cells))
        cons = []
        for c in self.constraints:
            if isinstance(c, ArrayEq):
                cons.append(("arr", ref(c.x), c.array, tuple(ref(v) for v in c.index)))
            else:
                cons.append((type(c).__name__, ref(c.x), ref(c.y)))
        return variables, tuple(arrays), tuple(cons)


def _cell_name(array: str, tokens) -> str:
    return f"{array}[{','.join(str(t) for t in tokens)}]"


def _product(dims):
    if not dims:
        yield ()
        return
    for head in dims[0]:
        for rest in _product(dims[1:]):
            yield (head, *rest)


def _walk(dims, table, prefix=()):
    if not dims:
        yield table, prefix
        return
    if len(table) != len(dims[0]):
        raise ModelError(f"array table has {len(table)} entries where {len(dims[0])} are needed")
    for tok, sub in zip(dims[0], table):
        yield from _walk(dims[1:], sub, (*prefix, tok))


# -- validation ---------------------------------------------------------------


def repeated_vars(model: CSPModel, c: Constraint) -> list[int]:
    seen, dup = set(), []
    for v in model.constraint_vars(c):
        if v in seen and v not in dup:
            dup.append(v)
        seen.add(v)
    return dup


def validate_model(model: CSPModel, allow_nonlinear: bool = False) -> CSPModel:
    """Check the model and return a validated copy.

    Raises the first problem found; the exception's ``errors`` attribute
    lists all of them. With ``allow_nonlinear`` a repeated variable inside an
    array constraint is tolerated and the constraint id is put in
    ``relaxed``: the rules stay sound there but may not reach arc-consistency.
    """
    errors: list[ModelError] = []
    relaxed = set()
    for vid, bits in enumerate(model.domains):
        if not bits:
            errors.append(EmptyInitialDomain(f"variable {model.vars[vid].name!r} has an empty domain"))
    for arr in model.arrays.values():
        if len(set(arr.cells.values())) != len(arr.cells):
            errors.append(NonLinearConstraint(f"array {arr.name!r} maps two indices to one variable"))
    for cid, c in enumerate(model.constraints):
        if isinstance(c, ArrayEq):
            arr = model.arrays.get(c.array)
            if arr is None:
                errors.append(UnknownName(f"unknown array {c.array!r}"))
                continue
            if len(c.index) != arr.arity:
                errors.append(ModelError(f"constraint {cid}: {len(c.index)} indices for {arr.arity}-ary array {arr.name!r}"))
                continue
            missing = _first_unmapped(model, c)
            if missing is not None:
                shown = ",".join(str(model.values.token(i)) for i in missing)
                errors.append(InvalidIndex(f"constraint {cid}: index ({shown}) not in array {arr.name!r}"))
        dup = repeated_vars(model, c)
        if dup:
            if allow_nonlinear and isinstance(c, ArrayEq):
                relaxed.add(cid)
            elif isinstance(c, ArrayEq):
                names = ", ".join(model.vars[v].name for v in dup)
                errors.append(NonLinearConstraint(f"constraint {cid}: variable(s) {names} occur more than once"))
    if errors:
        err = errors[0]
        err.errors = errors
        raise err
    out = model.copy()
    out.relaxed = frozenset(relaxed)
    out.validated = True
    return out


def _first_unmapped(model, c: ArrayEq):
    cells = model.arrays[c.array].cells
    for idx in index_tuples(model.domains, c.index):
        if idx not in cells:
            return idx
    return None


def index_tuples(domains: Sequence[int], index: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Lexicographic enumeration of D_{y1} x ... x D_{yn} (value-id tuples)."""
    pools = [list(iter_bits(domains[y])) for y in index]
    if any(not p for p in pools):
        return iter(())
    return itertools.product(*pools)


def instantiate(model: CSPModel, var, value: Token) -> CSPModel:
    """Copy of ``model`` with the domain of ``var`` replaced by ``{value}``."""
    vid = model.var(var) if isinstance(var, str) else var
    val = model.values.lookup(value)
    if val is None or not (model.domains[vid] >> val) & 1:
        raise ValueNotInDomain(f"{value!r} is not in the domain of {model.vars[vid].name!r}")
    out = model.copy()
    out.domains[vid] = 1 << val
    return out
