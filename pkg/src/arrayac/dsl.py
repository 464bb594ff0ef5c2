"""Reader and writer for the model file format.

A model is a sequence of ``;``-terminated declarations::

    enum Dy = {i, j, k};
    var x in {p, q, r};
    vararray a[Dy] in {p, q, r};
    array b[{1, 2}, 1..3] = {{A, B, C}, {D, E, F}};
    constraint y = j;
    constraint x != q;
    constraint x = a[y];
    constraint alldifferent(x, y);

Identifiers that are not variables are symbolic constants. Nested array
expressions are flattened on the way in.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .core import CONST, CELL, FRESH, ArrayEq, CSPModel, ModelError, VarEq, VarNeq, iter_bits
from .expressions import Access, Const, Var, decompose


@dataclass(frozen=True)
class SyntaxIssue:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class ParseError(ModelError):
    def __init__(self, issues: list[SyntaxIssue]):
        self.issues = issues
        super().__init__("\n".join(map(str, issues)))


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|//[^\n]*|%[^\n]*)
  | (?P<str>"[^"\n]*")
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>\.\.|!=|<>|[{}\[\](),;=])
    """,
    re.VERBOSE,
)

KEYWORDS = {"enum", "var", "array", "vararray", "constraint", "in", "alldifferent"}


@dataclass(frozen=True)
class Tok:
    kind: str  # ident | int | str | punct | eof
    text: str
    line: int
    col: int

    @property
    def value(self):
        if self.kind == "int":
            return int(self.text)
        if self.kind == "str":
            return self.text[1:-1]
        return self.text


def tokenize(text: str) -> tuple[list[Tok], list[SyntaxIssue]]:
    toks, issues = [], []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            issues.append(SyntaxIssue(line, col, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            toks.append(Tok(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = m.start() + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks, issues


class _Skip(Exception):
    pass


class Parser:
    def __init__(self, text: str, allow_nonlinear: bool = False):
        self.toks, self.issues = tokenize(text)
        self.i = 0
        self.model = CSPModel()
        self.enums: dict[str, list] = {}
        self.symbols: set = set()
        self.allow_nonlinear = allow_nonlinear

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Tok | None = None):
        tok = tok or self.tok
        self.issues.append(SyntaxIssue(tok.line, tok.col, message))
        raise _Skip

    def advance(self) -> Tok:
        tok = self.tok
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text: str) -> bool:
        return self.tok.kind in ("punct", "ident") and self.tok.text == text

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def ident(self) -> Tok:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def recover(self):
        while self.tok.kind != "eof" and not self.at(";"):
            self.advance()
        if self.at(";"):
            self.advance()

    # -- grammar ---------------------------------------------------------------

    def parse(self) -> CSPModel:
        while self.tok.kind != "eof":
            try:
                self.decl()
                self.expect(";")
            except _Skip:
                self.recover()
            except ModelError as exc:
                self.issues.append(SyntaxIssue(self.tok.line, self.tok.col, str(exc)))
                self.recover()
        if self.issues:
            raise ParseError(sorted(self.issues, key=lambda s: (s.line, s.col)))
        return self.model

    def decl(self):
        start = self.tok
        if self.at("enum"):
            self.advance()
            name = self.ident().text
            self.expect("=")
            self.enums[name] = self.value_set()
        elif self.at("var"):
            self.advance()
            name = self.ident()
            self.expect("in")
            self.declare(name, lambda: self.model.add_var(name.text, self.value_set()))
        elif self.at("array"):
            self.advance()
            name = self.ident()
            dims = self.dims()
            self.expect("=")
            table = self.nested()
            self.declare(name, lambda: self.model.add_const_array(name.text, dims, table))
            self.symbols.update(_flatten(table))
        elif self.at("vararray"):
            self.advance()
            name = self.ident()
            dims = self.dims()
            self.expect("in")
            values = self.value_set()
            self.declare(name, lambda: self.model.add_var_array(name.text, dims, values))
        elif self.at("constraint"):
            self.advance()
            self.constraint()
        else:
            self.error(f"expected a declaration, found {start.text or 'end of input'!r}")

    def declare(self, name: Tok, make):
        if name.text in self.model.names or name.text in self.model.arrays:
            self.error(f"{name.text!r} is already declared", name)
        make()

    def value_set(self) -> list:
        if self.tok.kind == "ident" and not self.at("in"):
            name = self.advance()
            if name.text not in self.enums:
                self.error(f"unknown value set {name.text!r}", name)
            return list(self.enums[name.text])
        if self.tok.kind == "int" and self.toks[self.i + 1].text == "..":
            out = self.item()
            self.symbols.update(out)
            return out
        self.expect("{")
        out = []
        while not self.at("}"):
            out += self.item()
            if not self.at("}"):
                self.expect(",")
        self.advance()
        if len(set(map(_key, out))) != len(out):
            self.error("duplicate value in set")
        self.symbols.update(out)
        return out

    def item(self) -> list:
        tok = self.advance()
        if tok.kind == "int" and self.at(".."):
            self.advance()
            hi = self.tok
            if hi.kind != "int":
                self.error("expected integer after '..'")
            self.advance()
            return list(range(tok.value, hi.value + 1))
        if tok.kind in ("int", "str") or (tok.kind == "ident" and tok.text not in KEYWORDS):
            return [tok.value]
        self.error(f"expected a value, found {tok.text or 'end of input'!r}", tok)

    def dims(self) -> list[list]:
        self.expect("[")
        dims = [self.value_set()]
        while self.at(","):
            self.advance()
            dims.append(self.value_set())
        self.expect("]")
        return dims

    def nested(self):
        if not self.at("{"):
            return self.item()[0]
        self.advance()
        out = [self.nested()]
        while self.at(","):
            self.advance()
            out.append(self.nested())
        self.expect("}")
        return out

    def constraint(self):
        if self.at("alldifferent"):
            self.advance()
            self.expect("(")
            names = [self.ident()]
            while self.at(","):
                self.advance()
                names.append(self.ident())
            self.expect(")")
            ids = [self.var_ref(n) for n in names]
            for a, b in combinations(ids, 2):
                self.model.add_constraint(VarNeq(a, b))
            return
        lhs = self.expr()
        op = self.tok
        if self.at("="):
            self.advance()
            rhs = self.expr()
            out, _ = decompose(lhs, rhs, self.model, self.allow_nonlinear)
            for c in out:
                self.model.add_constraint(c)
        elif self.at("!=") or self.at("<>"):
            self.advance()
            rhs = self.expr()
            if isinstance(lhs, Access) or isinstance(rhs, Access):
                self.error("'!=' takes variables and constants only", op)
            self.model.add_constraint(VarNeq(self._atom_var(lhs), self._atom_var(rhs)))
        else:
            self.error(f"expected '=' or '!=', found {op.text or 'end of input'!r}")

    def _atom_var(self, e) -> int:
        if isinstance(e, Var):
            return self.model.var(e.name)
        return self.model.add_const(e.value)

    def var_ref(self, tok: Tok) -> int:
        if tok.text not in self.model.names:
            self.error(f"unknown variable {tok.text!r}", tok)
        return self.model.names[tok.text]

    def expr(self):
        tok = self.tok
        if tok.kind in ("int", "str"):
            self.advance()
            return Const(tok.value)
        name = self.ident()
        if self.at("["):
            if name.text not in self.model.arrays:
                self.error(f"unknown array {name.text!r}", name)
            self.advance()
            args = [self.expr()]
            while self.at(","):
                self.advance()
                args.append(self.expr())
            self.expect("]")
            arity = self.model.arrays[name.text].arity
            if len(args) != arity:
                self.error(f"array {name.text!r} has arity {arity}, got {len(args)} indices", name)
            return Access(name.text, tuple(args))
        if name.text in self.model.names:
            return Var(name.text)
        if name.text in self.model.arrays:
            self.error(f"array {name.text!r} used without an index", name)
        if name.text in self.symbols:
            return Const(name.text)
        self.error(f"unknown identifier {name.text!r}", name)


def _key(v):
    return (type(v), v)


def _flatten(table):
    if isinstance(table, list):
        for t in table:
            yield from _flatten(t)
    else:
        yield table


def parse_model(text: str, allow_nonlinear: bool = False) -> CSPModel:
    """Parse model text; raises ParseError carrying every positioned issue found."""
    return Parser(text, allow_nonlinear).parse()


# -- printing -----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def format_model(model: CSPModel) -> str:
    """Model text that parses back to a structurally identical model."""
    taken = set(model.names) | set(model.arrays) | KEYWORDS

    def lit(tok):
        if isinstance(tok, int) and not isinstance(tok, bool):
            return str(tok)
        if isinstance(tok, str) and _IDENT.match(tok) and tok not in taken:
            return tok
        if isinstance(tok, str) and '"' not in tok and "\n" not in tok:
            return f'"{tok}"'
        raise ValueError(f"cannot write value {tok!r}")

    def vset(bits):
        return "{" + ", ".join(lit(t) for t in model.tokens(bits)) + "}"

    def ref(v):
        var = model.vars[v]
        if var.kind == CONST:
            return lit(model.values.token(next(iter_bits(model.domains[v]))))
        return var.name

    cell_owner = {}
    for arr in model.arrays.values():
        for v in arr.cells.values():
            cell_owner[v] = arr.name

    lines, done = [], set()
    for vid, var in enumerate(model.vars):
        owner = cell_owner.get(vid)
        if owner is not None:
            if owner not in done:
                done.add(owner)
                lines.append(_format_array(model, model.arrays[owner], lit))
            continue
        if var.kind == CONST:
            continue
        if not _IDENT.match(var.name) or var.name in KEYWORDS:
            raise ValueError(f"cannot write variable name {var.name!r}")
        lines.append(f"var {var.name} in {vset(model.domains[vid])};")
    for c in model.constraints:
        if isinstance(c, ArrayEq):
            lines.append(f"constraint {ref(c.x)} = {c.array}[{', '.join(ref(y) for y in c.index)}];")
        elif isinstance(c, VarEq):
            lines.append(f"constraint {ref(c.x)} = {ref(c.y)};")
        else:
            lines.append(f"constraint {ref(c.x)} != {ref(c.y)};")
    return "\n".join(lines) + "\n"


def _format_array(model, arr, lit) -> str:
    if arr.dims is None:
        raise ValueError(f"array {arr.name!r} has no declared dimensions")
    kinds = {model.vars[v].kind for v in arr.cells.values()}
    dims = ", ".join("{" + ", ".join(lit(model.values.token(i)) for i in d) + "}" for d in arr.dims)
    if kinds == {CONST}:

        def table(prefix, rest):
            if not rest:
                v = arr.cells[prefix]
                return lit(model.values.token(next(iter_bits(model.domains[v]))))
            return "{" + ", ".join(table((*prefix, i), rest[1:]) for i in rest[0]) + "}"

        return f"array {arr.name}[{dims}] = {table((), arr.dims)};"
    doms = {model.domains[v] for v in arr.cells.values()}
    if kinds <= {CELL, FRESH} and len(doms) == 1:
        values = ", ".join(lit(t) for t in model.tokens(doms.pop()))
        return f"vararray {arr.name}[{dims}] in {{{values}}};"
    raise ValueError(f"array {arr.name!r} mixes constants and variables or has uneven cell domains")
