"""Crossword puzzles as array-constraint models.

Entry variables range over the words that fit; the letters live in a
constant array ``l[word, position]``, and every crossing says
``l[E_i, p] = l[E_j, q]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .core import CSPModel, ModelError, VarNeq
from .expressions import Access, Const, Var, decompose

PAD = "_"


class NoFittingWord(ModelError):
    pass


@dataclass(frozen=True)
class Entry:
    name: str
    row: int
    col: int
    across: bool
    length: int

    def cells(self):
        for p in range(self.length):
            yield (self.row, self.col + p) if self.across else (self.row + p, self.col)


@dataclass
class CrosswordSpec:
    grid: list[str]
    words: list[str]
    entries: list[Entry] = field(init=False)

    def __post_init__(self):
        self.grid = [row.rstrip("\n") for row in self.grid if row.strip()]
        self.words = [w.strip().upper() for w in self.words if w.strip()]
        width = max((len(r) for r in self.grid), default=0)
        self.grid = [r.ljust(width, "#") for r in self.grid]
        bad = {ch for r in self.grid for ch in r} - {"#", "."}
        if bad:
            raise ModelError(f"grid may only contain '#' and '.', found {sorted(bad)}")
        self.entries = _entries(self.grid)

    @classmethod
    def from_files(cls, grid_path, words_path) -> "CrosswordSpec":
        with open(grid_path, encoding="utf-8") as f:
            grid = f.read().splitlines()
        with open(words_path, encoding="utf-8") as f:
            words = f.read().splitlines()
        return cls(grid, words)


def _entries(grid: list[str]) -> list[Entry]:
    """Maximal runs of two or more open cells, across entries first."""
    rows, cols = len(grid), len(grid[0]) if grid else 0
    runs = []
    for r in range(rows):
        runs += [(True, r, c, n) for c, n in _runs(grid[r])]
    for c in range(cols):
        column = "".join(grid[r][c] for r in range(rows))
        runs += [(False, r, c, n) for r, n in _runs(column)]
    return [Entry(f"E{k + 1}", r, c, across, n) for k, (across, r, c, n) in enumerate(runs)]


def _runs(line: str):
    start = None
    for j, ch in enumerate(line + "#"):
        if ch == "." and start is None:
            start = j
        elif ch != "." and start is not None:
            if j - start >= 2:
                yield start, j - start
            start = None


def crossings(spec: CrosswordSpec):
    """(across, pos, down, pos) for every cell two entries share; positions are 1-based."""
    owner: dict[tuple[int, int], list[tuple[Entry, int]]] = {}
    for e in spec.entries:
        for p, cell in enumerate(e.cells(), start=1):
            owner.setdefault(cell, []).append((e, p))
    out = []
    for cell in sorted(owner):
        if len(owner[cell]) == 2:
            (a, pa), (d, pd) = owner[cell]
            out.append((a, pa, d, pd))
    return out


def build_crossword(spec: CrosswordSpec) -> CSPModel:
    if not spec.entries:
        raise ModelError("grid has no entries")
    words = list(dict.fromkeys(spec.words))
    if any(not w for w in words):
        raise ModelError("empty word")
    maxlen = max(len(w) for w in words)
    model = CSPModel()
    for e in spec.entries:
        fitting = [w for w in words if len(w) == e.length]
        if not fitting:
            raise NoFittingWord(f"no word of length {e.length} for entry {e.name}")
        model.add_var(e.name, fitting)
    positions = list(range(1, maxlen + 1))
    table = [[w[p - 1] if p <= len(w) else PAD for p in positions] for w in words]
    model.add_const_array("l", [words, positions], table)
    for a, pa, d, pd in crossings(spec):
        out, _ = decompose(Access("l", (Var(a.name), Const(pa))), Access("l", (Var(d.name), Const(pd))), model)
        for c in out:
            model.add_constraint(c)
    for a, b in combinations(spec.entries, 2):
        model.add_constraint(VarNeq(model.var(a.name), model.var(b.name)))
    return model


def render(spec: CrosswordSpec, assignment: dict) -> str:
    rows = [list(r) for r in spec.grid]
    for e in spec.entries:
        word = assignment[e.name]
        for ch, (r, c) in zip(word, e.cells()):
            rows[r][c] = ch
    return "\n".join("".join(r) for r in rows)
