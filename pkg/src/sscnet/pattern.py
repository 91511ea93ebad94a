"""Pattern matrices over the symbols ``0``, ``*`` and ``?`` and their algebra.

A ``0`` entry is fixed at zero, a ``*`` entry is any nonzero real and a ``?``
entry is any real. Matrices are stored as read-only ``int8`` code arrays.
"""
from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ShapeError


class PatternSymbol(enum.IntEnum):
    ZERO = 0
    STAR = 1
    QUEST = 2

    @property
    def char(self) -> str:
        return _CHARS[self]

    @classmethod
    def parse(cls, ch: str) -> "PatternSymbol":
        try:
            return cls(_CODES[ch])
        except KeyError:
            raise ValueError(f"unknown pattern symbol {ch!r}") from None

    def __str__(self):
        return self.char


_CHARS = {0: "0", 1: "*", 2: "?"}
_CODES = {"0": 0, "*": 1, "?": 2}

# Addition and multiplication tables, indexed [a, b] by symbol code.
ADD_TABLE = np.array([[0, 1, 2], [1, 2, 2], [2, 2, 2]], dtype=np.int8)
MUL_TABLE = np.array([[0, 0, 0], [0, 1, 2], [0, 2, 2]], dtype=np.int8)


def sym_add(a: PatternSymbol, b: PatternSymbol) -> PatternSymbol:
    return PatternSymbol(ADD_TABLE[a, b])


def sym_mul(a: PatternSymbol, b: PatternSymbol) -> PatternSymbol:
    return PatternSymbol(MUL_TABLE[a, b])


class PatternMatrix:
    """Immutable ``rows x cols`` grid of pattern symbols.

    Zero-row matrices are allowed so that a one-dimensional node system can
    carry an empty remainder block; parsers reject them at the I/O boundary.
    """

    __slots__ = ("_codes",)

    def __init__(self, codes):
        arr = np.array(codes, dtype=np.int8, copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"pattern matrix must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > 2):
            raise ValueError("pattern codes must lie in {0, 1, 2}")
        arr.setflags(write=False)
        self._codes = arr

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "PatternMatrix":
        """Build from strings such as ``"0 * ?"`` or ``"0*?"``."""
        grid = []
        for line in rows:
            chars = line.split() if " " in line.strip() else list(line.strip())
            grid.append([PatternSymbol.parse(c) for c in chars])
        if len({len(r) for r in grid}) > 1:
            raise ShapeError("ragged pattern rows")
        return cls(np.array(grid, dtype=np.int8).reshape(len(grid), -1 if grid else 0))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PatternMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int8))

    @classmethod
    def identity(cls, n: int) -> "PatternMatrix":
        return cls(np.eye(n, dtype=np.int8))

    @property
    def codes(self) -> np.ndarray:
        return self._codes

    @property
    def shape(self) -> tuple[int, int]:
        return self._codes.shape

    @property
    def rows(self) -> int:
        return self._codes.shape[0]

    @property
    def cols(self) -> int:
        return self._codes.shape[1]

    @property
    def T(self) -> "PatternMatrix":
        return PatternMatrix(self._codes.T)

    def entry(self, i: int, j: int) -> PatternSymbol:
        return PatternSymbol(int(self._codes[i, j]))

    def row(self, i: int) -> "PatternMatrix":
        return PatternMatrix(self._codes[i : i + 1, :])

    def delete_row(self, i: int) -> "PatternMatrix":
        return PatternMatrix(np.delete(self._codes, i, axis=0))

    def __eq__(self, other):
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._codes, other._codes))

    def __hash__(self):
        return hash((self.shape, self._codes.tobytes()))

    def __add__(self, other):
        return pat_add(self, other)

    def __matmul__(self, other):
        return pat_mul(self, other)

    def to_strings(self, sep: str = " ") -> list[str]:
        return [sep.join(_CHARS[int(c)] for c in row) for row in self._codes]

    def __str__(self):
        return "\n".join(self.to_strings())

    def __repr__(self):
        return f"PatternMatrix({self.to_strings(sep='')!r})"


def _shape_mismatch(op, a, b):
    return ShapeError(f"{op}: incompatible shapes {a.shape} and {b.shape}")


def pat_add(m: PatternMatrix, n: PatternMatrix) -> PatternMatrix:
    if m.shape != n.shape:
        raise _shape_mismatch("pattern sum", m, n)
    return PatternMatrix(ADD_TABLE[m.codes, n.codes])


def pat_mul(m: PatternMatrix, n: PatternMatrix) -> PatternMatrix:
    if m.cols != n.rows:
        raise _shape_mismatch("pattern product", m, n)
    return PatternMatrix(kernels.pattern_product(m.codes, n.codes))


def membership(m: PatternMatrix, x) -> bool:
    """True iff the real matrix ``x`` lies in the pattern class of ``m``.

    Exact comparison with zero: the class is a symbolic set.
    """
    x = np.asarray(x)
    if x.shape != m.shape:
        raise ShapeError(f"membership: pattern shape {m.shape} vs matrix shape {x.shape}")
    if not np.all(np.isfinite(x)):
        return False
    codes = m.codes
    return bool(np.all(x[codes == 0] == 0) and np.all(x[codes == 1] != 0))


def _single_star_lines(codes: np.ndarray, axis: int) -> bool:
    # every line along `axis` has exactly one * and zeros elsewhere
    return bool(
        np.all((codes == 1).sum(axis=axis) == 1) and np.all((codes == 2).sum(axis=axis) == 0)
    )


def product_class_exact(m: PatternMatrix, n: PatternMatrix) -> bool:
    """Sufficient test for P(m)P(n) = P(mn).

    Holds when every row of ``n`` or every column of ``m`` carries a single
    ``*`` and zeros elsewhere.
    """
    if m.cols != n.rows:
        raise _shape_mismatch("product_class_exact", m, n)
    return _single_star_lines(n.codes, axis=1) or _single_star_lines(m.codes, axis=0)


def block_diag(blocks: Sequence[PatternMatrix]) -> PatternMatrix:
    if not blocks:
        raise ValueError("block_diag needs at least one block")
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int8)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.codes
        r += b.rows
        c += b.cols
    return PatternMatrix(out)


def stack_rows(blocks: Sequence[PatternMatrix]) -> PatternMatrix:
    if not blocks:
        raise ValueError("stack_rows needs at least one block")
    widths = {b.cols for b in blocks}
    if len(widths) != 1:
        raise ShapeError(f"stack_rows: column counts differ {[b.cols for b in blocks]}")
    return PatternMatrix(np.vstack([b.codes for b in blocks]))


def concat_cols(blocks: Sequence[PatternMatrix]) -> PatternMatrix:
    if not blocks:
        raise ValueError("concat_cols needs at least one block")
    heights = {b.rows for b in blocks}
    if len(heights) != 1:
        raise ShapeError(f"concat_cols: row counts differ {[b.rows for b in blocks]}")
    return PatternMatrix(np.hstack([b.codes for b in blocks]))


def bar(m: PatternMatrix) -> PatternMatrix:
    """Diagonal modification: ``0`` becomes ``*``, anything else becomes ``?``."""
    if m.rows != m.cols:
        raise ShapeError(f"bar needs a square pattern, got {m.shape}")
    out = m.codes.copy()
    d = np.diagonal(out).copy()
    np.fill_diagonal(out, np.where(d == 0, 1, 2))
    return PatternMatrix(out)
