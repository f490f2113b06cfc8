"""Dense integer matrices with Python ints (no overflow)."""

from __future__ import annotations

from typing import Iterable, Sequence


class IntMatrix:
    """Immutable ``rows x cols`` matrix of arbitrary-precision integers.

    Shapes with a zero dimension are kept explicitly so that maps into or out
    of the zero module compose correctly.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Iterable[Sequence[int]], rows: int | None = None,
                 cols: int | None = None):
        ent = tuple(tuple(int(x) for x in r) for r in entries)
        nr = len(ent) if rows is None else rows
        if cols is None:
            if not ent:
                raise ValueError("column count required for a matrix without rows")
            cols = len(ent[0])
        if len(ent) != nr or any(len(r) != cols for r in ent):
            raise ValueError("entry storage does not match the declared shape")
        self.entries = ent
        self.rows = nr
        self.cols = cols

    # constructors
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def block_diagonal(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        nr = sum(b.rows for b in blocks)
        nc = sum(b.cols for b in blocks)
        out = [[0] * nc for _ in range(nr)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.entries):
                out[r0 + i][c0:c0 + b.cols] = row
            r0 += b.rows
            c0 += b.cols
        return cls(out, nr, nc)

    # queries
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.entries]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    # algebra
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self.entries), self.cols, self.rows) if self.rows else \
            IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(row, col) if a) for col in ocols] for row in self.entries],
            self.rows, other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch in addition")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                         self.rows, self.cols)

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * a for a in r] for r in self.entries], self.rows, self.cols)

    def apply(self, vec: Sequence[int]) -> list[int]:
        """Matrix times column vector."""
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        return [sum(a * b for a, b in zip(row, vec) if a) for row in self.entries]

    def select(self, rows: Sequence[int] | None = None,
               cols: Sequence[int] | None = None) -> "IntMatrix":
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return IntMatrix([[self.entries[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def determinant(self) -> int:
        """Exact determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_lists()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_lists()!r}, rows={self.rows}, cols={self.cols})"

    def dump(self) -> str:
        """One row per line, space-separated integers."""
        return "\n".join(" ".join(str(x) for x in r) for r in self.entries)

    @classmethod
    def parse_dump(cls, text: str, cols: int | None = None) -> "IntMatrix":
        rows = [[int(x) for x in line.split()] for line in text.splitlines() if line.strip()]
        if not rows:
            return cls.zeros(0, cols or 0)
        return cls(rows)
