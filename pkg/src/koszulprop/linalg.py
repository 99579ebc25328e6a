"""Exact sparse linear algebra over Q and chain-complex homology.

Matrices are stored as ``{row: {col: Fraction}}``.  Elimination works on
integer rows (denominators cleared, rows divided by their content after
every step), so no intermediate fractions are ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping


class DifferentialError(ValueError):
    """Raised when a composite of consecutive boundaries is nonzero."""

    def __init__(self, degree, witness=None):
        self.degree = degree
        self.witness = witness
        super().__init__(f"d^2 != 0 out of degree {degree} (witness entry {witness})")


@dataclass
class RationalMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for r, row in self.entries.items():
            if not 0 <= r < self.rows:
                raise IndexError(f"row {r} out of range for {self.rows} rows")
            nz = {}
            for c, v in row.items():
                if not 0 <= c < self.cols:
                    raise IndexError(f"column {c} out of range for {self.cols} columns")
                if v:
                    nz[c] = Fraction(v)
            if nz:
                clean[r] = nz
        self.entries = clean

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n):
        return cls(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @classmethod
    def from_dense(cls, rows_list):
        rows_list = [list(r) for r in rows_list]
        nr = len(rows_list)
        nc = len(rows_list[0]) if nr else 0
        return cls(nr, nc, {i: {j: v for j, v in enumerate(r) if v} for i, r in enumerate(rows_list)})

    @classmethod
    def from_columns(cls, rows, columns: Iterable[Mapping[int, Fraction]]):
        columns = list(columns)
        ent: dict = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    ent.setdefault(i, {})[j] = Fraction(v)
        return cls(rows, len(columns), ent)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, rc):
        r, c = rc
        return self.entries.get(r, {}).get(c, Fraction(0))

    def nnz(self):
        return sum(len(r) for r in self.entries.values())

    def is_zero(self):
        return not self.entries

    def to_dense(self):
        return [[self[i, j] for j in range(self.cols)] for i in range(self.rows)]

    def transpose(self):
        ent: dict = {}
        for r, row in self.entries.items():
            for c, v in row.items():
                ent.setdefault(c, {})[r] = v
        return RationalMatrix(self.cols, self.rows, ent)

    def column(self, j):
        return {r: row[j] for r, row in self.entries.items() if j in row}

    def columns(self):
        cols: list = [dict() for _ in range(self.cols)]
        for r, row in self.entries.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out: dict = {}
        for r, row in self.entries.items():
            acc: dict = {}
            for k, a in row.items():
                orow = other.entries.get(k)
                if not orow:
                    continue
                for c, b in orow.items():
                    acc[c] = acc.get(c, 0) + a * b
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                out[r] = acc
        return RationalMatrix(self.rows, other.cols, out)

    def apply(self, vec: Mapping[int, Fraction]) -> dict:
        out: dict = {}
        for r, row in self.entries.items():
            s = sum((row[c] * v for c, v in vec.items() if c in row), Fraction(0))
            if s:
                out[r] = s
        return out

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.shape == other.shape and self.entries == other.entries

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def block_diagonal(blocks):
    rows = cols = 0
    ent: dict = {}
    for b in blocks:
        for r, row in b.entries.items():
            ent[rows + r] = {cols + c: v for c, v in row.items()}
        rows += b.rows
        cols += b.cols
    return RationalMatrix(rows, cols, ent)


# -- integer row elimination -------------------------------------------------

def _integer_row(row: Mapping[int, Fraction]) -> dict:
    den = 1
    for v in row.values():
        den = lcm(den, Fraction(v).denominator)
    irow = {c: int(Fraction(v) * den) for c, v in row.items() if v}
    return _primitive(irow)


def _primitive(irow: dict) -> dict:
    g = 0
    for v in irow.values():
        g = gcd(g, v)
        if g == 1:
            return irow
    if g > 1:
        irow = {c: v // g for c, v in irow.items()}
    return irow


def _eliminate(rows, pivots):
    """Reduce each row against ``pivots`` ({col: int row}) and add new pivots.

    Pivot choice: smallest column index, which keeps the echelon form
    deterministic for a fixed column order.
    """
    for row in rows:
        row = dict(row)
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                pivots[c] = row
                break
            a, b = p[c], row[c]
            new = {k: a * v for k, v in row.items()}
            for k, v in p.items():
                t = new.get(k, 0) - b * v
                if t:
                    new[k] = t
                else:
                    new.pop(k, None)
            row = _primitive(new)
    return pivots


def echelon(rows: Iterable[Mapping[int, Fraction]]) -> dict:
    """Fraction-free row echelon form: ``{pivot column: primitive int row}``."""
    return _eliminate((_integer_row(r) for r in rows), {})


def reduced_echelon(rows: Iterable[Mapping[int, Fraction]]) -> dict:
    """Reduced echelon form with unit pivots: ``{pivot col: {col: Fraction}}``."""
    piv = echelon(rows)
    order = sorted(piv)
    red: dict = {}
    for c in reversed(order):
        row = {k: Fraction(v) for k, v in piv[c].items()}
        for k in [k for k in row if k != c and k in red]:
            f = row[k]
            for kk, vv in red[k].items():
                t = row.get(kk, 0) - f * vv
                if t:
                    row[kk] = t
                else:
                    row.pop(kk, None)
        lead = row[c]
        red[c] = {k: v / lead for k, v in row.items()}
    return red


def rank(M: RationalMatrix) -> int:
    # eliminate along the shorter side
    if M.rows <= M.cols:
        return len(echelon(M.entries.values()))
    return len(echelon(M.transpose().entries.values()))


def kernel_basis(M: RationalMatrix) -> RationalMatrix:
    """Columns spanning ker(M), one per non-pivot column of rref(M)."""
    red = reduced_echelon(M.entries.values())
    free = [c for c in range(M.cols) if c not in red]
    cols = []
    for f in free:
        v = {f: Fraction(1)}
        for p, row in red.items():
            a = row.get(f)
            if a:
                v[p] = -a
        cols.append(v)
    return RationalMatrix.from_columns(M.cols, cols)


def column_space_basis(vectors):
    """Indices of a maximal independent subset of ``vectors`` (greedy, in order)."""
    pivots: dict = {}
    keep = []
    for i, v in enumerate(vectors):
        before = len(pivots)
        _eliminate([_integer_row(v)], pivots)
        if len(pivots) > before:
            keep.append(i)
    return keep


@dataclass
class ChainComplex:
    """``dims[i]`` is the dimension in degree ``lowest + i``;
    ``boundaries[i]`` maps degree ``lowest + i`` to degree ``lowest + i - 1``
    (the lowest boundary has 0 rows)."""

    dims: list
    boundaries: list
    lowest: int = 0

    def __post_init__(self):
        if len(self.boundaries) != len(self.dims):
            raise ValueError("need one boundary per degree")
        for i, (d, b) in enumerate(zip(self.dims, self.boundaries)):
            below = self.dims[i - 1] if i > 0 else 0
            if b.cols != d or b.rows != below:
                raise ValueError(f"boundary out of degree {self.lowest + i} has shape {b.shape}, "
                                 f"expected ({below}, {d})")

    @classmethod
    def from_maps(cls, dims, maps, lowest=0):
        """``maps[i]``: degree lowest+i+1 -> lowest+i."""
        bnd = [RationalMatrix.zeros(0, dims[0])] + list(maps)
        return cls(list(dims), bnd, lowest)

    def check_d_squared(self):
        for i in range(1, len(self.dims)):
            comp = self.boundaries[i - 1] @ self.boundaries[i]
            if not comp.is_zero():
                r = min(comp.entries)
                c = min(comp.entries[r])
                raise DifferentialError(self.lowest + i, (r, c, comp.entries[r][c]))

    def euler_characteristic(self):
        return sum((-1) ** (self.lowest + i) * d for i, d in enumerate(self.dims))


def homology_dims(C: ChainComplex, check=True) -> list:
    if check:
        C.check_d_squared()
    ranks = [rank(b) for b in C.boundaries] + [0]
    return [C.dims[i] - ranks[i] - ranks[i + 1] for i in range(len(C.dims))]
