"""Integer lattices: Smith normal form with transforms, saturation, invariants."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from ..errors import DimensionMismatch, NonCommuting, NotUnipotent
from .matrix import Matrix


def _int_rows(m: Matrix) -> list[list[int]]:
    if not m.is_integral():
        raise ValueError("matrix must have integer entries")
    return [[int(x) for x in row] for row in m.to_lists()]


def _as_matrix(rows: list[list[int]], ncols: int) -> Matrix:
    return Matrix.from_rows(rows, ncols) if rows else Matrix.zeros(0, ncols)


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with m = U·D·V, U and V unimodular, D = diag(d_1 | d_2 | ...)."""
    a = _int_rows(m)
    r, c = m.nrows, m.ncols
    u = _identity(r)  # invariant: m = u · a · v
    v = _identity(c)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for row in u:  # u ← u · P_ij
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        v[i], v[j] = v[j], v[i]

    def add_row(dst, src, k):  # a[dst] += k·a[src]
        if k == 0:
            return
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        for row in u:  # u ← u · (I − k e_{dst,src})
            row[src] -= k * row[dst]

    def add_col(dst, src, k):  # column dst += k·column src
        if k == 0:
            return
        for row in a:
            row[dst] += k * row[src]
        v[src] = [x - k * y for x, y in zip(v[src], v[dst])]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        for row in u:
            row[i] = -row[i]

    t = 0
    while t < min(r, c):
        entries = [(abs(a[i][j]), i, j) for i in range(t, r) for j in range(t, c) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, r):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        done = False
                        swap_rows(t, i)
            for j in range(t + 1, c):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        done = False
                        swap_cols(t, j)
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    return _as_matrix(u, r), _as_matrix(a, c), _as_matrix(v, c)


def elementary_divisors(m: Matrix) -> list[int]:
    _, d, _ = smith_form(m)
    return [int(d[i, i]) for i in range(min(d.nrows, d.ncols))]


def saturate(rows: Matrix) -> Matrix:
    """Z-basis (rows) of Z^n ∩ span_Q(rows)."""
    n = rows.ncols
    if rows.nrows == 0:
        return Matrix.zeros(0, n)
    basis, _ = rows.rref()
    # clear denominators row by row
    ints = []
    for row in basis.to_lists():
        den = 1
        for x in row:
            den = den * x.denominator // gcd(den, x.denominator)
        ints.append([int(x * den) for x in row])
    mi = _as_matrix(ints, n)
    _, d, v = smith_form(mi)
    k = sum(1 for i in range(min(d.nrows, d.ncols)) if d[i, i] != 0)
    return v.submatrix(range(k), range(n))


def hermite_rows(rows: Matrix) -> Matrix:
    """Row-style Hermite normal form of an integer matrix, zero rows dropped."""
    a = _int_rows(rows)
    n = rows.ncols
    out: list[list[int]] = []
    r = 0
    for col in range(n):
        nz = [i for i in range(r, len(a)) if a[i][col]]
        if not nz:
            continue
        while True:
            nz = [i for i in range(r, len(a)) if a[i][col]]
            piv = min(nz, key=lambda i: abs(a[i][col]))
            a[r], a[piv] = a[piv], a[r]
            others = [i for i in range(r + 1, len(a)) if a[i][col]]
            if not others:
                break
            for i in others:
                q = a[i][col] // a[r][col]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        if a[r][col] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][col] // a[r][col]
            a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    out = [row for row in a[:r]]
    return _as_matrix(out, n)


@dataclass(frozen=True)
class LatticeSubgroup:
    """Subgroup of Z^n (or of Q^n, for rational generators) spanned by the rows of ``generators``."""

    ambient_rank: int
    generators: Matrix
    _smith: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.generators.ncols != self.ambient_rank:
            raise DimensionMismatch("generator length differs from ambient rank")
        den = self.common_denominator()
        scaled = self.generators.scale(den)
        object.__setattr__(self, "_smith", smith_form(scaled) if scaled.nrows else None)

    @classmethod
    def standard(cls, n: int) -> "LatticeSubgroup":
        return cls(n, Matrix.identity(n))

    def common_denominator(self) -> int:
        den = 1
        for x in self.generators.entries():
            den = den * x.denominator // gcd(den, x.denominator)
        return den

    @property
    def smith(self):
        return self._smith

    def rank(self) -> int:
        if self._smith is None:
            return 0
        d = self._smith[1]
        return sum(1 for i in range(min(d.nrows, d.ncols)) if d[i, i] != 0)

    def basis(self) -> Matrix:
        """A Z-basis as rows (Hermite form of the generators)."""
        den = self.common_denominator()
        if self.generators.nrows == 0:
            return Matrix.zeros(0, self.ambient_rank)
        return hermite_rows(self.generators.scale(den)).scale(Fraction(1, den))

    def contains(self, v: Sequence) -> bool:
        b = self.basis()
        if b.nrows == 0:
            return all(x == 0 for x in v)
        x = b.T.solve_particular(Matrix.from_rows([[t] for t in v], 1))
        return x is not None and x.is_integral()

    def index_in(self, other: "LatticeSubgroup") -> int:
        """[other : self] for full-rank sublattices of the same rank."""
        bs, bo = self.basis(), other.basis()
        if bs.nrows != bo.nrows or bs.nrows != self.ambient_rank:
            raise ValueError("index needs full-rank lattices of equal rank")
        return abs(int(bs.det() / bo.det()))


def invariants_rank(gs: Sequence[Matrix], n: int | None = None, assert_unipotent: bool = True) -> int:
    """Rank over Q of the common fixed space of the gs."""
    gs = list(gs)
    if not gs:
        if n is None:
            raise ValueError("ambient rank needed for an empty sequence")
        return n
    n = gs[0].nrows
    for g in gs:
        if g.shape != (n, n):
            raise DimensionMismatch("operators must be square of equal size")
    for i, g in enumerate(gs):
        for h in gs[i + 1:]:
            if not g.commutes_with(h):
                raise NonCommuting("invariants_rank needs pairwise commuting operators")
    one = Matrix.identity(n)
    if assert_unipotent:
        for g in gs:
            if not (g - one).is_nilpotent():
                raise NotUnipotent("operator is not unipotent")
    stack = Matrix.vstack([g - one for g in gs])
    return n - stack.rank()
