"""Immutable exact matrices over Q and Q(i).

Rational matrices are backed by python-flint's ``fmpq_mat``; a Gaussian
matrix is stored as a pair (real part, imaginary part) of rational matrices.
Row reduction over Q(i) is done in pure Python since those matrices stay small.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

from flint import fmpq, fmpq_mat

from ..errors import DimensionMismatch, NotNilpotent
from .scalars import GaussRational, as_fraction, normalize_scalar


def _to_fmpq(x: Fraction) -> fmpq:
    return fmpq(x.numerator, x.denominator)


def _to_frac(x: fmpq) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _flint_from_flat(r: int, c: int, flat: Sequence) -> fmpq_mat:
    if r == 0 or c == 0:
        return fmpq_mat(r, c)
    return fmpq_mat(r, c, list(flat))


class Matrix:
    """Exact matrix; entries are Fraction (rational case) or GaussRational."""

    __slots__ = ("_re", "_im", "_hash", "_flat")

    def __init__(self, re: fmpq_mat, im: fmpq_mat | None = None):
        if im is not None:
            if im.nrows() != re.nrows() or im.ncols() != re.ncols():
                raise DimensionMismatch("real and imaginary parts differ in shape")
            if not im:
                im = None
        self._re = re
        self._im = im
        self._hash = None
        self._flat = None

    def _re_flat(self) -> list:
        """Cached flint entries of the real part (matrices are immutable)."""
        if self._flat is None:
            self._flat = self._re.entries()
        return self._flat

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty row list")
            ncols = len(rows[0])
        re_flat, im_flat, complex_seen = [], [], False
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
            for x in r:
                if isinstance(x, GaussRational):
                    re_flat.append(_to_fmpq(x.re))
                    im_flat.append(_to_fmpq(x.im))
                    complex_seen = complex_seen or x.im != 0
                else:
                    re_flat.append(_to_fmpq(as_fraction(x)))
                    im_flat.append(fmpq(0))
        re = _flint_from_flat(len(rows), ncols, re_flat)
        im = _flint_from_flat(len(rows), ncols, im_flat) if complex_seen else None
        return cls(re, im)

    @classmethod
    def from_flat(cls, nrows: int, ncols: int, flat: Sequence) -> "Matrix":
        if len(flat) != nrows * ncols:
            raise DimensionMismatch("entry count does not match shape")
        return cls.from_rows([flat[i * ncols:(i + 1) * ncols] for i in range(nrows)], ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(fmpq_mat(nrows, ncols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = fmpq_mat(n, n)
        for i in range(n):
            m[i, i] = 1
        return cls(m)

    @classmethod
    def unit(cls, nrows: int, ncols: int, i: int, j: int, value=1) -> "Matrix":
        m = Matrix.zeros(nrows, ncols).to_lists()
        m[i][j] = value
        return cls.from_rows(m, ncols)

    @classmethod
    def diag(cls, entries: Sequence) -> "Matrix":
        n = len(entries)
        rows = [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(rows, n)

    @classmethod
    def block_diag(cls, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.nrows for b in blocks)
        m = sum(b.ncols for b in blocks)
        out = [[0] * m for _ in range(n)]
        r0 = c0 = 0
        for b in blocks:
            for i, row in enumerate(b.to_lists()):
                out[r0 + i][c0:c0 + b.ncols] = row
            r0 += b.nrows
            c0 += b.ncols
        return cls.from_rows(out, m)

    @classmethod
    def vstack(cls, mats: Sequence["Matrix"], ncols: int | None = None) -> "Matrix":
        mats = list(mats)
        if not mats:
            return cls.zeros(0, ncols or 0)
        c = mats[0].ncols
        if any(m.ncols != c for m in mats):
            raise DimensionMismatch("vstack with differing column counts")
        r = sum(m.nrows for m in mats)
        re = _flint_from_flat(r, c, [x for m in mats for x in m._re_flat()])
        if any(m._im is not None for m in mats):
            im = _flint_from_flat(r, c, [x for m in mats for x in m._imag_flint().entries()])
        else:
            im = None
        return cls(re, im)

    @classmethod
    def hstack(cls, mats: Sequence["Matrix"]) -> "Matrix":
        mats = list(mats)
        if not mats:
            return cls.zeros(0, 0)
        r = mats[0].nrows
        if any(m.nrows != r for m in mats):
            raise DimensionMismatch("hstack with differing row counts")
        c = sum(m.ncols for m in mats)

        def glue(flats):
            out = []
            for i in range(r):
                for e, w in flats:
                    out.extend(e[i * w:(i + 1) * w])
            return _flint_from_flat(r, c, out)

        re = glue([(m._re_flat(), m.ncols) for m in mats])
        im = None
        if any(m._im is not None for m in mats):
            im = glue([(m._imag_flint().entries(), m.ncols) for m in mats])
        return cls(re, im)

    @classmethod
    def _from_parts(cls, re: fmpq_mat, im: fmpq_mat | None) -> "Matrix":
        return cls(re, im)

    # basic accessors ----------------------------------------------------
    @property
    def nrows(self) -> int:
        return self._re.nrows()

    @property
    def ncols(self) -> int:
        return self._re.ncols()

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def is_rational(self) -> bool:
        return self._im is None

    def _imag_flint(self) -> fmpq_mat:
        return self._im if self._im is not None else fmpq_mat(self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        re = _to_frac(self._re[i, j])
        if self._im is None:
            return re
        return normalize_scalar(GaussRational(re, _to_frac(self._im[i, j])))

    def entries(self) -> list:
        re = [_to_frac(x) for x in self._re_flat()]
        if self._im is None:
            return re
        im = [_to_frac(x) for x in self._im.entries()]
        return [normalize_scalar(GaussRational(a, b)) for a, b in zip(re, im)]

    def to_lists(self) -> list[list]:
        flat = self.entries()
        c = self.ncols
        return [flat[i * c:(i + 1) * c] for i in range(self.nrows)]

    def row(self, i: int) -> "Matrix":
        return self.submatrix([i], range(self.ncols))

    def col(self, j: int) -> "Matrix":
        return self.submatrix(range(self.nrows), [j])

    def row_list(self, i: int) -> list:
        return self.to_lists()[i] if self.nrows else []

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "Matrix":
        rows, cols = list(rows), list(cols)
        c = self.ncols
        re_e = self._re_flat()
        re = _flint_from_flat(len(rows), len(cols), [re_e[i * c + j] for i in rows for j in cols])
        im = None
        if self._im is not None:
            im_e = self._im.entries()
            im = _flint_from_flat(len(rows), len(cols), [im_e[i * c + j] for i in rows for j in cols])
        return Matrix(re, im)

    def real_part(self) -> "Matrix":
        return Matrix(self._re)

    def imag_part(self) -> "Matrix":
        return Matrix(self._imag_flint())

    # arithmetic ----------------------------------------------------------
    def _check_same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other)
        im = None
        if self._im is not None or other._im is not None:
            im = self._imag_flint() + other._imag_flint()
        return Matrix(self._re + other._re, im)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other)
        im = None
        if self._im is not None or other._im is not None:
            im = self._imag_flint() - other._imag_flint()
        return Matrix(self._re - other._re, im)

    def __neg__(self) -> "Matrix":
        return Matrix(-self._re, None if self._im is None else -self._im)

    def scale(self, c) -> "Matrix":
        if isinstance(c, GaussRational) and c.im != 0:
            a, b = _to_fmpq(c.re), _to_fmpq(c.im)
            im_self = self._imag_flint()
            return Matrix(self._re * a - im_self * b, self._re * b + im_self * a)
        f = _to_fmpq(as_fraction(c))
        return Matrix(self._re * f, None if self._im is None else self._im * f)

    def __mul__(self, c) -> "Matrix":
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    def __rmul__(self, c) -> "Matrix":
        return self.scale(c)

    def __truediv__(self, c) -> "Matrix":
        if isinstance(c, GaussRational):
            return self.scale(GaussRational(1) / c)
        return self.scale(1 / as_fraction(c))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        if self._im is None and other._im is None:
            return Matrix(self._re * other._re)
        a, b = self._re, self._imag_flint()
        c, d = other._re, other._imag_flint()
        return Matrix(a * c - b * d, a * d + b * c)

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square:
            raise DimensionMismatch("power of a non-square matrix")
        if k < 0:
            return self.inverse() ** (-k)
        out = Matrix.identity(self.nrows)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    @property
    def T(self) -> "Matrix":
        return Matrix(self._re.transpose(), None if self._im is None else self._im.transpose())

    def conj(self) -> "Matrix":
        return Matrix(self._re, None if self._im is None else -self._im)

    def kron(self, other: "Matrix") -> "Matrix":
        a, b = self.to_lists(), other.to_lists()
        rows = []
        for ar in a:
            for br in b:
                rows.append([x * y for x in ar for y in br])
        return Matrix.from_rows(rows, self.ncols * other.ncols)

    def commutator(self, other: "Matrix") -> "Matrix":
        return self @ other - other @ self

    # predicates ----------------------------------------------------------
    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return not self._re and self._im is None

    def is_integral(self) -> bool:
        if self._im is not None:
            return False
        return all(x.q == 1 for x in self._re_flat())

    def commutes_with(self, other: "Matrix") -> bool:
        return (self @ other) == (other @ self)

    def nilpotency_index(self) -> int | None:
        """Smallest k with self**k == 0, or None when not nilpotent."""
        if not self.is_square:
            raise DimensionMismatch("nilpotency of a non-square matrix")
        n = self.nrows
        p = Matrix.identity(n)
        for k in range(0, n + 1):
            if p.is_zero():
                return k
            p = p @ self
        return None

    def is_nilpotent(self) -> bool:
        return self.nilpotency_index() is not None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if (self._im is None) != (other._im is None):
            return False
        if self._re != other._re:
            return False
        return self._im is None or self._im == other._im

    def __hash__(self) -> int:
        if self._hash is None:
            im = None if self._im is None else tuple(str(x) for x in self._im.entries())
            self._hash = hash((self.shape, tuple(str(x) for x in self._re_flat()), im))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.to_lists()!r})"

    def __str__(self) -> str:
        return "\n".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.to_lists())

    # linear algebra ------------------------------------------------------
    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        """Reduced row echelon form with zero rows dropped, and the pivot columns."""
        if self._im is None:
            r, rank = self._re.rref()
            c = self.ncols
            flat = r.entries()
            pivots = []
            j = 0
            for i in range(rank):
                while flat[i * c + j] == 0:
                    j += 1
                pivots.append(j)
            out = Matrix(r) if rank == self.nrows else Matrix(_flint_from_flat(rank, c, flat[:rank * c]))
            out._flat = flat[:rank * c]
            return out, tuple(pivots)
        rows, pivots = _rref_gauss(self.to_lists(), self.ncols)
        if not rows:
            return Matrix.zeros(0, self.ncols), ()
        return Matrix.from_rows(rows, self.ncols), tuple(pivots)

    def rank(self) -> int:
        if self._im is None:
            return self._re.rank()
        return self._realified().rank() // 2

    def _realified(self) -> fmpq_mat:
        a, b = self._re, self._imag_flint()
        r, c = self.nrows, self.ncols
        ae, be = a.entries(), b.entries()
        flat = []
        for i in range(r):
            flat.extend(ae[i * c:(i + 1) * c])
            flat.extend(-x for x in be[i * c:(i + 1) * c])
        for i in range(r):
            flat.extend(be[i * c:(i + 1) * c])
            flat.extend(ae[i * c:(i + 1) * c])
        return _flint_from_flat(2 * r, 2 * c, flat)

    def nullspace(self) -> "Matrix":
        """Rows spanning {x : self @ x = 0}."""
        n = self.ncols
        if self._im is None:
            return self._rational_nullspace()
        r, pivots = self.rref()
        free = [j for j in range(n) if j not in set(pivots)]
        lists = r.to_lists()
        out = []
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -lists[i][f]
            out.append(v)
        if not out:
            return Matrix.zeros(0, n)
        return Matrix.from_rows(out, n)

    def _rational_nullspace(self) -> "Matrix":
        n = self.ncols
        r, rank = self._re.rref()
        flat = r.entries()
        pivots = []
        j = 0
        for i in range(rank):
            while flat[i * n + j] == 0:
                j += 1
            pivots.append(j)
        pset = set(pivots)
        free = [j for j in range(n) if j not in pset]
        if not free:
            return Matrix.zeros(0, n)
        zero, one = fmpq(0), fmpq(1)
        out = []
        for f in free:
            v = [zero] * n
            v[f] = one
            for i, p in enumerate(pivots):
                v[p] = -flat[i * n + f]
            out.extend(v)
        result = Matrix(_flint_from_flat(len(free), n, out))
        result._flat = out
        return result

    def solve_particular(self, b: "Matrix") -> "Matrix | None":
        """A column x with self @ x = b (free variables set to zero), or None."""
        if b.nrows != self.nrows or b.ncols != 1:
            raise DimensionMismatch("right-hand side has the wrong shape")
        aug = Matrix.hstack([self, b])
        r, pivots = aug.rref()
        n = self.ncols
        if n in pivots:
            return None
        lists = r.to_lists()
        x = [Fraction(0)] * n
        for i, p in enumerate(pivots):
            x[p] = lists[i][n]
        return Matrix.from_rows([[v] for v in x], 1) if n else Matrix.zeros(0, 1)

    def inverse(self) -> "Matrix":
        if not self.is_square:
            raise DimensionMismatch("inverse of a non-square matrix")
        if self._im is None:
            return Matrix(self._re.inv())
        n = self.nrows
        inv = self._realified().inv()
        e = inv.entries()
        re = _flint_from_flat(n, n, [e[i * 2 * n + j] for i in range(n) for j in range(n)])
        im = _flint_from_flat(n, n, [e[(n + i) * 2 * n + j] for i in range(n) for j in range(n)])
        return Matrix(re, im)

    def det(self):
        if not self.is_square:
            raise DimensionMismatch("determinant of a non-square matrix")
        if self._im is None:
            return _to_frac(self._re.det())
        return normalize_scalar(_det_gauss(self.to_lists()))

    def exp_nilpotent(self, scale=1) -> "Matrix":
        """exp(scale * self) for nilpotent self, as an exact finite sum."""
        k = self.nilpotency_index()
        if k is None:
            raise NotNilpotent("matrix exponential needs a nilpotent argument")
        a = self.scale(scale) if scale != 1 else self
        out = Matrix.identity(self.nrows)
        term = Matrix.identity(self.nrows)
        for m in range(1, k):
            term = term @ a
            out = out + term.scale(Fraction(1, factorial(m)))
        return out

    def log_unipotent(self) -> "Matrix":
        """log of a unipotent matrix as an exact finite sum."""
        u = self - Matrix.identity(self.nrows)
        k = u.nilpotency_index()
        if k is None:
            raise NotNilpotent("log needs a unipotent argument")
        out = Matrix.zeros(self.nrows, self.ncols)
        term = Matrix.identity(self.nrows)
        for m in range(1, k):
            term = term @ u
            out = out + term.scale(Fraction((-1) ** (m + 1), m))
        return out

    def flatten_row(self) -> "Matrix":
        """The row-major vectorization as a 1 x (rows*cols) matrix."""
        return Matrix(_flint_from_flat(1, self.nrows * self.ncols, self._re_flat()),
                      None if self._im is None else
                      _flint_from_flat(1, self.nrows * self.ncols, self._im.entries()))

    def reshape(self, nrows: int, ncols: int) -> "Matrix":
        if nrows * ncols != self.nrows * self.ncols:
            raise DimensionMismatch("reshape changes the entry count")
        return Matrix(_flint_from_flat(nrows, ncols, self._re_flat()),
                      None if self._im is None else _flint_from_flat(nrows, ncols, self._im.entries()))


def _rref_gauss(rows: list[list], ncols: int) -> tuple[list[list], list[int]]:
    a = [[GaussRational.coerce(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    nrows = len(a)
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = GaussRational(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [[normalize_scalar(x) for x in row] for row in a[:r]], pivots


def _det_gauss(rows: list[list]) -> GaussRational:
    a = [[GaussRational.coerce(x) for x in r] for r in rows]
    n = len(a)
    det = GaussRational(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return GaussRational(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = GaussRational(1) / a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def vector(entries: Sequence) -> Matrix:
    """A 1 x n row matrix."""
    return Matrix.from_rows([list(entries)], len(entries))


def column(entries: Sequence) -> Matrix:
    return Matrix.from_rows([[x] for x in entries], 1)
