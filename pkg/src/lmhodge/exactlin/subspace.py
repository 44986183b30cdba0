"""Subspaces held in canonical reduced-echelon form, plus sub-quotient coordinates."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

from ..errors import DimensionMismatch
from .matrix import Matrix


class Subspace:
    """Row span of an RREF basis inside K^n (K = Q or Q(i)).

    Two subspaces are equal exactly when their canonical bases are equal.
    """

    def __init__(self, ambient_dim: int, basis: Matrix, pivots: tuple[int, ...]):
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def span(cls, vectors: Matrix | Iterable[Sequence], ambient_dim: int | None = None) -> "Subspace":
        if not isinstance(vectors, Matrix):
            vectors = list(vectors)
            if ambient_dim is None:
                ambient_dim = len(vectors[0])
            vectors = Matrix.from_rows(vectors, ambient_dim) if vectors else Matrix.zeros(0, ambient_dim)
        if ambient_dim is not None and vectors.ncols != ambient_dim:
            raise DimensionMismatch("vectors do not live in the stated ambient space")
        r, piv = vectors.rref()
        return cls(vectors.ncols, r, piv)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, Matrix.zeros(0, n), ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n), tuple(range(n)))

    @classmethod
    def coordinate(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = sorted(set(indices))
        rows = [[1 if j == i else 0 for j in range(n)] for i in idx]
        return cls.span(rows, n) if rows else cls.zero(n)

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def is_rational(self) -> bool:
        return self.basis.is_rational

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def vectors(self) -> list[list]:
        return self.basis.to_lists()

    def _check(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(f"ambient dims {self.ambient_dim} and {other.ambient_dim} differ")

    # lattice operations ------------------------------------------------
    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.dim == 0 or self.is_full():
            return self
        if self.dim == 0 or other.is_full():
            return other
        return Subspace.span(Matrix.vstack([self.basis, other.basis]))

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.is_full():
            return self
        if other.dim == 0 or self.is_full():
            return other
        n = self.ambient_dim
        if self.dim > other.dim:
            self, other = other, self
        # x = c·A lies in B iff c·A·ann(B)ᵀ = 0
        ann = other.annihilator_rows()
        coeffs = (self.basis @ ann.T).T.nullspace()
        if coeffs.nrows == 0:
            return Subspace.zero(n)
        return Subspace.span(coeffs @ self.basis)

    def contains(self, other: "Subspace | Matrix | Sequence") -> bool:
        if isinstance(other, Subspace):
            self._check(other)
            if other.dim == 0:
                return True
            if other.dim > self.dim:
                return False
            if self.is_full():
                return True
            return (other.basis @ self.annihilator_rows().T).is_zero()
        v = other if isinstance(other, Matrix) else Matrix.from_rows([list(other)], self.ambient_dim)
        if v.ncols != self.ambient_dim:
            raise DimensionMismatch("vector length does not match ambient dimension")
        if v.is_zero() or self.is_full():
            return True
        return (v @ self.annihilator_rows().T).is_zero()

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)

    def __ge__(self, other: "Subspace") -> bool:
        return self.contains(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, basis={self.vectors()})"

    # maps -------------------------------------------------------------
    def image(self, f: Matrix) -> "Subspace":
        """f(S) for f acting on column vectors."""
        if f.ncols != self.ambient_dim:
            raise DimensionMismatch("map and subspace shapes differ")
        if self.dim == 0:
            return Subspace.zero(f.nrows)
        return Subspace.span(self.basis @ f.T)

    def preimage(self, f: Matrix) -> "Subspace":
        """{x : f x ∈ S}."""
        if f.nrows != self.ambient_dim:
            raise DimensionMismatch("map and subspace shapes differ")
        if self.is_full():
            return Subspace.full(f.ncols)
        ann = self.annihilator_rows()
        return Subspace.span((ann @ f).nullspace()) if ann.nrows else Subspace.full(f.ncols)

    def annihilator_rows(self) -> Matrix:
        """Rows a with a·x = 0 for all x in S (bilinear, no conjugation)."""
        if self.dim == 0:
            return Matrix.identity(self.ambient_dim)
        return self._annihilator

    @cached_property
    def _annihilator(self) -> Matrix:
        return self.basis.nullspace()

    def annihilator(self) -> "Subspace":
        return Subspace.span(self.annihilator_rows()) if self.dim < self.ambient_dim else Subspace.zero(self.ambient_dim)

    def conj(self) -> "Subspace":
        if self.is_rational:
            return self
        return Subspace.span(self.basis.conj())

    def coordinates(self, v: Matrix) -> Matrix:
        """Coordinates (row) of a vector of S in the canonical basis; the pivot entries."""
        c = v.submatrix(range(v.nrows), self.pivots)
        if c @ self.basis != v:
            raise ValueError("vector is not in the subspace")
        return c

    def restrict_map(self, f: Matrix) -> Matrix:
        """Matrix of f|S in canonical-basis coordinates (S must be f-stable), acting on columns."""
        imgs = self.basis @ f.T  # rows are f(b_i)
        if imgs.nrows and not self.contains(Subspace.span(imgs)):
            raise ValueError("subspace is not stable under the map")
        coords = imgs.submatrix(range(imgs.nrows), self.pivots)
        return coords.T

    def complement_lift(self, sub: "Subspace") -> Matrix:
        """Rows of this basis whose pivots are not pivots of ``sub``; they lift a basis of self/sub."""
        self._check(sub)
        sp = set(sub.pivots)
        keep = [i for i, p in enumerate(self.pivots) if p not in sp]
        return self.basis.submatrix(keep, range(self.ambient_dim))


def sum_all(spaces: Iterable[Subspace], n: int) -> Subspace:
    mats = [s.basis for s in spaces if s.dim]
    if not mats:
        return Subspace.zero(n)
    return Subspace.span(Matrix.vstack(mats))


def intersect_all(spaces: Iterable[Subspace], n: int) -> Subspace:
    out = Subspace.full(n)
    for s in spaces:
        out = out & s
    return out


class SubQuotient:
    """Coordinates on S/T for subspaces T ⊆ S.

    Lifts are the rows of S's canonical basis whose pivot columns are not
    pivots of T; these are the deterministic echelon lifts.
    """

    def __init__(self, big: Subspace, small: Subspace):
        if not big.contains(small):
            raise ValueError("sub-quotient needs small ⊆ big")
        self.big = big
        self.small = small
        self.lifts = big.complement_lift(small)

    @property
    def dim(self) -> int:
        return self.lifts.nrows

    @property
    def ambient_dim(self) -> int:
        return self.big.ambient_dim

    @cached_property
    def _projector(self) -> Matrix:
        """P with x ↦ x·P giving quotient coordinates for row vectors x ∈ big."""
        n = self.ambient_dim
        full = Matrix.vstack([self.small.basis, self.lifts]) if self.small.dim else self.lifts
        if full.nrows == 0:
            return Matrix.zeros(n, 0)
        c = full.submatrix(range(full.nrows), self.big.pivots)
        cinv = c.inverse()
        sel = Matrix.zeros(n, len(self.big.pivots)).to_lists()
        for k, p in enumerate(self.big.pivots):
            sel[p][k] = 1
        sel_m = Matrix.from_rows(sel, len(self.big.pivots))
        t = self.small.dim
        return (sel_m @ cinv).submatrix(range(n), range(t, t + self.dim))

    def project(self, rows: Matrix) -> Matrix:
        """Quotient coordinates of the rows of ``rows`` (each must lie in big)."""
        return rows @ self._projector

    def lift(self, coords: Matrix) -> Matrix:
        return coords @ self.lifts

    def project_subspace(self, s: Subspace) -> Subspace:
        """Image of s ∩ big in the quotient, in quotient coordinates."""
        inter = s & self.big
        if inter.dim == 0:
            return Subspace.zero(self.dim)
        return Subspace.span(self.project(inter.basis))

    def lift_subspace(self, q: Subspace) -> Subspace:
        """Preimage in big of a subspace of the quotient (always contains small)."""
        if q.dim == 0:
            return self.small
        return Subspace.span(self.lift(q.basis)) + self.small

    def induced_map(self, f: Matrix) -> Matrix:
        """Matrix (on quotient column coordinates) induced by f, assuming f preserves big and small."""
        if self.dim == 0:
            return Matrix.zeros(0, 0)
        imgs = self.lifts @ f.T
        return self.project(imgs).T
