"""Increasing and decreasing filtrations, graded pieces, and the ⊕ / ⊗ / Hom constructors.

A filtration is stored on its minimal window: for an increasing filtration
``lo`` is the first index with a nonzero step and ``hi`` the first index where
the step is the whole space.  Equality of filtrations is therefore plain
equality of the stored steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import DimensionMismatch, NotNilpotent
from .exactlin import Matrix, SubQuotient, Subspace


def _step_lookup(steps: Mapping[int, Subspace], w: int, increasing: bool) -> Subspace | None:
    keys = sorted(steps)
    if increasing:
        below = [k for k in keys if k <= w]
        return steps[below[-1]] if below else None
    above = [k for k in keys if k >= w]
    return steps[above[0]] if above else None


class IncFiltration:
    """Increasing filtration W_w with W_{lo-1} = 0 and W_hi = V."""

    __slots__ = ("ambient_dim", "lo", "hi", "_steps")

    def __init__(self, ambient_dim: int, steps: Mapping[int, Subspace]):
        self.ambient_dim = ambient_dim
        if ambient_dim == 0 or not steps:
            if ambient_dim != 0:
                raise ValueError("an increasing filtration of a nonzero space needs steps")
            self.lo = self.hi = 0
            self._steps = (Subspace.full(0),)
            return
        keys = sorted(steps)
        for k in keys:
            if steps[k].ambient_dim != ambient_dim:
                raise DimensionMismatch("step lives in the wrong ambient space")
        for k0, k1 in zip(keys, keys[1:]):
            if not steps[k1].contains(steps[k0]):
                raise ValueError(f"filtration is not increasing between {k0} and {k1}")
        if not steps[keys[-1]].is_full():
            raise ValueError("the last step of an increasing filtration must be the whole space")
        lo = next(k for k in keys if not steps[k].is_zero())
        hi = next(k for k in keys if steps[k].is_full())
        self.lo, self.hi = lo, hi
        self._steps = tuple(_step_lookup(steps, w, True) for w in range(lo, hi + 1))

    @classmethod
    def trivial(cls, n: int, w: int = 0) -> "IncFiltration":
        """The filtration with a single jump at w."""
        return cls(n, {w: Subspace.full(n)})

    @classmethod
    def from_dims_of_coordinates(cls, n: int, weights: Iterable[int]) -> "IncFiltration":
        """Filtration by standard basis vectors, e_j placed in weight weights[j]."""
        weights = list(weights)
        if not weights:
            return cls(0, {})
        return cls(n, {w: Subspace.coordinate(n, [j for j, x in enumerate(weights) if x <= w])
                       for w in sorted(set(weights))})

    def __getitem__(self, w: int) -> Subspace:
        if w < self.lo:
            return Subspace.zero(self.ambient_dim)
        if w >= self.hi:
            return Subspace.full(self.ambient_dim)
        return self._steps[w - self.lo]

    def weights(self) -> range:
        return range(self.lo, self.hi + 1)

    def steps(self) -> list[tuple[int, Subspace]]:
        return [(w, self[w]) for w in self.weights()]

    def graded_dims(self) -> dict[int, int]:
        return {w: self[w].dim - self[w - 1].dim for w in self.weights() if self[w].dim != self[w - 1].dim}

    def jumps(self) -> list[int]:
        return sorted(self.graded_dims())

    def shift_weights(self, k: int) -> "IncFiltration":
        """The filtration G with G_{w+k} = W_w."""
        return IncFiltration(self.ambient_dim, {w + k: s for w, s in self.steps()})

    def is_rational(self) -> bool:
        return all(s.is_rational for s in self._steps)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncFiltration):
            return NotImplemented
        return (self.ambient_dim, self.lo, self.hi, self._steps) == (
            other.ambient_dim, other.lo, other.hi, other._steps)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.lo, self.hi, self._steps))

    def __repr__(self) -> str:
        parts = ", ".join(f"{w}: dim {s.dim}" for w, s in self.steps())
        return f"IncFiltration(n={self.ambient_dim}, {{{parts}}})"

    def is_preserved_by(self, f: Matrix) -> bool:
        return all(s.contains(s.image(f)) for _, s in self.steps())

    def lowered_by(self, f: Matrix, k: int) -> bool:
        """True when f W_w ⊆ W_{w-k} for every w."""
        return all(self[w - k].contains(self[w].image(f)) for w in range(self.lo, self.hi + k + 1))


class DecFiltration:
    """Decreasing filtration F^p with F^lo = V and F^{hi+1} = 0 (over Q or Q(i))."""

    __slots__ = ("ambient_dim", "lo", "hi", "_steps")

    def __init__(self, ambient_dim: int, steps: Mapping[int, Subspace]):
        self.ambient_dim = ambient_dim
        if ambient_dim == 0 or not steps:
            if ambient_dim != 0:
                raise ValueError("a decreasing filtration of a nonzero space needs steps")
            self.lo = self.hi = 0
            self._steps = (Subspace.full(0),)
            return
        keys = sorted(steps)
        for k in keys:
            if steps[k].ambient_dim != ambient_dim:
                raise DimensionMismatch("step lives in the wrong ambient space")
        for k0, k1 in zip(keys, keys[1:]):
            if not steps[k0].contains(steps[k1]):
                raise ValueError(f"filtration is not decreasing between {k0} and {k1}")
        if not steps[keys[0]].is_full():
            raise ValueError("the first step of a decreasing filtration must be the whole space")
        hi = max(k for k in keys if not steps[k].is_zero())
        lo = max(k for k in keys if steps[k].is_full())
        self.lo, self.hi = lo, hi
        self._steps = tuple(_step_lookup(steps, p, False) for p in range(lo, hi + 1))

    def __getitem__(self, p: int) -> Subspace:
        if p <= self.lo:
            return Subspace.full(self.ambient_dim)
        if p > self.hi:
            return Subspace.zero(self.ambient_dim)
        return self._steps[p - self.lo]

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def steps(self) -> list[tuple[int, Subspace]]:
        return [(p, self[p]) for p in self.indices()]

    def graded_dims(self) -> dict[int, int]:
        return {p: self[p].dim - self[p + 1].dim for p in self.indices() if self[p].dim != self[p + 1].dim}

    def conj(self) -> "DecFiltration":
        return DecFiltration(self.ambient_dim, {p: s.conj() for p, s in self.steps()})

    def apply(self, g: Matrix) -> "DecFiltration":
        """g·F for an invertible g."""
        return DecFiltration(self.ambient_dim, {p: s.image(g) for p, s in self.steps()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecFiltration):
            return NotImplemented
        return (self.ambient_dim, self.lo, self.hi, self._steps) == (
            other.ambient_dim, other.lo, other.hi, other._steps)

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.lo, self.hi, self._steps))

    def __repr__(self) -> str:
        parts = ", ".join(f"{p}: dim {s.dim}" for p, s in self.steps())
        return f"DecFiltration(n={self.ambient_dim}, {{{parts}}})"


@dataclass(frozen=True)
class FilteredNilp:
    """A space with an increasing filtration W and a nilpotent N preserving it."""

    W: IncFiltration
    N: Matrix

    def __post_init__(self):
        n = self.W.ambient_dim
        if self.N.shape != (n, n):
            raise DimensionMismatch("N and W live on spaces of different dimension")
        if not self.N.is_rational:
            raise ValueError("N must be rational")
        if not self.N.is_nilpotent():
            raise NotNilpotent("N is not nilpotent")
        if not self.W.is_preserved_by(self.N):
            raise ValueError("N does not preserve W")

    @property
    def dim(self) -> int:
        return self.W.ambient_dim


# graded pieces and induced filtrations ------------------------------------

class GradedPiece(SubQuotient):
    """gr^W_w = W_w / W_{w-1} with echelon lifts."""

    def __init__(self, W: IncFiltration, w: int):
        super().__init__(W[w], W[w - 1])
        self.weight = w


def graded_piece(W: IncFiltration, w: int) -> GradedPiece:
    return GradedPiece(W, w)


def induced_inc(sq: SubQuotient, M: IncFiltration) -> IncFiltration:
    """Filtration induced by M on a sub-quotient (intersection, then image)."""
    if M.ambient_dim != sq.ambient_dim:
        raise DimensionMismatch("filtration and sub-quotient live in different spaces")
    if sq.dim == 0:
        return IncFiltration(0, {})
    steps = {w: sq.project_subspace(M[w]) for w in range(M.lo - 1, M.hi + 1)}
    return IncFiltration(sq.dim, steps)


def induced_dec(sq: SubQuotient, F: DecFiltration) -> DecFiltration:
    if F.ambient_dim != sq.ambient_dim:
        raise DimensionMismatch("filtration and sub-quotient live in different spaces")
    if sq.dim == 0:
        return DecFiltration(0, {})
    steps = {p: sq.project_subspace(F[p]) for p in range(F.lo, F.hi + 2)}
    return DecFiltration(sq.dim, steps)


def lift_inc(sq: SubQuotient, M: IncFiltration) -> dict[int, Subspace]:
    """Preimages in sq.big of the steps of a filtration on the sub-quotient."""
    return {w: sq.lift_subspace(M[w]) for w in range(M.lo - 1, M.hi + 1)}


def induced_on_sub_quot(W: IncFiltration, M: IncFiltration, mode: str, index: int) -> IncFiltration:
    """M induced on W_index (mode "restrict"), on V/W_index ("quotient") or on gr^W_index ("graded")."""
    if W.ambient_dim != M.ambient_dim:
        raise DimensionMismatch("W and M live on different spaces")
    n = W.ambient_dim
    if mode == "restrict":
        sq = SubQuotient(W[index], Subspace.zero(n))
    elif mode == "quotient":
        sq = SubQuotient(Subspace.full(n), W[index])
    elif mode == "graded":
        sq = GradedPiece(W, index)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return induced_inc(sq, M)


# adapted bases and the constructors -----------------------------------------

def adapted_basis(W: IncFiltration) -> tuple[Matrix, list[int]]:
    """Rows forming a basis adapted to W (echelon lifts of each graded piece), with their weights."""
    rows, weights = [], []
    for w in W.jumps():
        gp = GradedPiece(W, w)
        rows.append(gp.lifts)
        weights.extend([w] * gp.dim)
    if not rows:
        return Matrix.zeros(0, W.ambient_dim), []
    return Matrix.vstack(rows), weights


def adapted_basis_dec(F: DecFiltration) -> tuple[Matrix, list[int]]:
    rows, idx = [], []
    for p in sorted(F.graded_dims()):
        sq = SubQuotient(F[p], F[p + 1])
        rows.append(sq.lifts)
        idx.extend([p] * sq.dim)
    if not rows:
        return Matrix.zeros(0, F.ambient_dim), []
    return Matrix.vstack(rows), idx


def _span_by_weight(rows: list[Matrix], weights: list[int], n: int, increasing: bool) -> dict[int, Subspace]:
    if not rows:
        return {0: Subspace.full(n)} if increasing else {0: Subspace.full(n)}
    out = {}
    for w in sorted(set(weights)):
        sel = [r for r, x in zip(rows, weights) if (x <= w if increasing else x >= w)]
        out[w] = Subspace.span(Matrix.vstack(sel))
    return out


def inc_direct_sum(a: IncFiltration, b: IncFiltration) -> IncFiltration:
    n1, n2 = a.ambient_dim, b.ambient_dim
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    steps = {}
    for w in range(lo - 1, hi + 1):
        blocks = []
        if a[w].dim:
            blocks.append(Matrix.hstack([a[w].basis, Matrix.zeros(a[w].dim, n2)]))
        if b[w].dim:
            blocks.append(Matrix.hstack([Matrix.zeros(b[w].dim, n1), b[w].basis]))
        steps[w] = Subspace.span(Matrix.vstack(blocks)) if blocks else Subspace.zero(n1 + n2)
    return IncFiltration(n1 + n2, steps)


def inc_tensor(a: IncFiltration, b: IncFiltration) -> IncFiltration:
    ba, wa = adapted_basis(a)
    bb, wb = adapted_basis(b)
    n = a.ambient_dim * b.ambient_dim
    if n == 0:
        return IncFiltration(0, {})
    rows, weights = [], []
    for i in range(ba.nrows):
        for j in range(bb.nrows):
            rows.append(ba.row(i).kron(bb.row(j)))
            weights.append(wa[i] + wb[j])
    return IncFiltration(n, _span_by_weight(rows, weights, n, True))


def inc_hom(a: IncFiltration, b: IncFiltration) -> IncFiltration:
    """W_w Hom(A, B) = {f : f A_k ⊆ B_{k+w}}; f is vectorized row-major as a (dim B × dim A) matrix."""
    ba, wa = adapted_basis(a)
    bb, wb = adapted_basis(b)
    n = a.ambient_dim * b.ambient_dim
    if n == 0:
        return IncFiltration(0, {})
    dual = ba.T.inverse()  # row i is the functional reading the coefficient of ba.row(i)
    rows, weights = [], []
    for j in range(bb.nrows):
        for i in range(ba.nrows):
            rows.append(bb.row(j).kron(dual.row(i)))
            weights.append(wb[j] - wa[i])
    return IncFiltration(n, _span_by_weight(rows, weights, n, True))


def dec_direct_sum(a: DecFiltration, b: DecFiltration) -> DecFiltration:
    n1, n2 = a.ambient_dim, b.ambient_dim
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    steps = {}
    for p in range(lo, hi + 2):
        blocks = []
        if a[p].dim:
            blocks.append(Matrix.hstack([a[p].basis, Matrix.zeros(a[p].dim, n2)]))
        if b[p].dim:
            blocks.append(Matrix.hstack([Matrix.zeros(b[p].dim, n1), b[p].basis]))
        steps[p] = Subspace.span(Matrix.vstack(blocks)) if blocks else Subspace.zero(n1 + n2)
    return DecFiltration(n1 + n2, steps)


def dec_tensor(a: DecFiltration, b: DecFiltration) -> DecFiltration:
    ba, pa = adapted_basis_dec(a)
    bb, pb = adapted_basis_dec(b)
    n = a.ambient_dim * b.ambient_dim
    if n == 0:
        return DecFiltration(0, {})
    rows, idx = [], []
    for i in range(ba.nrows):
        for j in range(bb.nrows):
            rows.append(ba.row(i).kron(bb.row(j)))
            idx.append(pa[i] + pb[j])
    return DecFiltration(n, _span_by_weight(rows, idx, n, False))


def dec_restrict(F: DecFiltration, sub: Subspace) -> DecFiltration:
    """F ∩ sub in the canonical coordinates of sub."""
    return induced_dec(SubQuotient(sub, Subspace.zero(sub.ambient_dim)), F)


def inc_restrict(W: IncFiltration, sub: Subspace) -> IncFiltration:
    return induced_inc(SubQuotient(sub, Subspace.zero(sub.ambient_dim)), W)


def tensor_operator(n1: Matrix, n2: Matrix) -> Matrix:
    """N₁⊗1 + 1⊗N₂."""
    return n1.kron(Matrix.identity(n2.nrows)) + Matrix.identity(n1.nrows).kron(n2)


def hom_operator(n1: Matrix, n2: Matrix) -> Matrix:
    """f ↦ N₂f − fN₁ on row-major vectorized f ∈ Hom(V₁, V₂)."""
    return n2.kron(Matrix.identity(n1.nrows)) - Matrix.identity(n2.nrows).kron(n1.T)


def combine(a: FilteredNilp, b: FilteredNilp, op: str) -> FilteredNilp:
    if op == "direct_sum":
        return FilteredNilp(inc_direct_sum(a.W, b.W), Matrix.block_diag([a.N, b.N]))
    if op == "tensor":
        return FilteredNilp(inc_tensor(a.W, b.W), tensor_operator(a.N, b.N))
    if op == "hom":
        return FilteredNilp(inc_hom(a.W, b.W), hom_operator(a.N, b.N))
    raise ValueError(f"unknown combine operation {op!r}")
