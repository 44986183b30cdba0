"""Finitely generated rational cones: face lattices, sharpness, intersections.

All geometry happens on flattened generator vectors expressed in coordinates of
their linear span, so the size of the ambient matrix space never enters the
combinatorics.  Facets of a cone whose span has dimension r are found among
hyperplanes spanned by r-1 generators; LP questions use the exact simplex
routine from :mod:`lmhodge.exactlin.lp`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NonCommuting, NotInCone, NotNilpotent
from .exactlin import Matrix, Subspace, feasible_point


def primitive_integer(vec: Sequence[Fraction]) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


class PolyCone:
    """Cone Σ ℝ≥0 v_i generated by rational row vectors of a fixed length."""

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence]):
        self.ambient_dim = ambient_dim
        vecs = []
        for v in vectors:
            v = [Fraction(x) for x in v]
            if len(v) != ambient_dim:
                raise DimensionMismatch("generator has the wrong length")
            if any(v):
                vecs.append(tuple(v))
        self.vectors: tuple[tuple[Fraction, ...], ...] = tuple(vecs)

    # construction hooks for subclasses -----------------------------------
    def _subcone(self, indices: Sequence[int]) -> "PolyCone":
        return PolyCone(self.ambient_dim, [self.vectors[i] for i in indices])

    def _from_vectors(self, vectors: Iterable[Sequence]) -> "PolyCone":
        return PolyCone(self.ambient_dim, vectors)

    # span data -----------------------------------------------------------
    @cached_property
    def span(self) -> Subspace:
        if not self.vectors:
            return Subspace.zero(self.ambient_dim)
        return Subspace.span(Matrix.from_rows(self.vectors, self.ambient_dim))

    @property
    def dim(self) -> int:
        return self.span.dim

    def _coords(self, v: Sequence[Fraction]) -> list[Fraction]:
        return [Fraction(v[p]) for p in self.span.pivots]

    @cached_property
    def _gen_coords(self) -> list[list[Fraction]]:
        return [self._coords(v) for v in self.vectors]

    @cached_property
    def facets(self) -> tuple[tuple[tuple[Fraction, ...], frozenset[int]], ...]:
        """Facet normals (in span coordinates) with the generators lying on each facet."""
        r, m = self.dim, len(self.vectors)
        coords = self._gen_coords
        found: dict[tuple[int, ...], tuple[tuple[Fraction, ...], frozenset[int]]] = {}
        if r == 0:
            return ()
        if r == 1:
            signs = {x[0] > 0 for x in coords}
            if len(signs) == 2:
                return ()
            normal = (Fraction(1),) if signs == {True} else (Fraction(-1),)
            return ((normal, frozenset()),)
        for subset in combinations(range(m), r - 1):
            sub = Matrix.from_rows([coords[i] for i in subset], r)
            if sub.rank() != r - 1:
                continue
            ns = sub.nullspace()
            normal = ns.row_list(0)
            values = [_dot(normal, c) for c in coords]
            if all(x >= 0 for x in values):
                pass
            elif all(x <= 0 for x in values):
                normal = [-x for x in normal]
                values = [-x for x in values]
            else:
                continue
            key = primitive_integer(normal)
            if key not in found:
                on = frozenset(i for i, x in enumerate(values) if x == 0)
                found[key] = (tuple(Fraction(x) for x in key), on)
        return tuple(found[k] for k in sorted(found))

    # faces ---------------------------------------------------------------
    @cached_property
    def _face_sets(self) -> tuple[frozenset[int], ...]:
        full = frozenset(range(len(self.vectors)))
        seen = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for s in frontier:
                for _, on in self.facets:
                    t = s & on
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
            frontier = nxt
        return tuple(sorted(seen, key=lambda s: (len(s), sorted(s))))

    def faces(self) -> "FaceLattice":
        sets = list(self._face_sets)
        faces = [self._subcone(sorted(s)) for s in sets]
        faces_dims = [f.dim for f in faces]
        order = sorted(range(len(sets)), key=lambda i: (faces_dims[i], sorted(sets[i])))
        sets = [sets[i] for i in order]
        faces = [faces[i] for i in order]
        incidence = tuple((i, j) for i in range(len(sets)) for j in range(len(sets))
                          if i != j and sets[i] <= sets[j])
        return FaceLattice(tuple(faces), tuple(tuple(sorted(s)) for s in sets), incidence)

    def interior_point(self) -> tuple[Fraction, ...]:
        out = [Fraction(0)] * self.ambient_dim
        for v in self.vectors:
            out = [a + b for a, b in zip(out, v)]
        return tuple(out)

    # LP questions ----------------------------------------------------------
    def _span_with(self, others: Sequence[Sequence[Fraction]]) -> Subspace:
        rows = list(self.vectors) + [tuple(o) for o in others if any(o)]
        if not rows:
            return Subspace.zero(self.ambient_dim)
        return Subspace.span(Matrix.from_rows(rows, self.ambient_dim))

    def contains(self, v: Sequence) -> bool:
        v = [Fraction(x) for x in v]
        if len(v) != self.ambient_dim:
            raise DimensionMismatch("point has the wrong length")
        if not any(v):
            return True
        if not self.span.contains(Matrix.from_rows([v], self.ambient_dim)):
            return False
        coords = self._gen_coords
        target = self._coords(v)
        a = [[c[k] for c in coords] for k in range(self.dim)]
        return feasible_point(a, target) is not None

    def contains_cone(self, other: "PolyCone") -> bool:
        return all(self.contains(v) for v in other.vectors)

    def is_sharp(self) -> bool:
        """σ ∩ (−σ) = {0}: no convex combination of generators vanishes."""
        m = len(self.vectors)
        if m == 0:
            return True
        coords = self._gen_coords
        a = [[c[k] for c in coords] for k in range(self.dim)]
        a.append([Fraction(1)] * m)
        b = [Fraction(0)] * self.dim + [Fraction(1)]
        return feasible_point(a, b) is None

    def is_sharp_by_facets(self) -> bool:
        """Independent sharpness check: the intersection of all facets is {0}."""
        if not self.vectors:
            return True
        common = frozenset(range(len(self.vectors)))
        for _, on in self.facets:
            common &= on
        if not self.facets:
            return False
        return len(common) == 0

    def smallest_face_support(self, v: Sequence) -> tuple[int, ...]:
        """Indices of the generators lying in the smallest face containing v."""
        v = [Fraction(x) for x in v]
        if not self.contains(v):
            raise NotInCone("point is not in the cone")
        c = self._coords(v)
        on = frozenset(range(len(self.vectors)))
        for normal, members in self.facets:
            if _dot(normal, c) == 0:
                on &= members
        return tuple(sorted(on))

    def smallest_face_containing(self, v: Sequence) -> "PolyCone":
        return self._subcone(self.smallest_face_support(v))

    def relative_interiors_meet(self, other: "PolyCone") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("cones live in different spaces")
        span = self._span_with(other.vectors)
        if span.dim == 0:
            return True
        gs = [[Fraction(x[p]) for p in span.pivots] for x in self.vectors]
        hs = [[Fraction(x[p]) for p in span.pivots] for x in other.vectors]
        # λ = 1 + λ', μ = 1 + μ' with λ', μ' ≥ 0
        a = [[g[k] for g in gs] + [-h[k] for h in hs] for k in range(span.dim)]
        b = [sum((h[k] for h in hs), Fraction(0)) - sum((g[k] for g in gs), Fraction(0))
             for k in range(span.dim)]
        return feasible_point(a, b) is not None

    def intersect(self, other: "PolyCone") -> "PolyCone":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("cones live in different spaces")
        common = self.span & other.span
        if common.dim == 0:
            return self._from_vectors([])
        t = common.dim
        lb = common.basis.to_lists()
        ineqs = []
        for cone in (self, other):
            piv = cone.span.pivots
            for normal, _ in cone.facets:
                ineqs.append([_dot(normal, [row[p] for p in piv]) for row in lb])
        rays_y = _rays_of_inequalities(ineqs, t)
        vectors = []
        for y in rays_y:
            x = [sum((y[i] * lb[i][j] for i in range(t)), Fraction(0)) for j in range(self.ambient_dim)]
            vectors.append(x)
        return self._from_vectors(vectors)

    def is_face_of(self, sigma: "PolyCone") -> bool:
        if not sigma.contains_cone(self):
            return False
        face = sigma.smallest_face_containing(self.interior_point())
        return face.same_cone(self)

    def same_cone(self, other: "PolyCone") -> bool:
        return self.contains_cone(other) and other.contains_cone(self)

    def extreme_rays(self) -> list[tuple[int, ...]]:
        """Primitive integer extreme rays of a sharp cone, sorted."""
        if not self.is_sharp():
            raise ValueError("extreme rays are only defined here for sharp cones")
        rays = set()
        for s in self._face_sets:
            if s and self._subcone(sorted(s)).dim == 1:
                rays.add(primitive_integer(self.vectors[min(s)]))
        return sorted(rays)

    def canonical(self) -> tuple:
        return (self.ambient_dim, tuple(self.extreme_rays()))

    def is_simplicial(self) -> bool:
        return len(self.extreme_rays()) == self.dim

    def __repr__(self) -> str:
        return f"{type(self).__name__}(ambient={self.ambient_dim}, gens={len(self.vectors)}, dim={self.dim})"


def _rays_of_inequalities(ineqs: list[list[Fraction]], t: int) -> list[list[Fraction]]:
    """Generators of {y ∈ Q^t : a·y ≥ 0 for every row a}."""
    if not ineqs or all(not any(a) for a in ineqs):
        out = []
        for i in range(t):
            e = [Fraction(int(i == j)) for j in range(t)]
            out.append(e)
            out.append([-x for x in e])
        return out
    a = Matrix.from_rows(ineqs, t)
    lin = a.nullspace().to_lists()
    gens = [list(v) for v in lin] + [[-x for x in v] for v in lin]
    row_space = Subspace.span(a)
    s = row_space.dim
    sb = row_space.basis.to_lists()
    # restrict the inequalities to the row space (a complement of the lineality space)
    restricted = [[_dot(ai, sb_k) for sb_k in sb] for ai in ineqs]
    seen = set()
    if s == 1:
        candidates = [[Fraction(1)], [Fraction(-1)]]
    else:
        candidates = []
        for subset in combinations(range(len(restricted)), s - 1):
            m = Matrix.from_rows([restricted[i] for i in subset], s)
            if m.rank() != s - 1:
                continue
            z = m.nullspace().row_list(0)
            candidates.append(z)
            candidates.append([-x for x in z])
    for z in candidates:
        if all(_dot(ai, z) >= 0 for ai in restricted):
            key = primitive_integer(z)
            if key in seen:
                continue
            seen.add(key)
            y = [sum((z[k] * sb[k][j] for k in range(s)), Fraction(0)) for j in range(t)]
            gens.append(y)
    return gens


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple
    supports: tuple[tuple[int, ...], ...]
    incidence: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self):
        return iter(self.faces)


class Cone(PolyCone):
    """Cone of commuting nilpotent n×n rational matrices."""

    def __init__(self, n: int, generators: Iterable[Matrix], check: bool = True):
        gens = [g for g in generators if not g.is_zero()]
        for g in gens:
            if g.shape != (n, n):
                raise DimensionMismatch("generator is not n×n")
            if not g.is_rational:
                raise ValueError("cone generators must be rational")
        if check:
            for g in gens:
                if not g.is_nilpotent():
                    raise NotNilpotent("cone generator is not nilpotent")
            for i, g in enumerate(gens):
                for h in gens[i + 1:]:
                    if not g.commutes_with(h):
                        raise NonCommuting("cone generators do not commute")
        self.n = n
        self.matrices: tuple[Matrix, ...] = tuple(gens)
        super().__init__(n * n, [g.entries() for g in gens])

    @classmethod
    def zero(cls, n: int) -> "Cone":
        return cls(n, [])

    def _subcone(self, indices):
        return Cone(self.n, [self.matrices[i] for i in indices], check=False)

    def _from_vectors(self, vectors):
        return Cone(self.n, [Matrix.from_flat(self.n, self.n, list(v)) for v in vectors], check=False)

    def point(self, coeffs: Sequence) -> Matrix:
        out = Matrix.zeros(self.n, self.n)
        for c, g in zip(coeffs, self.matrices):
            out = out + g.scale(c)
        return out

    def interior_matrix(self) -> Matrix:
        return self.point([1] * len(self.matrices))

    def contains_matrix(self, m: Matrix) -> bool:
        return self.contains(m.entries())

    def smallest_face_containing_matrix(self, m: Matrix) -> "Cone":
        return self.smallest_face_containing(m.entries())

    def ad(self, g: Matrix) -> "Cone":
        ginv = g.inverse()
        return Cone(self.n, [g @ x @ ginv for x in self.matrices], check=False)


class MarkedCone(PolyCone):
    """Cone in σ′ ×_{𝔤′} 𝔤: generators are pairs (x ∈ Q^r_{≥0}, N)."""

    def __init__(self, r: int, proj: Sequence[Matrix], pairs: Iterable[tuple[Sequence, Matrix]],
                 W=None, check: bool = True):
        pairs = [(tuple(Fraction(t) for t in x), N) for x, N in pairs]
        proj = tuple(proj)
        if len(proj) != r:
            raise DimensionMismatch("proj needs one matrix per coordinate of σ′")
        n = proj[0].nrows if proj else (pairs[0][1].nrows if pairs else 0)
        self.r, self.n, self.proj, self.W = r, n, proj, W
        pairs = [(x, N) for x, N in pairs if any(x) or not N.is_zero()]
        for x, N in pairs:
            if len(x) != r or N.shape != (n, n):
                raise DimensionMismatch("marked generator has the wrong shape")
            if any(t < 0 for t in x):
                raise ValueError("σ′-components must be non-negative")
        self.pairs = tuple(pairs)
        if check:
            mats = [N for _, N in pairs]
            for N in mats:
                if not N.is_nilpotent():
                    raise NotNilpotent("marked generator is not nilpotent")
            for i, g in enumerate(mats):
                for h in mats[i + 1:]:
                    if not g.commutes_with(h):
                        raise NonCommuting("marked generators do not commute")
            if W is not None:
                for x, N in pairs:
                    if not self.fiber_condition(x, N):
                        raise ValueError("generator violates gr(N) = proj(x)")
        super().__init__(r + n * n, [list(x) + N.entries() for x, N in pairs])

    def proj_of(self, x: Sequence) -> Matrix:
        out = Matrix.zeros(self.n, self.n)
        for t, p in zip(x, self.proj):
            out = out + p.scale(t)
        return out

    def fiber_condition(self, x: Sequence, N: Matrix) -> bool:
        from .filtration import GradedPiece

        target = self.proj_of(x)
        for w in self.W.jumps():
            gp = GradedPiece(self.W, w)
            if gp.induced_map(N) != gp.induced_map(target):
                return False
        return True

    def _subcone(self, indices):
        return MarkedCone(self.r, self.proj, [self.pairs[i] for i in indices], self.W, check=False)

    def _from_vectors(self, vectors):
        pairs = []
        for v in vectors:
            v = list(v)
            pairs.append((v[:self.r], Matrix.from_flat(self.n, self.n, v[self.r:])))
        return MarkedCone(self.r, self.proj, pairs, self.W, check=False)

    def g_component(self) -> Cone:
        return Cone(self.n, [N for _, N in self.pairs], check=False)

    def ad(self, g: Matrix) -> "MarkedCone":
        ginv = g.inverse()
        return MarkedCone(self.r, self.proj, [(x, g @ N @ ginv) for x, N in self.pairs], self.W,
                          check=False)


def faces(sigma: PolyCone) -> FaceLattice:
    return sigma.faces()


def sharp(sigma: PolyCone) -> bool:
    return sigma.is_sharp()


def intersect(a: PolyCone, b: PolyCone) -> PolyCone:
    return a.intersect(b)


def is_face_of(f: PolyCone, sigma: PolyCone) -> bool:
    return f.is_face_of(sigma)


def smallest_face_containing(sigma: PolyCone, v) -> PolyCone:
    if isinstance(v, Matrix):
        v = v.entries()
    return sigma.smallest_face_containing(v)


def relative_interiors_meet(a: PolyCone, b: PolyCone) -> bool:
    return a.relative_interiors_meet(b)
