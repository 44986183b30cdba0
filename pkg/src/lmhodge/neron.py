"""Néron-model fan constructions: Ad(υ)-translated cones, Kummer type, B₁, and the two-weight relatively complete fan."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, floor, lcm
from typing import Sequence

from .cones import MarkedCone
from .errors import DimensionMismatch, InvalidL, NotInCone, NotUnipotent
from .exactlin import Matrix, Subspace, hermite_rows, saturate, smith_form
from .filtration import IncFiltration, hom_operator, inc_hom
from .hodge import HodgeFrame
from .monodromy import weight_filtration


# integrality of exponentials -------------------------------------------------

def _denominator(m: Matrix) -> int:
    d = 1
    for x in m.entries():
        d = lcm(d, Fraction(x).denominator)
    return d


def exp_integral(X: Matrix) -> bool:
    return X.exp_nilpotent().is_integral()


def _search_bound(X: Matrix) -> int:
    k = X.nilpotency_index() or 1
    fact = 1
    for i in range(2, k):
        fact *= i
    return max(1, _denominator(X) ** max(k - 1, 1) * fact)


def integrality_lattice(Ns: Sequence[Matrix]) -> tuple[list[int], list[tuple[int, ...]]] | None:
    """Λ = {c ∈ Z^k : exp(Σ c_j N_j) integral} for commuting nilpotent N_j.

    Returns the minimal positive multiples m_j with m_j e_j ∈ Λ and the
    elements of Λ in the box ∏[0, m_j); None when some m_j does not exist.
    """
    ms = []
    for N in Ns:
        bound = _search_bound(N)
        m = next((t for t in range(1, bound + 1) if exp_integral(N.scale(t))), None)
        if m is None:
            return None
        ms.append(m)
    n = Ns[0].nrows if Ns else 0
    box = []
    for c in product(*[range(m) for m in ms]):
        X = Matrix.zeros(n, n)
        for cj, N in zip(c, Ns):
            if cj:
                X = X + N.scale(cj)
        if exp_integral(X):
            box.append(c)
    return ms, box


# Néron context and Σ(Υ) cones --------------------------------------------------

@dataclass
class NeronContext:
    """Frame with a coordinate splitting, σ′ = R^r_{≥0}, and the logs of the Γ′-generators as matrices on V."""

    frame: HodgeFrame
    proj: list[Matrix]

    def __post_init__(self):
        n = self.frame.n
        W = self.frame.W
        for p in self.proj:
            if p.shape != (n, n):
                raise DimensionMismatch("proj matrix has the wrong size")
            if not p.is_nilpotent():
                raise NotUnipotent("Γ′ generator images must be unipotent")
            for w in W.jumps():
                # block-diagonal with respect to the coordinate splitting of W
                if not (W[w].image(p) <= W[w]) or not self._splitting_piece(w).image(p) <= self._splitting_piece(w):
                    raise ValueError("proj must preserve the coordinate splitting")
        for i, a in enumerate(self.proj):
            for b in self.proj[i + 1:]:
                if not a.commutes_with(b):
                    raise ValueError("proj matrices must commute")

    @property
    def r(self) -> int:
        return len(self.proj)

    def _splitting_piece(self, w: int) -> Subspace:
        gp = self.frame.piece(w)
        return Subspace.span(gp.lifts) if gp.dim else Subspace.zero(self.frame.n)

    @property
    def gamma_prime_action(self) -> list[Matrix]:
        return [p.exp_nilpotent() for p in self.proj]


def _check_upsilon(ctx: NeronContext, upsilon: Matrix) -> None:
    if not upsilon.is_rational or not ctx.frame.in_group(upsilon, unipotent=True):
        raise NotUnipotent("υ must be a rational unipotent element acting trivially on gr^W")


def sigma_tau_upsilon(ctx: NeronContext, tau_prime: Sequence[int], upsilon: Matrix) -> MarkedCone:
    """The marked cone {(x, Ad(υ) x_𝔤) : x ∈ τ′}, τ′ given by coordinate indices of σ′."""
    _check_upsilon(ctx, upsilon)
    inv = upsilon.inverse()
    pairs = []
    for j in sorted(set(tau_prime)):
        if not 0 <= j < ctx.r:
            raise IndexError(f"face index {j} out of range")
        x = [int(i == j) for i in range(ctx.r)]
        pairs.append((x, upsilon @ ctx.proj[j] @ inv))
    return MarkedCone(ctx.r, ctx.proj, pairs, ctx.frame.W)


@dataclass
class KummerResult:
    kind: str  # Iso, Kummer or NotKummer
    index: int | None
    multiples: list[int] = field(default_factory=list)

    def __str__(self) -> str:
        if self.kind == "Kummer":
            return f"Kummer({self.index})"
        return self.kind


def kummer_type(ctx: NeronContext, sigma: MarkedCone) -> KummerResult:
    """The map Γ(σ) → Γ′(τ′): index of Λ = {c : exp(Σ c_j Ad(υ)N_j) ∈ G_Z} in Z^{τ′}."""
    Ns = [N for _, N in sigma.pairs]
    if not Ns:
        return KummerResult("Iso", 1)
    flat = Matrix.from_rows([N.entries() for N in Ns])
    if flat.rank() != len(Ns):
        return KummerResult("NotKummer", None)
    lat = integrality_lattice(Ns)
    if lat is None:
        return KummerResult("NotKummer", None)
    ms, box = lat
    total = 1
    for m in ms:
        total *= m
    index = total // len(box)
    return KummerResult("Iso" if index == 1 else "Kummer", index, ms)


def in_sigma1(ctx: NeronContext, sigma: MarkedCone) -> bool:
    return kummer_type(ctx, sigma).kind == "Iso"


# B₁ ----------------------------------------------------------------------------

@dataclass
class B1Description:
    """B₁ = {b : γ′b − b ∈ H′₀} as H′₀ + finite cyclic generators + divisible Q-lines."""

    rank: int
    finite: list[tuple[list[Fraction], int]]
    divisible: list[list[Fraction]]

    def contains(self, gamma: Matrix, b: Sequence) -> bool:
        col = Matrix.from_rows([[x] for x in b], 1)
        return ((gamma - Matrix.identity(self.rank)) @ col).is_integral()


def compute_B1(gamma: Matrix) -> B1Description:
    if not gamma.is_integral() or not gamma.is_square:
        raise ValueError("γ′ must be a square integral matrix")
    n = gamma.nrows
    A = gamma - Matrix.identity(n)
    if not A.is_nilpotent():
        raise NotUnipotent("γ′ is not unipotent")
    U, D, V = smith_form(A)
    Vinv = V.inverse()
    finite, divisible = [], []
    for i in range(n):
        d = int(D[i, i]) if i < min(D.nrows, D.ncols) else 0
        col = Vinv.col(i).T.row_list(0)
        if d == 0:
            divisible.append([Fraction(x) for x in _primitive(col)])
        elif abs(d) > 1:
            finite.append(([Fraction(x) / abs(d) for x in col], abs(d)))
    return B1Description(n, finite, divisible)


def _primitive(v: Sequence) -> list[int]:
    from .cones import primitive_integer

    return list(primitive_integer([Fraction(x) for x in v]))


# the two-weight relatively complete fan ---------------------------------------

@dataclass
class TwoWeightData:
    """Two weights a < b, the logs N′_a, N′_b, and an optional lattice L ⊆ Hom(H_b, H_a) (row-major rows)."""

    a: int
    b: int
    Na: Matrix
    Nb: Matrix
    L: Matrix | None = None

    def __post_init__(self):
        if self.a >= self.b:
            raise ValueError("need a < b")
        for N in (self.Na, self.Nb):
            if not N.is_square or not N.is_nilpotent() or not N.is_rational:
                raise ValueError("N′_a and N′_b must be rational nilpotent")

    @property
    def da(self) -> int:
        return self.Na.nrows

    @property
    def db(self) -> int:
        return self.Nb.nrows


def _lattice_basis(rows: Matrix) -> Matrix:
    den = _denominator(rows) if rows.nrows else 1
    return hermite_rows(rows.scale(den)).scale(Fraction(1, den))


def _lattice_meet_subspace(Lb: Matrix, S: Subspace) -> Matrix:
    """Z-basis (rows) of L ∩ S for a full-rank lattice with basis Lb."""
    if S.dim == 0:
        return Matrix.zeros(0, Lb.ncols)
    coords = S.basis @ Lb.inverse()
    return _lattice_basis(saturate(coords) @ Lb)


class RelCompleteFan:
    """The fan schema {σ(x, n)} with constructor and membership query."""

    def __init__(self, data: TwoWeightData):
        self.data = data
        da, db = data.da, data.db
        self.dim_v = da * db
        Ma = weight_filtration(data.Na, data.a)
        Mb = weight_filtration(data.Nb, data.b)
        T = hom_operator(data.Nb, data.Na)  # h ↦ N′_a h − h N′_b
        lowering = inc_hom(Mb, Ma)[-2]
        commutator_image = Subspace.span((T @ Matrix.identity(self.dim_v)).T) if self.dim_v else Subspace.zero(0)
        self.X = lowering + commutator_image
        self.Y = self.X & Subspace.zero(self.dim_v).preimage(T)
        self.L = self._lattice(T)
        self.XL = _lattice_meet_subspace(self.L, self.X)
        self.YL = _lattice_meet_subspace(self.L, self.Y)
        self.e = self.YL
        self.section = self._section()
        self._coord_basis = Matrix.vstack([self.section, self.e], self.dim_v)
        self.W = IncFiltration.from_dims_of_coordinates(da + db, [data.a] * da + [data.b] * db)
        self.proj = [Matrix.block_diag([data.Na, data.Nb])]

    # lattice and section ----------------------------------------------------
    def _gamma_maps(self) -> list[Matrix]:
        ga = self.data.Na.exp_nilpotent()
        gb_inv = self.data.Nb.exp_nilpotent(-1)
        g = ga.kron(gb_inv.T)  # h ↦ γ_a h γ_b⁻¹ on row-major vectors
        return [g, g.inverse()]

    def _lattice(self, T: Matrix) -> Matrix:
        std = Matrix.identity(self.dim_v)
        required = Matrix.vstack([std, (T @ std).T.scale(-1)], self.dim_v)
        maps = self._gamma_maps()
        if self.data.L is not None:
            Lb = _lattice_basis(self.data.L)
            if Lb.nrows != self.dim_v:
                raise InvalidL("L must have full rank in Hom(H_b, H_a)")
            for i in range(required.nrows):
                if not _in_lattice(Lb, required.row(i)):
                    raise InvalidL("L does not contain Hom_Z(H_b, H_a) + {hN′_b − N′_a h}")
            for g in maps:
                for i in range(Lb.nrows):
                    if not _in_lattice(Lb, Lb.row(i) @ g.T):
                        raise InvalidL("L is not stable under γ_a and γ_b")
            return Lb
        Lb = _lattice_basis(required)
        for _ in range(64):
            imgs = [Lb.row(i) @ g.T for g in maps for i in range(Lb.nrows)]
            bigger = _lattice_basis(Matrix.vstack([Lb] + imgs, self.dim_v))
            if bigger == Lb:
                return Lb
            Lb = bigger
        raise InvalidL("could not close the default lattice under γ_a, γ_b")

    def _section(self) -> Matrix:
        """Rows of X∩L completing a basis of Y∩L (from the Smith form of the inclusion)."""
        k, m = self.XL.nrows, self.e.nrows
        if k == m:
            return Matrix.zeros(0, self.dim_v)
        if m == 0:
            return self.XL
        coords = Matrix.hstack([self.e @ self.XL.T]) @ (self.XL @ self.XL.T).inverse()
        _, _, V = smith_form(coords)
        return V.submatrix(range(m, k), range(k)) @ self.XL

    @property
    def m(self) -> int:
        return self.e.nrows

    @property
    def quotient_rank(self) -> int:
        return self.section.nrows

    # cones and queries ---------------------------------------------------------
    @staticmethod
    def order(x: Sequence) -> int:
        d = 1
        for t in x:
            d = lcm(d, Fraction(t).denominator)
        return d

    def hom_component(self, x: Sequence, c: Sequence) -> Matrix:
        d = self.order(x)
        coeffs = [Fraction(t) for t in x] + [Fraction(t) / d for t in c]
        return Matrix.from_rows([coeffs], len(coeffs)) @ self._coord_basis

    def operator(self, h: Matrix) -> Matrix:
        da, db = self.data.da, self.data.db
        H = h.reshape(da, db)
        top = Matrix.hstack([self.data.Na, H])
        bottom = Matrix.hstack([Matrix.zeros(db, da), self.data.Nb])
        return Matrix.vstack([top, bottom])

    def cone(self, x: Sequence, n: Sequence[int]) -> MarkedCone:
        x = list(x) if x is not None else [0] * self.quotient_rank
        if len(x) != self.quotient_rank or len(n) != self.m:
            raise DimensionMismatch("x and n must match the ranks of X/Y and Y∩L")
        pairs = []
        for corner in product(*[(nj, nj + 1) for nj in n]):
            pairs.append(((1,), self.operator(self.hom_component(x, corner))))
        return MarkedCone(1, self.proj, pairs, self.W)

    def split(self, N: Matrix, t=1) -> tuple[list[Fraction], list[Fraction]]:
        """(x, c) with N/t having Hom-component s(x) + (1/d(x)) Σ c_j e_j."""
        da, db = self.data.da, self.data.db
        N = N.scale(Fraction(1) / Fraction(t))
        if N.submatrix(range(da), range(da)) != self.data.Na or \
                N.submatrix(range(da, da + db), range(da, da + db)) != self.data.Nb or \
                not N.submatrix(range(da, da + db), range(da)).is_zero():
            raise NotInCone("operator does not have the fixed graded components")
        h = N.submatrix(range(da), range(da, da + db)).flatten_row()
        if not self.X.contains(h):
            raise NotInCone("Hom-component is not in X; M(N, W) does not exist")
        sol = self._coord_basis.T.solve_particular(h.T)
        coeffs = [Fraction(v) for v in sol.T.row_list(0)]
        r = self.quotient_rank
        x = coeffs[:r]
        d = self.order(x)
        c = [d * v for v in coeffs[r:]]
        return x, c

    def query(self, N: Matrix, t=1) -> tuple[list[Fraction], list[int]]:
        x, c = self.split(N, t)
        return x, [floor(v) for v in c]


def _in_lattice(Lb: Matrix, v: Matrix) -> bool:
    sol = Lb.T.solve_particular(v.T)
    return sol is not None and sol.is_integral()


def build_relcomplete_fan(d: TwoWeightData) -> RelCompleteFan:
    return RelCompleteFan(d)


@dataclass
class ProbeResult:
    covered: bool
    pieces: list[tuple[tuple[int, ...], MarkedCone]] = field(default_factory=list)
    x: list[Fraction] | None = None
    failure: str | None = None


def relative_completeness_probe(fan: RelCompleteFan, probes: Sequence[MarkedCone]) -> list[ProbeResult]:
    """Subdivide each probe cone by the unit boxes of the c-coordinates and check coverage."""
    out = []
    for tau in probes:
        out.append(_probe_one(fan, tau))
    return out


def _probe_one(fan: RelCompleteFan, tau: MarkedCone) -> ProbeResult:
    if not tau.pairs:
        return ProbeResult(True, [], None)
    xs, cs = [], []
    for x, N in tau.pairs:
        if x[0] <= 0:
            return ProbeResult(False, failure="generator with zero σ′-component is not covered")
        try:
            xv, cv = fan.split(N, x[0])
        except NotInCone as exc:
            return ProbeResult(False, failure=str(exc))
        xs.append(xv)
        cs.append(cv)
    if any(xv != xs[0] for xv in xs):
        return ProbeResult(False, failure="generators lie over different classes in X/Y")
    m = fan.m
    ranges = []
    for j in range(m):
        lo = floor(min(c[j] for c in cs))
        top = ceil(max(c[j] for c in cs))
        ranges.append(range(lo, max(top, lo + 1)))
    pieces = []
    for n in product(*ranges):
        sigma = fan.cone(xs[0], list(n))
        piece = tau.intersect(sigma)
        if piece.dim == tau.dim:
            pieces.append((tuple(n), piece))
    probes = [list(v) for v in tau.vectors] + [list(tau.interior_point())]
    probes += [list(p.interior_point()) for _, p in pieces]
    uncovered = [v for v in probes if not any(p.contains(v) for _, p in pieces)]
    if uncovered:
        return ProbeResult(False, pieces, xs[0], failure=f"uncovered point {uncovered[0]}")
    return ProbeResult(True, pieces, xs[0])
