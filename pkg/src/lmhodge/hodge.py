"""Hodge frames, period-domain membership, the Deligne bigrading and the (s′, δ) splitting."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DimensionMismatch, NotMHS
from .exactlin import GaussRational, I, LatticeSubgroup, Matrix, Subspace, sum_all
from .filtration import DecFiltration, GradedPiece, IncFiltration, induced_dec

PeriodPoint = DecFiltration


def _i_power(k: int) -> GaussRational:
    return [GaussRational(1), GaussRational(0, 1), GaussRational(-1), GaussRational(0, -1)][k % 4]


@dataclass
class HodgeFrame:
    """Λ = (H₀, W, ⟨,⟩_w, h^{p,q}); pairings are Gram matrices in graded-piece coordinates."""

    W: IncFiltration
    pairings: Mapping[int, Matrix]
    hodge_numbers: Mapping[tuple[int, int], int]
    H0: LatticeSubgroup | None = None
    _pieces: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.W.ambient_dim
        if self.H0 is None:
            self.H0 = LatticeSubgroup.standard(n)
        self.hodge_numbers = {k: v for k, v in self.hodge_numbers.items() if v}
        if any(v < 0 for v in self.hodge_numbers.values()):
            raise ValueError("Hodge numbers must be non-negative")
        if sum(self.hodge_numbers.values()) != n:
            raise ValueError("Hodge numbers do not add up to the rank")
        for (p, q), h in self.hodge_numbers.items():
            if self.hodge_numbers.get((q, p), 0) != h:
                raise ValueError("Hodge numbers must satisfy h^{p,q} = h^{q,p}")
        gd = self.W.graded_dims()
        for w in set(gd) | {p + q for p, q in self.hodge_numbers}:
            want = sum(h for (p, q), h in self.hodge_numbers.items() if p + q == w)
            if gd.get(w, 0) != want:
                raise ValueError(f"Hodge numbers of weight {w} do not match dim gr^W_{w}")
        for w, d in gd.items():
            if w not in self.pairings:
                raise ValueError(f"missing pairing on gr^W_{w}")
            P = self.pairings[w]
            if P.shape != (d, d) or not P.is_rational:
                raise ValueError(f"pairing on gr^W_{w} has the wrong shape or is not rational")
            sign = 1 if w % 2 == 0 else -1
            if P.T != P.scale(sign):
                raise ValueError(f"pairing on gr^W_{w} is not (-1)^w-symmetric")
            if P.det() == 0:
                raise ValueError(f"pairing on gr^W_{w} is degenerate")
        self.pairings = {w: self.pairings[w] for w in gd}

    @property
    def n(self) -> int:
        return self.W.ambient_dim

    def weights(self) -> list[int]:
        return self.W.jumps()

    def piece(self, w: int) -> GradedPiece:
        if w not in self._pieces:
            self._pieces[w] = GradedPiece(self.W, w)
        return self._pieces[w]

    def hodge_range(self, w: int) -> list[int]:
        return sorted(p for (p, q) in self.hodge_numbers if p + q == w)

    def graded_frame(self, w: int) -> "HodgeFrame":
        """The pure frame on gr^W_w (in graded coordinates)."""
        d = self.piece(w).dim
        return HodgeFrame(IncFiltration.trivial(d, w), {w: self.pairings[w]},
                          {k: v for k, v in self.hodge_numbers.items() if k[0] + k[1] == w})

    def graded(self, w: int, F: DecFiltration) -> DecFiltration:
        return induced_dec(self.piece(w), F)

    # group and Lie algebra membership ------------------------------------
    def in_lie_algebra(self, X: Matrix) -> bool:
        """X ∈ 𝔤_ℚ: preserves W and is infinitesimally isometric on each gr^W_w."""
        if X.shape != (self.n, self.n):
            raise DimensionMismatch("operator has the wrong size")
        if not self.W.is_preserved_by(X):
            return False
        for w in self.weights():
            x = self.piece(w).induced_map(X)
            P = self.pairings[w]
            if not (x.T @ P + P @ x).is_zero():
                return False
        return True

    def in_group(self, g: Matrix, integral: bool = False, unipotent: bool = False) -> bool:
        if g.shape != (self.n, self.n) or not g.is_rational:
            return False
        if g.det() == 0 or not self.W.is_preserved_by(g):
            return False
        if integral and not (g.is_integral() and g.inverse().is_integral()):
            return False
        for w in self.weights():
            x = self.piece(w).induced_map(g)
            if x.T @ self.pairings[w] @ x != self.pairings[w]:
                return False
            if unipotent and x != Matrix.identity(x.nrows):
                return False
        return True


def _check_shape(frame: HodgeFrame, F: DecFiltration) -> None:
    if F.ambient_dim != frame.n:
        raise DimensionMismatch("Hodge filtration and frame have different ranks")


def _pairing_block(P: Matrix, a: Matrix, b: Matrix) -> Matrix:
    """Gram matrix ⟨a_i, b_j⟩ for rows a_i, b_j."""
    return a @ P @ b.T


def in_check_D(frame: HodgeFrame, F: DecFiltration) -> bool:
    """Membership in the compact dual: graded Hodge numbers and isotropy."""
    _check_shape(frame, F)
    for w in frame.weights():
        Fg = frame.graded(w, F)
        d = frame.piece(w).dim
        total = 0
        for p in range(Fg.lo - 1, Fg.hi + 2):
            got = Fg[p].dim - Fg[p + 1].dim
            if got != frame.hodge_numbers.get((p, w - p), 0):
                return False
            total += got
        if total != d:
            return False
        P = frame.pairings[w]
        for p in range(Fg.lo, Fg.hi + 1):
            a, b = Fg[p], Fg[w - p + 1]
            if a.dim and b.dim and not _pairing_block(P, a.basis, b.basis).is_zero():
                return False
    return True


def _hodge_decomposition(Fg: DecFiltration, w: int) -> dict[tuple[int, int], Subspace] | None:
    """H^{p,q} = F^p ∩ conj(F^q) on a pure piece, or None when they do not span."""
    d = Fg.ambient_dim
    Fbar = Fg.conj()
    parts = {}
    for p in range(Fg.lo, Fg.hi + 1):
        h = Fg[p] & Fbar[w - p]
        if h.dim:
            parts[(p, w - p)] = h
    if sum(h.dim for h in parts.values()) != d or sum_all(parts.values(), d).dim != d:
        return None
    return parts


def pure_polarized(P: Matrix, Fg: DecFiltration, w: int) -> bool:
    """(gr, F, ⟨,⟩) is a polarized Hodge structure of weight w."""
    d = Fg.ambient_dim
    if d == 0:
        return True
    for p in range(Fg.lo, Fg.hi + 1):
        a, b = Fg[p], Fg[w - p + 1]
        if a.dim and b.dim and not _pairing_block(P, a.basis, b.basis).is_zero():
            return False
    parts = _hodge_decomposition(Fg, w)
    if parts is None:
        return False
    for (p, q), h in parts.items():
        gram = _pairing_block(P, h.basis, h.basis.conj()).scale(_i_power(p - q))
        if not _positive_definite(gram):
            return False
    return True


def _positive_definite(gram: Matrix) -> bool:
    """Hermitian positive definiteness by leading principal minors."""
    k = gram.nrows
    for m in range(1, k + 1):
        minor = gram.submatrix(range(m), range(m)).det()
        minor = GaussRational.coerce(minor)
        if minor.im != 0:
            raise ArithmeticError("principal minor of a Hermitian matrix is not real")
        if minor.re <= 0:
            return False
    return True


def in_D(frame: HodgeFrame, F: DecFiltration) -> bool:
    """Graded-polarized mixed Hodge structure test."""
    _check_shape(frame, F)
    if not in_check_D(frame, F):
        return False
    return all(pure_polarized(frame.pairings[w], frame.graded(w, F), w) for w in frame.weights())


def is_mhs(W: IncFiltration, F: DecFiltration) -> bool:
    """Each gr^W_w carries a Hodge structure of weight w: F^p ⊕ conj(F^{w−p+1}) = gr."""
    for w in W.jumps():
        Fg = induced_dec(GradedPiece(W, w), F)
        if _hodge_decomposition(Fg, w) is None:
            return False
    return True


# Deligne bigrading -------------------------------------------------------

def deligne_bigrading(W: IncFiltration, F: DecFiltration) -> dict[tuple[int, int], Subspace]:
    """I^{p,q} = F^p ∩ W_{p+q} ∩ (conj(F^q) ∩ W_{p+q} + Σ_{j≥1} conj(F^{q−j}) ∩ W_{p+q−j−1})."""
    if W.ambient_dim != F.ambient_dim:
        raise DimensionMismatch("W and F live on different spaces")
    if not is_mhs(W, F):
        raise NotMHS("(W, F) is not a mixed Hodge structure")
    n = W.ambient_dim
    Fbar = F.conj()
    out = {}
    depth = W.hi - W.lo + 2
    for w in W.jumps():
        for p in range(F.lo - 1, F.hi + 2):
            q = w - p
            inner = [Fbar[q] & W[w]] + [Fbar[q - j] & W[w - j - 1] for j in range(1, depth + 1)]
            s = F[p] & W[w] & sum_all(inner, n)
            if s.dim:
                out[(p, q)] = s
    if sum(s.dim for s in out.values()) != n:
        raise NotMHS("bigrading does not span; (W, F) is not a mixed Hodge structure")
    return out


def _bigrading_basis(bigr: Mapping[tuple[int, int], Subspace]) -> tuple[Matrix, list[tuple[int, int]]]:
    rows, labels = [], []
    for key in sorted(bigr):
        s = bigr[key]
        rows.append(s.basis)
        labels.extend([key] * s.dim)
    return Matrix.vstack(rows), labels


def grading_operator(bigr: Mapping[tuple[int, int], Subspace]) -> Matrix:
    """Y acting by p + q on I^{p,q}."""
    B, labels = _bigrading_basis(bigr)
    C = B.T
    return C @ Matrix.diag([p + q for p, q in labels]) @ C.inverse()


def _degree_parts(X: Matrix, C: Matrix, Cinv: Matrix, eig: list[int]) -> dict[int, Matrix]:
    """Decompose X by ad(Y)-eigenvalue, Y diagonal with entries eig in the basis C."""
    Xb = (Cinv @ X @ C).to_lists()
    n = len(eig)
    parts: dict[int, list[list]] = {}
    for i in range(n):
        for j in range(n):
            if Xb[i][j]:
                k = eig[i] - eig[j]
                parts.setdefault(k, [[0] * n for _ in range(n)])[i][j] = Xb[i][j]
    return {k: C @ Matrix.from_rows(m, n) @ Cinv for k, m in parts.items()}


def _exp_ad(X: Matrix, Y: Matrix, order: int) -> Matrix:
    """Ad(exp X) Y = e^{ad X} Y for nilpotent X."""
    out, term = Y, Y
    for m in range(1, order + 1):
        term = X.commutator(term).scale(Fraction(1, m))
        if term.is_zero():
            break
        out = out + term
    return out


def in_L_minus(bigr: Mapping[tuple[int, int], Subspace], X: Matrix) -> bool:
    """X ∈ L^{−1,−1}: X I^{p,q} ⊆ ⊕_{p'<p, q'<q} I^{p',q'}."""
    n = X.nrows
    for (p, q), s in bigr.items():
        target = sum_all([t for (a, b), t in bigr.items() if a < p and b < q], n)
        if not target.contains(s.image(X)):
            return False
    return True


@dataclass
class DeltaSplitting:
    """F = s′(exp(iδ_gr)·F(gr^W)).

    ``s_prime`` maps graded coordinates (the concatenated echelon-lift
    coordinates of the pieces gr^W_w, lowest weight first) into V;
    ``delta`` acts on V and ``delta_gr`` = s′⁻¹ δ s′ on graded coordinates.
    ``lift`` is the matrix whose columns are the echelon lifts, so
    ``s_prime @ lift⁻¹`` is the corresponding automorphism of V.
    """

    s_prime: Matrix
    delta: Matrix
    delta_gr: Matrix
    lift: Matrix
    F_gr: DecFiltration

    @property
    def splitting_automorphism(self) -> Matrix:
        return self.s_prime @ self.lift.inverse()

    def reconstruct(self) -> DecFiltration:
        return self.F_gr.apply(self.s_prime @ self.delta_gr.exp_nilpotent(I))


def graded_filtration(W: IncFiltration, F: DecFiltration) -> tuple[Matrix, DecFiltration]:
    """The lift matrix (columns: echelon lifts) and F(gr^W) as a filtration on ⊕ gr_w."""
    blocks, lifts = [], []
    for w in W.jumps():
        gp = GradedPiece(W, w)
        lifts.append(gp.lifts)
        blocks.append(induced_dec(gp, F))
    lift = Matrix.vstack(lifts).T
    return lift, _dec_block_sum(blocks)


def _dec_block_sum(blocks: list[DecFiltration]) -> DecFiltration:
    n = sum(b.ambient_dim for b in blocks)
    lo = min(b.lo for b in blocks)
    hi = max(b.hi for b in blocks)
    steps = {}
    for p in range(lo, hi + 2):
        rows, off = [], 0
        for b in blocks:
            s = b[p]
            if s.dim:
                rows.append(Matrix.hstack([Matrix.zeros(s.dim, off), s.basis,
                                           Matrix.zeros(s.dim, n - off - b.ambient_dim)]))
            off += b.ambient_dim
        steps[p] = Subspace.span(Matrix.vstack(rows)) if rows else Subspace.zero(n)
    return DecFiltration(n, steps)


def delta_splitting(W: IncFiltration, F: DecFiltration) -> DeltaSplitting:
    """The pair (s′, δ) with δ real in L^{−1,−1} and F = s′(exp(iδ)F(gr^W)).

    Y is the Deligne grading; conj(Y) = Ad(exp(−2iδ))Y is solved one
    ad(Y)-degree at a time, and s′ comes from the eigenspaces of the real
    grading Ad(exp(−iδ))Y.
    """
    bigr = deligne_bigrading(W, F)
    n = W.ambient_dim
    B, labels = _bigrading_basis(bigr)
    C = B.T
    Cinv = C.inverse()
    eig = [p + q for p, q in labels]
    Y = C @ Matrix.diag(eig) @ Cinv
    Ybar = Y.conj()
    span = max(eig) - min(eig) if eig else 0
    delta = Matrix.zeros(n, n)
    for k in range(1, span + 1):
        R = _exp_ad(delta.scale(GaussRational(0, -2)), Y, span + 1)
        diff = _degree_parts(Ybar - R, C, Cinv, eig).get(-k)
        if diff is None:
            continue
        delta = delta + diff.scale(GaussRational(0, Fraction(1, 2 * k)))
    if _exp_ad(delta.scale(GaussRational(0, -2)), Y, span + 1) != Ybar:
        raise NotMHS("could not solve for δ; (W, F) is not a mixed Hodge structure")
    if not delta.is_rational:
        raise ArithmeticError("δ is not real")
    if not in_L_minus(bigr, delta):
        raise ArithmeticError("δ is not in L^{-1,-1}")
    Yhat = _exp_ad(delta.scale(GaussRational(0, -1)), Y, span + 1)
    if not Yhat.is_rational:
        raise ArithmeticError("the split grading is not real")
    lift, F_gr = graded_filtration(W, F)
    cols = []
    for w in W.jumps():
        gp = GradedPiece(W, w)
        # eigenspace of Yhat for eigenvalue w, projected isomorphically onto gr_w
        E = Subspace.span((Yhat - Matrix.identity(n).scale(w)).nullspace()) & W[w]
        proj = gp.project(E.basis)
        # rows of coeff @ E.basis project to the identity of gr_w
        coeff = proj.inverse()
        cols.append((coeff @ E.basis).T)
    s_prime = Matrix.hstack(cols)
    delta_gr = s_prime.inverse() @ delta @ s_prime
    out = DeltaSplitting(s_prime, delta, delta_gr, lift, F_gr)
    if out.reconstruct() != F:
        raise ArithmeticError("δ-splitting reconstruction failed")
    return out


# random instances ----------------------------------------------------------

def random_gauss(rng: random.Random, bound: int = 3, complex_: bool = True) -> GaussRational:
    re = Fraction(rng.randint(-bound, bound), rng.randint(1, 2))
    im = Fraction(rng.randint(-bound, bound), rng.randint(1, 2)) if complex_ else Fraction(0)
    return GaussRational(re, im)


def random_hodge_structure(rng: random.Random, dim_by_pq: Mapping[tuple[int, int], int]) -> dict[tuple[int, int], Matrix]:
    """Random H^{p,q} blocks with conj(H^{p,q}) = H^{q,p}, spanning Q(i)^d."""
    d = sum(dim_by_pq.values())
    while True:
        blocks: dict[tuple[int, int], Matrix] = {}
        for (p, q), h in sorted(dim_by_pq.items()):
            if not h or p < q:
                continue
            if p == q:
                rows = [[Fraction(rng.randint(-3, 3)) for _ in range(d)] for _ in range(h)]
                blocks[(p, q)] = Matrix.from_rows(rows, d)
            else:
                rows = [[random_gauss(rng) for _ in range(d)] for _ in range(h)]
                m = Matrix.from_rows(rows, d)
                blocks[(p, q)] = m
                blocks[(q, p)] = m.conj()
        allrows = Matrix.vstack(list(blocks.values()))
        if allrows.rank() == d:
            return blocks


def random_mhs(rng: random.Random, weights_dims: Mapping[int, Mapping[tuple[int, int], int]]
               ) -> tuple[IncFiltration, DecFiltration]:
    """A random mixed Hodge structure with rational coordinate weight filtration."""
    order = sorted(weights_dims)
    coords, rows_by_pq = [], {}
    n = sum(sum(v.values()) for v in weights_dims.values())
    off = 0
    for w in order:
        d = sum(weights_dims[w].values())
        coords.extend([w] * d)
        blocks = random_hodge_structure(rng, weights_dims[w])
        for key, m in blocks.items():
            padded = Matrix.hstack([Matrix.zeros(m.nrows, off), m, Matrix.zeros(m.nrows, n - off - d)])
            rows_by_pq[key] = padded
        off += d
    W = IncFiltration.from_dims_of_coordinates(n, coords)
    ps = sorted({p for p, _ in rows_by_pq})
    steps = {}
    for p in range(ps[0], ps[-1] + 2):
        sel = [m for (a, _), m in rows_by_pq.items() if a >= p]
        steps[p] = Subspace.span(Matrix.vstack(sel)) if sel else Subspace.zero(n)
    F_split = DecFiltration(n, steps)
    # twist by a random complex unipotent map that is the identity on gr^W
    u = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if coords[i] < coords[j]:
                u[i][j] = random_gauss(rng)
    g = Matrix.from_rows(u, n)
    return W, F_split.apply(g)
