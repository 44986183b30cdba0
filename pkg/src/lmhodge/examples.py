"""Builders for the worked examples: frames, flags, cones, groups and Néron data.

Everything derivable is assembled from the tensor / direct-sum constructors
rather than typed in as matrices.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .cones import Cone, MarkedCone, PolyCone
from .exactlin import I, Matrix, Subspace
from .filtration import (
    DecFiltration,
    IncFiltration,
    dec_direct_sum,
    dec_restrict,
    dec_tensor,
    tensor_operator,
)
from .fans import FanSet, GroupData
from .hodge import HodgeFrame
from .neron import NeronContext, TwoWeightData

# the rank-2 building block: N′e₂ = e₁, ⟨e₂, e₁⟩ = 1
NPRIME = Matrix.from_rows([[0, 1], [0, 0]])
SYMPLECTIC = Matrix.from_rows([[0, -1], [1, 0]])


def unit(n: int, i: int, j: int, value=1) -> Matrix:
    return Matrix.unit(n, n, i, j, value)


def flag(n: int, steps: dict[int, Sequence[Sequence]]) -> DecFiltration:
    """Decreasing filtration from explicit spanning rows; the lowest index listed should be everything."""
    return DecFiltration(n, {p: Subspace.span(Matrix.from_rows(rows, n)) if rows else Subspace.zero(n)
                             for p, rows in steps.items()})


def elliptic_flag(tau, top: int = 0) -> DecFiltration:
    """Weight 2·top − 1 flag on L: F^top = C(τe₁ + e₂), F^{top−1} = L."""
    return flag(2, {top - 1: [[1, 0], [0, 1]], top: [[tau, 1]]})


def kron_all(mats: Sequence[Matrix]) -> Matrix:
    out = mats[0]
    for m in mats[1:]:
        out = out.kron(m)
    return out


def restrict_operator(T: Matrix, S: Subspace) -> Matrix:
    """Matrix of T on the invariant subspace S in the coordinates of S's canonical basis."""
    return S.coordinates(S.basis @ T.T).T


# extension of Z by Z(1) --------------------------------------------------------

def frame_z1() -> HodgeFrame:
    W = IncFiltration.from_dims_of_coordinates(2, [-2, 0])
    return HodgeFrame(W, {-2: Matrix.identity(1), 0: Matrix.identity(1)}, {(0, 0): 1, (-1, -1): 1})


def flag_z1(z) -> DecFiltration:
    return flag(2, {-1: [[1, 0], [0, 1]], 0: [[z, 1]]})


def cone_z1(sign: int = 1) -> Cone:
    return Cone(2, [unit(2, 0, 1, sign)])


def fan_z1() -> FanSet:
    return FanSet([cone_z1(1), cone_z1(-1), Cone.zero(2)])


def group_z1() -> GroupData:
    return GroupData([unit(2, 0, 1).exp_nilpotent()], frame_z1())


# extension of Z by H¹(E)(1) ------------------------------------------------------

def frame_elliptic_ext(b: int = 1) -> HodgeFrame:
    """H¹(E)(b) extended by Z; b = 1 gives weights −1, 0."""
    w = 1 - 2 * b
    W = IncFiltration.from_dims_of_coordinates(3, [w, w, 0])
    return HodgeFrame(W, {w: SYMPLECTIC, 0: Matrix.identity(1)},
                      {(0, 0): 1, (1 - b, -b): 1, (-b, 1 - b): 1})


def flag_elliptic_ext(tau, z) -> DecFiltration:
    return flag(3, {-1: [[1, 0, 0], [0, 1, 0], [0, 0, 1]], 0: [[tau, 1, 0], [z, 0, 1]]})


def flag_elliptic_twist(tau, z, w, b: int = 2) -> DecFiltration:
    """F^0 = F^{2−b} = C(ze₁ + we₂ + e₃) ⊂ F^{1−b} = F^0 + C(τe₁ + e₂) ⊂ F^{−b} = V."""
    full = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    v = [z, w, 1]
    steps: dict[int, list] = {-b: full, 1 - b: [v, [tau, 1, 0]]}
    for p in range(2 - b, 1):
        steps[p] = [v]
    return flag(3, steps)


def N_line(n) -> Matrix:
    """N_n: e₂ ↦ e₁, e₃ ↦ n·e₁."""
    return unit(3, 0, 1) + unit(3, 0, 2, n)


def sigma_n(n) -> Cone:
    return Cone(3, [N_line(n)])


def sigma_nn1(n) -> Cone:
    return Cone(3, [N_line(n), N_line(n + 1)])


def _line_index(ray: Sequence[int]) -> int | None:
    """n when the ray is a positive multiple of N_n, else None."""
    v = list(ray)
    if any(v[k] for k in range(9) if k not in (1, 2)) or v[1] <= 0:
        return None
    q = Fraction(v[2], v[1])
    return q.numerator if q.denominator == 1 else None


def line_fan_schema(with_pairs: bool = True):
    """Membership in {σ_n, σ_{n,n+1}, {0}} (n ∈ Z), decided from extreme rays."""

    def member(c: PolyCone) -> bool:
        if not isinstance(c, Cone) or c.n != 3:
            return False
        idx = [_line_index(r) for r in c.extreme_rays()]
        if any(i is None for i in idx):
            return False
        idx = sorted(idx)
        if len(idx) <= 1:
            return True
        return with_pairs and len(idx) == 2 and idx[1] == idx[0] + 1

    return member


def line_fan_window(lo: int = -3, hi: int = 3, with_pairs: bool = True) -> FanSet:
    cones: list[PolyCone] = [Cone.zero(3)]
    for n in range(lo, hi + 1):
        cones.append(sigma_n(n))
        if with_pairs and n < hi:
            cones.append(sigma_nn1(n))
    return FanSet(cones, schema=line_fan_schema(with_pairs))


def group_elliptic_ext() -> GroupData:
    """Integral upper unitriangular 3×3 matrices."""

    def unitriangular(g: Matrix) -> bool:
        return all(g[i, i] == 1 for i in range(3)) and all(g[i, j] == 0 for i in range(3) for j in range(i))

    gens = [unit(3, 0, 1).exp_nilpotent(), unit(3, 0, 2).exp_nilpotent(), unit(3, 1, 2).exp_nilpotent()]
    return GroupData(gens, frame_elliptic_ext(), unitriangular)


def neron_elliptic_ext() -> NeronContext:
    return NeronContext(frame_elliptic_ext(), [unit(3, 0, 1)])


def upsilon_translation(b1, b2) -> Matrix:
    """υ: e₃ ↦ e₃ + b₁e₁ + b₂e₂."""
    return Matrix.identity(3) + unit(3, 0, 2, b1) + unit(3, 1, 2, b2)


def marked_line(n) -> MarkedCone:
    ctx = neron_elliptic_ext()
    return MarkedCone(1, ctx.proj, [((1,), N_line(n))], ctx.frame.W)


def two_weight_elliptic_ext() -> TwoWeightData:
    return TwoWeightData(-1, 0, NPRIME, Matrix.zeros(1, 1))


def marked_twist(n, b: int = 2) -> MarkedCone:
    frame = frame_elliptic_ext(b)
    return MarkedCone(1, [unit(3, 0, 1)], [((1,), N_line(n))], frame.W)


# tensor examples ----------------------------------------------------------------

def tensor_sum_operators() -> list[Matrix]:
    """N′₁, N′₂, N′₃ on L⊗L⊗L ⊕ L² ⊕ L² ⊕ L² (rank 20)."""
    one = Matrix.identity(2)
    zero4 = Matrix.zeros(4, 4)
    pair = Matrix.block_diag([NPRIME, NPRIME])
    triple = [kron_all([NPRIME if k == j else one for k in range(3)]) for j in range(3)]
    out = []
    for j in range(3):
        blocks = [triple[j]] + [pair if k == j else zero4 for k in range(3)]
        out.append(Matrix.block_diag(blocks))
    return out


def tensor_sum_monodromies() -> list[Matrix]:
    return [N.exp_nilpotent() for N in tensor_sum_operators()]


def extend_by_zero(N: Matrix, extra: int = 1) -> Matrix:
    return Matrix.block_diag([N, Matrix.zeros(extra, extra)])


def frame_square() -> HodgeFrame:
    """L⊗L of weight −2 extended by Z (rank 5)."""
    W = IncFiltration.from_dims_of_coordinates(5, [-2] * 4 + [0])
    return HodgeFrame(W, {-2: SYMPLECTIC.kron(SYMPLECTIC), 0: Matrix.identity(1)},
                      {(0, -2): 1, (-1, -1): 2, (-2, 0): 1, (0, 0): 1})


def square_operators() -> tuple[Matrix, Matrix]:
    one = Matrix.identity(2)
    return extend_by_zero(NPRIME.kron(one)), extend_by_zero(one.kron(NPRIME))


def square_cone() -> Cone:
    return Cone(5, list(square_operators()))


def square_gamma(m, n) -> Matrix:
    """Fixes L⊗L, sends e to e + m·e₁⊗e₂ − n·e₂⊗e₁."""
    return Matrix.identity(5) + unit(5, 1, 4, m) + unit(5, 2, 4, -n)


def square_N0() -> Matrix:
    return unit(5, 0, 4)


def flag_square(tau, a: Sequence = (0, 0, 0, 0)) -> DecFiltration:
    """(F_τ ⊗ F_τ) ⊕ C(e + a) on L⊗L ⊕ Z."""
    FL = elliptic_flag(tau)
    FF = dec_tensor(FL, FL)

    def lift(sub: Subspace) -> Matrix:
        return Matrix.hstack([sub.basis, Matrix.zeros(sub.dim, 1)]) if sub.dim else Matrix.zeros(0, 5)

    ext = Matrix.from_rows([list(a) + [1]], 5)
    return DecFiltration(5, {-2: Subspace.full(5),
                             -1: Subspace.span(Matrix.vstack([lift(FF[-1]), ext], 5)),
                             0: Subspace.span(Matrix.vstack([lift(FF[0]), ext], 5))})


def square_window(pairs: Sequence[tuple[int, int]] = ((1, 1), (1, 2), (2, 1))) -> FanSet:
    """Faces of τ and of Ad(γ_{m,n})τ for the given (m, n)."""
    tau = square_cone()
    return FanSet.from_faces([tau] + [tau.ad(square_gamma(m, n)) for m, n in pairs])


def cube_gamma(m, n) -> Matrix:
    """On L⊗L⊗L ⊕ L⁶ ⊕ Ze: e ↦ e + m·e₁⊗e₂⊗e₁ − n·e₂⊗e₁⊗e₁."""
    return Matrix.identity(21) + unit(21, 2, 20, m) + unit(21, 4, 20, -n)


def cube_operators() -> list[Matrix]:
    return [extend_by_zero(N) for N in tensor_sum_operators()]


def cube_N0() -> Matrix:
    return unit(21, 0, 20)


# L⊗L ⊕ Sym²L, pure of weight 2 ---------------------------------------------------

def sym_subspace() -> Subspace:
    """Sym²L inside L⊗L with basis e₁⊗e₁, e₁⊗e₂ + e₂⊗e₁, e₂⊗e₂."""
    return Subspace.span(Matrix.from_rows([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1]]))


def sym_form() -> Matrix:
    S = sym_subspace()
    return S.basis @ SYMPLECTIC.kron(SYMPLECTIC) @ S.basis.T


def sym_operator(N: Matrix) -> Matrix:
    return restrict_operator(tensor_operator(N, N), sym_subspace())


def frame_sym() -> HodgeFrame:
    W = IncFiltration.trivial(7, 2)
    P = Matrix.block_diag([SYMPLECTIC.kron(SYMPLECTIC), sym_form()])
    return HodgeFrame(W, {2: P}, {(2, 0): 2, (1, 1): 3, (0, 2): 2})


def sym_operators() -> list[Matrix]:
    one = Matrix.identity(2)
    z4, z3 = Matrix.zeros(4, 4), Matrix.zeros(3, 3)
    return [Matrix.block_diag([NPRIME.kron(one), z3]), Matrix.block_diag([one.kron(NPRIME), z3]),
            Matrix.block_diag([z4, sym_operator(NPRIME)])]


def sym_cone() -> Cone:
    return Cone(7, sym_operators())


def flag_sym(tau=I) -> DecFiltration:
    """(F⊗F) ⊕ Sym²F for F^1 = C(τe₁ + e₂) of weight 1."""
    FL = elliptic_flag(tau, top=1)
    FF = dec_tensor(FL, FL)
    return dec_direct_sum(FF, dec_restrict(FF, sym_subspace()))


# coordinates on L⊗L ⊕ Sym²L: e11 e12 e21 e22 | u = e₁², v = e₁⊗e₂ + e₂⊗e₁, w = e₂²
E11, E12, E21, E22, U, V, WW = range(7)


def sym_gamma(m, n) -> Matrix:
    """The pairing-preserving transformation fixing mN₁ + nN₂ + ℓN₃ used for the non-sharpness certificate."""
    g = Matrix.identity(7)
    g = g + unit(7, U, E12, -n) + unit(7, U, E21, m)
    g = g + unit(7, E12, WW, m) + unit(7, E21, WW, -n) + unit(7, U, WW, -m * n)
    return g


def sym_gamma_as_printed(m, n) -> Matrix:
    """The transformation with the coefficients as literally displayed; not an isometry."""
    g = Matrix.identity(7)
    g = g + unit(7, E12, WW, m) + unit(7, E21, WW, -n)
    return g + unit(7, U, E12, n) + unit(7, U, E21, m)


def sym_N0() -> Matrix:
    """w ↦ e₁⊗e₁ and e₂⊗e₂ ↦ −u; the drift direction of the Ad(γ)-orbit."""
    return unit(7, E11, WW) + unit(7, U, E22, -1)


def sym_N0_as_printed() -> Matrix:
    return unit(7, E11, WW)


def combination(Ns: Sequence[Matrix], coeffs: Sequence) -> Matrix:
    out = Matrix.zeros(Ns[0].nrows, Ns[0].ncols)
    for c, N in zip(coeffs, Ns):
        out = out + N.scale(c)
    return out


__all__ = [name for name in dir() if not name.startswith("_")]
