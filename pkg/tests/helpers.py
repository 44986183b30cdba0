"""Random instances with independently known answers, shared by the test modules."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from lmhodge import examples as ex
from lmhodge.exactlin import Matrix, Subspace
from lmhodge.filtration import FilteredNilp, IncFiltration


@dataclass
class BlockInstance:
    """(W, N) = g·(⊕ Jordan strings placed in pure weights)·g⁻¹ with its known M(N, W).

    ``weights[i]`` is the W-weight of coordinate i of the split model and
    ``mweights[i]`` its M-weight; g is unipotent and preserves W, so M(N, W) is
    the image under g of the coordinate filtration by ``mweights``.
    """

    x: FilteredNilp
    M: IncFiltration
    g: Matrix
    N0: Matrix
    weights: list[int]
    mweights: list[int]


def coordinate_filtration(n: int, weights: list[int], basis: Matrix | None = None) -> IncFiltration:
    """W_w spanned by the basis vectors (rows) of weight ≤ w."""
    basis = basis if basis is not None else Matrix.identity(n)
    if n == 0:
        return IncFiltration(0, {})
    steps = {}
    for w in range(min(weights) - 1, max(weights) + 1):
        rows = [basis.row(i) for i in range(n) if weights[i] <= w]
        steps[w] = Subspace.span(Matrix.vstack(rows)) if rows else Subspace.zero(n)
    return IncFiltration(n, steps)


def random_blocks(rng: random.Random, max_dim: int) -> list[tuple[int, int]]:
    """(string length, W-weight) pairs with total dimension in [1, max_dim]."""
    total = rng.randint(1, max_dim)
    blocks = []
    while total:
        k = rng.randint(1, min(total, 3))
        blocks.append((k, rng.randint(-2, 1)))
        total -= k
    return blocks


def random_block_instance(rng: random.Random, max_dim: int = 4, conjugate: bool = True) -> BlockInstance:
    blocks = sorted(random_blocks(rng, max_dim), key=lambda b: b[1])
    n = sum(k for k, _ in blocks)
    N0 = [[Fraction(0)] * n for _ in range(n)]
    weights, mweights = [], []
    off = 0
    for k, w in blocks:
        # coordinates off..off+k-1 are N^{k-1}v, ..., Nv, v
        for j in range(k):
            weights.append(w)
            mweights.append(w - (k - 1) + 2 * j)
            if j:
                N0[off + j - 1][off + j] = Fraction(1)
        off += k
    N0 = Matrix.from_rows(N0, n)
    g = Matrix.identity(n)
    if conjugate:
        rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                if weights[i] <= weights[j] and rng.random() < 0.6:
                    rows[i][j] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        g = Matrix.from_rows(rows, n)
    N = g @ N0 @ g.inverse()
    W = coordinate_filtration(n, weights)
    # the columns of g are the images of the split basis vectors
    M = coordinate_filtration(n, mweights, g.T)
    return BlockInstance(FilteredNilp(W, N), M, g, N0, weights, mweights)


def lowering_commutant(inst: BlockInstance, rng: random.Random) -> Matrix:
    """A random h commuting with N and with h W_k ⊆ W_{k−1}."""
    n = inst.x.dim
    N0 = inst.N0
    # unknowns X[i][j] allowed only when weight(i) < weight(j)
    slots = [(i, j) for i in range(n) for j in range(n) if inst.weights[i] < inst.weights[j]]
    if not slots:
        return Matrix.zeros(n, n)
    eqs = []
    for a in range(n):
        for b in range(n):
            # (X N0 − N0 X)[a][b] = Σ_c X[a][c] N0[c][b] − N0[a][c] X[c][b]
            row = []
            for i, j in slots:
                v = Fraction(0)
                if i == a:
                    v += N0[j, b]
                if j == b:
                    v -= N0[a, i]
                row.append(v)
            eqs.append(row)
    kernel = Matrix.from_rows(eqs, len(slots)).nullspace()
    X = [[Fraction(0)] * n for _ in range(n)]
    if kernel.nrows:
        coeffs = [Fraction(rng.randint(-2, 2)) for _ in range(kernel.nrows)]
        vec = [sum((c * kernel[r, s] for r, c in enumerate(coeffs)), Fraction(0)) for s in range(len(slots))]
        for (i, j), v in zip(slots, vec):
            X[i][j] = Fraction(v)
    X = Matrix.from_rows(X, n)
    return inst.g @ X @ inst.g.inverse()


# corpus cones with the W they are admissible for; the 21-dimensional cube cone is left out
CORPUS_CONES = [
    ("z1", ex.cone_z1(), ex.frame_z1().W),
    ("line0", ex.sigma_n(0), ex.frame_elliptic_ext().W),
    ("line01", ex.sigma_nn1(2), ex.frame_elliptic_ext().W),
    ("twist", ex.sigma_nn1(0), ex.frame_elliptic_ext(2).W),
    ("square", ex.square_cone(), ex.frame_square().W),
    ("sym", ex.sym_cone(), ex.frame_sym().W),
]
