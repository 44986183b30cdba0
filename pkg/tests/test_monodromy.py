import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import CORPUS_CONES, coordinate_filtration, lowering_commutant, random_block_instance
from lmhodge import examples as ex
from lmhodge.cones import Cone, PolyCone
from lmhodge.errors import NonCommuting, RMFNotExists
from lmhodge.exactlin import Matrix, Subspace
from lmhodge.filtration import (
    FilteredNilp,
    IncFiltration,
    combine,
    inc_direct_sum,
    inc_hom,
    inc_restrict,
    inc_tensor,
)
from lmhodge.monodromy import (
    adjoint_action,
    check_admissible,
    is_weight_filtration_of,
    relative_monodromy,
    successive_filtrations,
    verify_rmf,
    weight_filtration,
    weight_filtration_by_peeling,
)

seeds = st.integers(0, 100_000)


def inc(n, steps):
    return IncFiltration(n, {w: Subspace.span(r, n) if r else Subspace.zero(n) for w, r in steps.items()})


# weight filtrations ----------------------------------------------------------------

def test_weight_filtration_of_jordan_block():
    M = weight_filtration(ex.NPRIME)
    assert M == inc(2, {-2: [], -1: [[1, 0]], 0: [[1, 0]], 1: [[1, 0], [0, 1]]})


def test_weight_filtration_of_zero_is_concentrated():
    M = weight_filtration(Matrix.zeros(3, 3), 4)
    assert M.jumps() == [4] and M[3].is_zero()


def test_weight_filtration_gr_minus_one_example():
    M = weight_filtration(ex.NPRIME, -1)
    assert M == inc(2, {-3: [], -2: [[1, 0]], -1: [[1, 0]], 0: [[1, 0], [0, 1]]})


@given(seeds, st.integers(-2, 2))
def test_weight_filtration_agrees_with_peeling(seed, c):
    inst = random_block_instance(random.Random(seed), 6)
    N = inst.x.N
    M = weight_filtration(N, c)
    assert M == weight_filtration_by_peeling(N, c)
    assert is_weight_filtration_of(N, M, c)


# relative monodromy: worked values and oracle ---------------------------------------

LINE_M = inc(3, {-3: [], -2: [[1, 0, 0]], -1: [[1, 0, 0]], 0: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, Fraction(1, 3)])
def test_rmf_line_example(n):
    res = relative_monodromy(FilteredNilp(ex.frame_elliptic_ext().W, ex.N_line(n)))
    assert res.verdict == "Exists" and res.filtration == LINE_M


def test_rmf_zero_operator_gives_w():
    W = coordinate_filtration(3, [-1, 0, 2])
    assert relative_monodromy(FilteredNilp(W, Matrix.zeros(3, 3))).filtration == W


def test_rmf_nonexistence_witness():
    W = coordinate_filtration(2, [0, 1])
    res = relative_monodromy(FilteredNilp(W, ex.unit(2, 0, 1)))
    assert res.verdict == "NotExists"
    assert res.witness["constraint"] == "N M_{1} ⊆ M_{-1}"
    with pytest.raises(RMFNotExists):
        res.require()


@pytest.mark.parametrize("n", [-1, 0, 3])
def test_rmf_twisted_example(n):
    W = ex.frame_elliptic_ext(2).W
    res = relative_monodromy(FilteredNilp(W, ex.N_line(n)))
    assert res.filtration == inc(3, {-5: [], -4: [[1, 0, 0]], -3: [[1, 0, 0]], -2: [[1, 0, 0], [0, 1, 0]],
                                     0: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})


@given(seeds)
def test_rmf_matches_block_oracle(seed):
    inst = random_block_instance(random.Random(seed), 6)
    res = relative_monodromy(inst.x)
    assert res.verdict == "Exists"
    assert res.filtration == inst.M


# verifier --------------------------------------------------------------------------

def test_verifier_examples():
    x = FilteredNilp(ex.frame_elliptic_ext().W, ex.N_line(0))
    assert verify_rmf(x, LINE_M).ok
    bad = verify_rmf(x, LINE_M.shift_weights(1))
    assert not bad.ok
    assert not verify_rmf(x, x.W).ok


def perturbations(M: IncFiltration):
    """Filtrations differing from M in exactly one step."""
    n = M.ambient_dim
    for k in range(M.lo - 1, M.hi + 1):
        lower, upper = M[k - 1], M[k + 1]
        cur = M[k]
        for cand in (lower, upper):
            if cand != cur:
                yield _replace(M, k, cand)
        # same dimension, different subspace between the neighbours
        if lower.dim < cur.dim < upper.dim:
            extra = [v for v in upper.basis.to_lists() if not cur.contains(Subspace.span([v], n))]
            keep = [v for v in cur.basis.to_lists() if not lower.contains(Subspace.span([v], n))]
            if extra and keep:
                rows = lower.basis.to_lists() + [v for v in cur.basis.to_lists() if v != keep[0]] + [extra[0]]
                cand = Subspace.span(rows, n)
                if cand.dim == cur.dim and cand != cur:
                    yield _replace(M, k, cand)


def _replace(M, k, space):
    steps = {w: M[w] for w in range(M.lo - 1, M.hi + 2)}
    steps[k] = space
    return IncFiltration(M.ambient_dim, steps)


@given(seeds)
def test_verifier_soundness_and_uniqueness(seed):
    inst = random_block_instance(random.Random(seed), 5)
    M = relative_monodromy(inst.x).filtration
    assert verify_rmf(inst.x, M).ok
    for other in perturbations(M):
        assert not verify_rmf(inst.x, other).ok


# functoriality and inclusion ----------------------------------------------------------

@given(seeds)
def test_functoriality(seed):
    rng = random.Random(seed)
    a, b = random_block_instance(rng, 3), random_block_instance(rng, 3)
    Ma, Mb = relative_monodromy(a.x).filtration, relative_monodromy(b.x).filtration
    for op, ref in (("direct_sum", inc_direct_sum), ("tensor", inc_tensor), ("hom", inc_hom)):
        res = relative_monodromy(combine(a.x, b.x, op))
        assert res.verdict == "Exists"
        assert res.filtration == ref(Ma, Mb), op


@given(seeds)
def test_restriction_to_summands(seed):
    rng = random.Random(seed)
    a, b = random_block_instance(rng, 4), random_block_instance(rng, 4)
    M = relative_monodromy(combine(a.x, b.x, "direct_sum")).filtration
    n1, n = a.x.dim, a.x.dim + b.x.dim
    first = inc_restrict(M, Subspace.coordinate(n, range(n1)))
    second = inc_restrict(M, Subspace.coordinate(n, range(n1, n)))
    assert first == relative_monodromy(a.x).filtration
    assert second == relative_monodromy(b.x).filtration


@given(seeds)
def test_kernel_inclusion(seed):
    inst = random_block_instance(random.Random(seed), 6)
    M = relative_monodromy(inst.x).filtration
    ker = Subspace.zero(inst.x.dim).preimage(inst.x.N)
    for w in range(inst.x.W.lo, inst.x.W.hi + 1):
        assert M[w].contains(ker & inst.x.W[w])


@given(seeds)
def test_lowering_commutant_acts_trivially_on_gr_m(seed):
    rng = random.Random(seed)
    inst = random_block_instance(rng, 6)
    h = lowering_commutant(inst, rng)
    assert h.commutes_with(inst.x.N)
    assert inst.x.W.lowered_by(h, 1)
    M = relative_monodromy(inst.x).filtration
    assert M.lowered_by(h, 1)


# successive filtrations and admissibility --------------------------------------------

def test_successive_filtrations():
    W = ex.frame_elliptic_ext().W
    assert successive_filtrations([ex.N_line(0)], W) == [LINE_M]
    assert successive_filtrations([], W) == []
    fr = ex.frame_square()
    N1, N2 = ex.square_operators()
    out = successive_filtrations([N1, N2], fr.W)
    assert len(out) == 2
    assert out[1] == relative_monodromy(FilteredNilp(fr.W, N1 + N2)).filtration


def test_admissibility_examples():
    W = ex.frame_elliptic_ext().W
    res = check_admissible(ex.sigma_n(0), W)
    assert res.admissible and res.filtration_of([0]) == LINE_M
    zero = check_admissible(Cone.zero(3), W)
    assert zero.admissible and zero.certificate == [((), W)]
    assert check_admissible(ex.square_cone(), ex.frame_square().W).admissible


def test_non_admissible_cone():
    W = coordinate_filtration(2, [0, 1])
    res = check_admissible(Cone(2, [ex.unit(2, 0, 1)]), W)
    assert res.verdict == "NotAdmissible" and res.failure["condition"] == "M(τ) exists"


def test_admissibility_rejects_noncommuting_images():
    W = IncFiltration.trivial(2)
    cone = PolyCone(2, [[1, 0], [0, 1]])
    with pytest.raises(NonCommuting):
        check_admissible(cone, W, [ex.unit(2, 0, 1), ex.unit(2, 1, 0)])


@pytest.mark.parametrize("name,cone,W", CORPUS_CONES, ids=[c[0] for c in CORPUS_CONES])
def test_interior_points_give_the_face_filtration(name, cone, W):
    res = check_admissible(cone, W)
    assert res.admissible
    rng = random.Random(1)
    for support, M in res.certificate:
        N = Matrix.zeros(W.ambient_dim, W.ambient_dim)
        for i in support:
            N = N + cone.matrices[i].scale(Fraction(rng.randint(1, 9), rng.randint(1, 4)))
        assert relative_monodromy(FilteredNilp(W, N)).filtration == M


@pytest.mark.parametrize("name,cone,W", CORPUS_CONES, ids=[c[0] for c in CORPUS_CONES])
def test_pullback_along_cone_surjection(name, cone, W):
    base = check_admissible(cone, W)
    k = len(cone.matrices)
    # a simplicial cone on k + 1 generators, the last one mapping to the sum of all
    vecs = [[int(i == j) for j in range(k + 1)] for i in range(k + 1)]
    images = list(cone.matrices) + [sum(cone.matrices[1:], cone.matrices[0])]
    pulled = check_admissible(PolyCone(k + 1, vecs), W, images)
    assert pulled.verdict == base.verdict
    assert {M for _, M in pulled.certificate} == {M for _, M in base.certificate}


@pytest.mark.parametrize("name,cone,W", CORPUS_CONES, ids=[c[0] for c in CORPUS_CONES])
def test_adjoint_action_is_admissible(name, cone, W):
    assert check_admissible(cone, W).admissible
    Wg = inc_hom(W, W)
    res = check_admissible(cone, Wg, adjoint_action(cone.matrices))
    assert res.admissible
    for N in cone.matrices:
        x = FilteredNilp(W, N)
        assert combine(x, x, "hom").N == adjoint_action([N])[0]
