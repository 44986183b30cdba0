import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import coordinate_filtration, random_block_instance
from lmhodge.exactlin import Matrix, Subspace
from lmhodge.filtration import (
    DecFiltration,
    FilteredNilp,
    IncFiltration,
    combine,
    graded_piece,
    inc_direct_sum,
    inc_hom,
    inc_tensor,
    induced_on_sub_quot,
)
from lmhodge.errors import NotNilpotent

seeds = st.integers(0, 10_000)


def pair(seed):
    rng = random.Random(seed)
    return random_block_instance(rng, 3), random_block_instance(rng, 3)


@given(seeds, st.sampled_from(["direct_sum", "tensor", "hom"]))
def test_combine_outputs_are_valid(seed, op):
    a, b = pair(seed)
    c = combine(a.x, b.x, op)  # FilteredNilp re-validates on construction
    assert c.N.is_nilpotent()
    assert c.W.is_preserved_by(c.N)


def dims(W: IncFiltration, lo=-8, hi=8):
    return [W[w].dim for w in range(lo, hi)]


@given(seeds)
def test_tensor_and_hom_distribute_over_sums_dimensionwise(seed):
    rng = random.Random(seed)
    a, b, c = (random_block_instance(rng, 2) for _ in range(3))
    lhs = inc_tensor(a.x.W, inc_direct_sum(b.x.W, c.x.W))
    rhs = inc_direct_sum(inc_tensor(a.x.W, b.x.W), inc_tensor(a.x.W, c.x.W))
    assert dims(lhs) == dims(rhs)
    lhs = inc_hom(a.x.W, inc_direct_sum(b.x.W, c.x.W))
    rhs = inc_direct_sum(inc_hom(a.x.W, b.x.W), inc_hom(a.x.W, c.x.W))
    assert dims(lhs) == dims(rhs)


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3), st.integers(1, 3))
def test_tensor_of_pure_is_pure(w1, w2, n1, n2):
    t = inc_tensor(IncFiltration.trivial(n1, w1), IncFiltration.trivial(n2, w2))
    assert t.jumps() == [w1 + w2]
    h = inc_hom(IncFiltration.trivial(n1, w1), IncFiltration.trivial(n2, w2))
    assert h.jumps() == [w2 - w1]


def test_increasing_filtration_window():
    W = coordinate_filtration(3, [-1, -1, 0])
    assert (W.lo, W.hi) == (-1, 0)
    assert W[-5].is_zero() and W[7].is_full()
    assert W.graded_dims() == {-1: 2, 0: 1}
    assert graded_piece(W, -1).dim == 2


def test_decreasing_filtration_window_and_validation():
    F = DecFiltration(2, {-1: Subspace.full(2), 0: Subspace.coordinate(2, [0]), 1: Subspace.zero(2)})
    assert (F.lo, F.hi) == (-1, 0)
    assert F[-9].is_full() and F[3].is_zero()
    with pytest.raises(ValueError):
        DecFiltration(2, {0: Subspace.coordinate(2, [0])})
    with pytest.raises(ValueError):
        IncFiltration(2, {0: Subspace.coordinate(2, [0]), 1: Subspace.coordinate(2, [1]), 2: Subspace.full(2)})


def test_filtered_nilp_validation():
    W = coordinate_filtration(2, [0, 1])
    with pytest.raises(NotNilpotent):
        FilteredNilp(W, Matrix.identity(2))
    with pytest.raises(ValueError):
        FilteredNilp(W, Matrix.from_rows([[0, 0], [1, 0]]))


def test_induced_filtrations_on_sub_quotients():
    W = coordinate_filtration(3, [-1, -1, 0])
    M = coordinate_filtration(3, [-2, 0, 0])
    assert induced_on_sub_quot(W, M, "restrict", -1).graded_dims() == {-2: 1, 0: 1}
    assert induced_on_sub_quot(W, M, "quotient", -1).graded_dims() == {0: 1}
    assert induced_on_sub_quot(W, M, "graded", -1).graded_dims() == {-2: 1, 0: 1}
