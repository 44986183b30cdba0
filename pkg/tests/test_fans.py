from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lmhodge import examples as ex
from lmhodge.cones import Cone, PolyCone
from lmhodge.errors import NotIntegralizable
from lmhodge.exactlin import GaussRational, I, Matrix
from lmhodge.fans import (
    FanSet,
    check_face_closure,
    check_fan,
    check_strong_compat,
    gamma_sigma,
    minimal_exponent,
    weakfan_falsify,
)


def sector_fan(slopes):
    """Rays (s, 1) in the upper half plane and the sectors between neighbouring rays."""
    slopes = sorted(set(slopes))
    rays = [[Fraction(s), Fraction(1)] for s in slopes]
    cones = [PolyCone(2, [r]) for r in rays] + [PolyCone(2, [a, b]) for a, b in zip(rays, rays[1:])]
    return FanSet.from_faces(cones)


@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=1, max_size=5))
def test_sector_fans_are_fans(slopes):
    fan = sector_fan(slopes)
    assert check_face_closure(fan).ok
    assert check_fan(fan).ok


def test_overlapping_cones_break_the_fan_axiom():
    a = PolyCone(2, [[1, 0], [0, 1]])
    b = PolyCone(2, [[1, 1], [-1, 1]])
    res = check_fan(FanSet.from_faces([a, b]))
    assert not res.ok and res.witnesses


def test_non_sharp_cone_rejected():
    with pytest.raises(ValueError):
        FanSet([PolyCone(1, [[1], [-1]])])


@pytest.mark.parametrize("with_pairs", [True, False])
def test_fans_have_no_weak_fan_violation(with_pairs):
    fr = ex.frame_elliptic_ext()
    win = ex.line_fan_window(-2, 2, with_pairs)
    assert check_fan(win).ok
    cands = [ex.flag_elliptic_ext(I, z) for z in (0, GaussRational(1, 1), GaussRational(-2, 3))]
    assert weakfan_falsify(win, cands, fr) is None


def test_weak_fan_violation_found_when_cones_overlap():
    fr = ex.frame_elliptic_ext()
    big = Cone(3, [ex.N_line(0), ex.N_line(2)])
    fan = FanSet.from_faces([big, ex.sigma_nn1(0)])
    rep = weakfan_falsify(fan, [ex.flag_elliptic_ext(I, 0)], fr)
    assert rep is not None and rep.sigma.relative_interiors_meet(rep.sigma_prime)


@pytest.mark.parametrize("cone", [ex.sigma_n(0), ex.sigma_nn1(-1), ex.sigma_nn1(2)])
def test_gamma_sigma_generators(cone):
    gd = ex.group_elliptic_ext()
    gs = gamma_sigma(cone, gd)
    assert gs.complete is True
    for g in gs.generators:
        assert gd.member(g)
        for h in gs.generators:
            assert g @ h == h @ g
    # no smaller positive multiple lands in Γ
    for N, c in zip(cone.matrices, gs.coefficients):
        assert not gd.member(N.exp_nilpotent(c / 2))


@given(st.integers(1, 6), st.integers(1, 6))
def test_minimal_exponent_of_scaled_ray(p, q):
    gd = ex.group_elliptic_ext()
    N = ex.N_line(0).scale(Fraction(p, q))
    c = minimal_exponent(N, gd)
    # exp(cN) ∈ Γ exactly when c·p/q is an integer
    assert c * Fraction(p, q) == 1


def test_minimal_exponent_on_zero_ray():
    with pytest.raises(NotIntegralizable):
        minimal_exponent(Matrix.zeros(3, 3), ex.group_elliptic_ext())


def test_strong_compatibility_uses_schema_outside_window():
    rep = check_strong_compat(ex.line_fan_window(-1, 1), ex.group_elliptic_ext())
    assert rep.ok
    assert any(status == "in schema" for _, _, status in rep.pairs)
    bare = FanSet(ex.line_fan_window(-1, 1))
    assert not check_strong_compat(bare, ex.group_elliptic_ext()).compatible
