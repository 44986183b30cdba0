from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lmhodge import examples as ex
from lmhodge.cones import Cone
from lmhodge.errors import NotInLieAlgebra
from lmhodge.exactlin import GaussRational, I, Matrix
from lmhodge.orbits import (
    griffiths_transversal,
    mixed_orbit_test,
    orbit_point,
    pure_orbit_test,
    sample_schedule,
)

gauss = st.builds(lambda a, b, c, d: GaussRational(Fraction(a, b), Fraction(c, d)),
                  st.integers(-4, 4), st.integers(1, 3), st.integers(-4, 4), st.integers(1, 3))
positive = st.builds(Fraction, st.integers(1, 9), st.integers(1, 4))


def test_sample_schedule_is_strictly_nested():
    for y in sample_schedule(3):
        assert y[0] > y[1] > y[2] >= 1


@given(st.lists(positive, min_size=2, max_size=2), gauss)
def test_verdict_ignores_generator_scaling(scales, z):
    fr = ex.frame_elliptic_ext()
    F = ex.flag_elliptic_ext(I, z)
    base = mixed_orbit_test(fr, ex.sigma_nn1(0), F).verdict
    scaled = Cone(3, [N.scale(s) for N, s in zip(ex.sigma_nn1(0).matrices, scales)])
    assert mixed_orbit_test(fr, scaled, F).verdict == base == "Generates"


@given(gauss, st.sampled_from([1, -1, 2]))
def test_pure_certified_and_sampled_agree(tau, sign):
    gf = ex.frame_elliptic_ext().graded_frame(-1)
    # mode "both" raises OracleDisagreement on a mismatch
    rep = pure_orbit_test(gf, [ex.NPRIME.scale(sign)], ex.elliptic_flag(tau), "both")
    assert rep.verdict in ("Generates", "Fails")


@pytest.mark.parametrize("frame,cone,flag", [
    (ex.frame_elliptic_ext, lambda: ex.sigma_nn1(0), lambda: ex.flag_elliptic_ext(I, 0)),
    (ex.frame_square, ex.square_cone, lambda: ex.flag_square(I)),
    (ex.frame_sym, ex.sym_cone, ex.flag_sym),
])
def test_faces_of_generating_cones_generate(frame, cone, flag):
    fr, sigma, F = frame(), cone(), flag()
    assert mixed_orbit_test(fr, sigma, F).generates
    for tau in sigma.faces():
        assert mixed_orbit_test(fr, tau, F).generates


@given(st.lists(gauss, min_size=2, max_size=2), gauss)
def test_translating_along_the_cone_preserves_generation(a, z):
    fr = ex.frame_elliptic_ext()
    sigma = ex.sigma_nn1(0)
    F = ex.flag_elliptic_ext(I, z)
    moved = orbit_point(sigma.matrices, a, F)
    assert mixed_orbit_test(fr, sigma, moved).generates


def test_transversality_failure_is_reported():
    rep = mixed_orbit_test(ex.frame_elliptic_ext(2), ex.sigma_n(0), ex.flag_elliptic_twist(I, 5, 1))
    assert (rep.verdict, rep.reason) == ("Fails", "Griffiths transversality")
    assert not griffiths_transversal(ex.N_line(0), ex.flag_elliptic_twist(I, 5, 1))


def test_operator_outside_lie_algebra_is_rejected():
    gf = ex.frame_elliptic_ext().graded_frame(-1)
    with pytest.raises(NotInLieAlgebra):
        pure_orbit_test(gf, [Matrix.from_rows([[1, 0], [0, 0]])], ex.elliptic_flag(I))


def test_cross_check_agrees_on_corpus():
    rep = mixed_orbit_test(ex.frame_square(), ex.square_cone(), ex.flag_square(I), cross_check=True)
    assert rep.generates and rep.samples
