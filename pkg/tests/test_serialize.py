import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lmhodge import examples as ex
from lmhodge.errors import FormatError
from lmhodge.exactlin import GaussRational, I, Matrix
from lmhodge.serialize import (
    canonical_json,
    digest,
    dump_cone,
    dump_dec,
    dump_frame,
    dump_inc,
    dump_matrix,
    dump_scalar,
    load_cone,
    load_dec,
    load_frame,
    load_inc,
    load_matrix,
    load_scalar,
    parse_document,
)

rationals = st.fractions(max_denominator=50).map(Fraction)


@given(rationals, rationals)
def test_scalar_round_trip(re, im):
    x = GaussRational(re, im) if im else re
    back = load_scalar(json.loads(json.dumps(dump_scalar(x))))
    assert back == x


def test_real_gaussian_must_be_written_as_rational():
    assert dump_scalar(GaussRational(3, 0)) == "3/1"
    with pytest.raises(FormatError):
        load_scalar({"re": "1/1", "im": "0/1"})


@pytest.mark.parametrize("bad", ["2/4", "1/-2", "1", "x", 1, None, {"re": "1/1"}])
def test_malformed_scalars_rejected(bad):
    with pytest.raises(FormatError):
        load_scalar(bad)


def test_floats_rejected_at_parse_time():
    with pytest.raises(FormatError):
        parse_document('{"rank": 1.5}')
    with pytest.raises(FormatError):
        parse_document("{not json")


@given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=1, max_size=4))
def test_matrix_round_trip(rows):
    m = Matrix.from_rows(rows, 3)
    assert load_matrix(dump_matrix(m)) == m


def test_ragged_matrix_rejected():
    with pytest.raises(FormatError):
        load_matrix([["1/1"], ["1/1", "0/1"]])


def test_filtrations_frames_and_cones_round_trip():
    fr = ex.frame_elliptic_ext()
    assert load_inc(dump_inc(fr.W), 3) == fr.W
    F = ex.flag_elliptic_ext(I, GaussRational(1, 2))
    assert load_dec(dump_dec(F), 3) == F
    back = load_frame(dump_frame(fr))
    assert back.W == fr.W and back.pairings == fr.pairings and back.hodge_numbers == fr.hodge_numbers
    c = ex.sigma_nn1(0)
    assert load_cone(dump_cone(c)).canonical() == c.canonical()
    mk = ex.marked_line(2)
    assert load_cone(dump_cone(mk), mk.W).canonical() == mk.canonical()


def test_declared_window_must_match():
    doc = dump_inc(ex.frame_elliptic_ext().W)
    doc["lo"] -= 1
    with pytest.raises(FormatError):
        load_inc(doc, 3)


def test_canonical_json_is_key_order_independent():
    a = {"b": 1, "a": [1, {"y": "1/2", "x": "0/1"}]}
    b = {"a": [1, {"x": "0/1", "y": "1/2"}], "b": 1}
    assert canonical_json(a) == canonical_json(b)
    assert digest(a) == digest(b)
