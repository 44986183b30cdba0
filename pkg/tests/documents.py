"""CLI problem documents built from the example constructors, one per document kind."""

from __future__ import annotations

from fractions import Fraction

from lmhodge import examples as ex
from lmhodge.cones import MarkedCone
from lmhodge.exactlin import GaussRational, I, Matrix
from lmhodge.filtration import IncFiltration
from lmhodge.serialize import dump_cone, dump_dec, dump_frame, dump_inc, dump_matrix


def _doc(kind: str, payload: dict, **options) -> dict:
    return {"kind": kind, "payload": payload, "options": options}


def _context() -> dict:
    ctx = ex.neron_elliptic_ext()
    return {"frame": dump_frame(ctx.frame), "proj": [dump_matrix(p) for p in ctx.proj]}


def _two_weight() -> dict:
    d = ex.two_weight_elliptic_ext()
    return {"a": d.a, "b": d.b, "Na": dump_matrix(d.Na), "Nb": dump_matrix(d.Nb)}


def sample_documents() -> dict[str, tuple[list[str], dict]]:
    """name → (argv prefix, document)."""
    fr = ex.frame_elliptic_ext()
    W = fr.W
    win = ex.line_fan_window(-1, 1)
    rank2 = dump_inc(IncFiltration.from_dims_of_coordinates(2, [0, 1]))
    fan = ex.fan_z1()
    probe = MarkedCone(1, [ex.unit(3, 0, 1)],
                       [((1,), ex.N_line(0)), ((Fraction(1, 2),), ex.N_line(3).scale(Fraction(1, 2)))], W)
    return {
        "rmf": (["rmf"], _doc("rmf", {"rank": 3, "W": dump_inc(W), "N": dump_matrix(ex.N_line(1))})),
        "rmf-none": (["rmf"], _doc("rmf", {"rank": 2, "W": rank2, "N": dump_matrix(ex.unit(2, 0, 1))})),
        "admissible": (["admissible"], _doc("admissible", {"rank": 3, "W": dump_inc(W),
                                                           "cone": dump_cone(ex.sigma_nn1(0))})),
        "orbit": (["orbit-check"], _doc("orbit", {"frame": dump_frame(fr), "cone": dump_cone(ex.sigma_nn1(0)),
                                                  "F": dump_dec(ex.flag_elliptic_ext(I, GaussRational(1, 2)))},
                                        mode="both")),
        "fan": (["fan-check"], _doc("fan", {"cones": [dump_cone(c) for c in win], "rank": 3, "W": dump_inc(W),
                                            "group": {"generators": [dump_matrix(g) for g in
                                                                     ex.group_elliptic_ext().generators]}})),
        "fan-z1": (["fan-check"], _doc("fan", {"cones": [dump_cone(c) for c in fan]})),
        "fan-square": (["fan-check"], _doc("fan", {"cones": [dump_cone(c) for c in ex.square_window()]})),
        "weakfan": (["weakfan-falsify"], _doc("weakfan", {"frame": dump_frame(fr),
                                                          "cones": [dump_cone(c) for c in win],
                                                          "candidates": [dump_dec(ex.flag_elliptic_ext(I, 0))]})),
        "sigma-upsilon": (["neron", "sigma-upsilon"],
                          _doc("neron-sigma-upsilon", {"context": _context(), "face": [0],
                                                       "upsilon": dump_matrix(ex.upsilon_translation(1, -2))})),
        "kummer": (["neron", "kummer"],
                   _doc("neron-kummer", {"context": _context(), "face": [0],
                                         "upsilon": dump_matrix(ex.upsilon_translation(0, Fraction(1, 2)))})),
        "b1": (["neron", "b1"], _doc("neron-b1", {"gamma": dump_matrix(Matrix.from_rows([[1, 2], [0, 1]]))})),
        "build-fan": (["neron", "build-fan"], _doc("neron-build-fan", {"two_weight": _two_weight()}, window="-2:2")),
        "probe": (["neron", "probe"], _doc("neron-probe", {"two_weight": _two_weight(),
                                                           "probes": [dump_cone(probe)]})),
    }
