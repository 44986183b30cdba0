"""The worked-example corpus: each item rebuilds its data and checks the expected values.

Items are keyed by opaque identifiers ("7.1.1", …). A run returns a bundle of
named checks; the bundle passes when every check does.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable

from . import examples as ex
from .cones import Cone, MarkedCone
from .errors import OracleDisagreement
from .exactlin import GaussRational, I, Matrix, Subspace, invariants_rank
from .fans import FanSet, check_face_closure, check_fan, check_strong_compat, gamma_sigma, weakfan_falsify
from .filtration import FilteredNilp, IncFiltration, graded_piece
from .hodge import delta_splitting, deligne_bigrading, in_check_D, in_D
from .monodromy import (
    check_admissible,
    relative_monodromy,
    successive_filtrations,
    verify_rmf,
)
from .neron import (
    build_relcomplete_fan,
    compute_B1,
    in_sigma1,
    kummer_type,
    relative_completeness_probe,
    sigma_tau_upsilon,
)
from .orbits import (
    classify_boundary,
    griffiths_transversal,
    mixed_orbit_test,
    pure_orbit_test,
    relative_orbit_test,
    smallest_generating_cone,
)
from .serialize import dump_cone, dump_inc, dump_matrix, dump_scalar

NAMES = ("7.1.1", "7.1.2", "7.1.3", "7.1.5", "7.2.1", "7.2.2", "7.3.3", "7.3.4", "7.3.6")

Z_SAMPLES = (GaussRational(0), GaussRational(1), GaussRational(Fraction(3, 2), Fraction(-5, 7)), I,
             GaussRational(-2, 3))
GRID = ((1, 2, 2, 1, 1, 1), (1, 1, 2, 3, 2, -2), (3, 1, 1, 2, 5, 3))


@dataclass
class Check:
    id: str
    ok: bool
    observed: Any = None
    expected: Any = None

    def to_doc(self) -> dict:
        return {"id": self.id, "ok": self.ok, "observed": encode(self.observed), "expected": encode(self.expected)}


@dataclass
class CorpusReport:
    name: str
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_doc(self) -> dict:
        return {"name": self.name, "verdict": "PASS" if self.ok else "FAIL",
                "checks": [c.to_doc() for c in self.checks]}


def encode(x) -> Any:
    """JSON form of observed values."""
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if isinstance(x, (Fraction, GaussRational)):
        return dump_scalar(x)
    if isinstance(x, Matrix):
        return dump_matrix(x)
    if isinstance(x, IncFiltration):
        return dump_inc(x)
    if isinstance(x, Subspace):
        return dump_matrix(x.basis)
    if isinstance(x, (Cone, MarkedCone)):
        return dump_cone(x)
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    return str(x)


def expect(cid: str, observed, expected) -> Check:
    return Check(cid, observed == expected, observed, expected)


def ad(g: Matrix, X: Matrix, k: int = 1) -> Matrix:
    """Ad(g)^k X."""
    gi = g.inverse()
    for _ in range(abs(k)):
        X = g @ X @ gi if k > 0 else gi @ X @ g
    return X


def _span(rows, n) -> Subspace:
    return Subspace.span(Matrix.from_rows(rows, n)) if rows else Subspace.zero(n)


def inc(n: int, steps: dict[int, list]) -> IncFiltration:
    return IncFiltration(n, {w: _span(rows, n) for w, rows in steps.items()})


# 7.1.1 ------------------------------------------------------------------------

def _z1_membership() -> list[Check]:
    fr = ex.frame_z1()
    out = [expect(f"check_D.z={dump_scalar(z)}", in_check_D(fr, ex.flag_z1(z)), True) for z in Z_SAMPLES]
    out += [expect(f"D.z={dump_scalar(z)}", in_D(fr, ex.flag_z1(z)), True) for z in Z_SAMPLES]
    bad = ex.flag(2, {-1: [[1, 0], [0, 1]], 0: [[1, 0]]})
    out.append(expect("check_D.F0=span(e1)", in_check_D(fr, bad), False))
    return out


def _z1_orbits() -> list[Check]:
    fr = ex.frame_z1()
    out = []
    for sign in (1, -1):
        for z in Z_SAMPLES:
            rep = mixed_orbit_test(fr, ex.cone_z1(sign), ex.flag_z1(z))
            out.append(expect(f"orbit.sign={sign}.z={dump_scalar(z)}", rep.verdict, "Generates"))
    return out


def _z1_fan() -> list[Check]:
    fan = ex.fan_z1()
    out = [expect("fan.face_closure", check_face_closure(fan).ok, True),
           expect("fan.fan_axiom", check_fan(fan).ok, True),
           expect("fan.strongly_compatible", check_strong_compat(fan, ex.group_z1()).ok, True)]
    dropped = FanSet([ex.cone_z1(1), ex.cone_z1(-1)])
    res = check_face_closure(dropped)
    out.append(Check("fan.without_zero_cone", not res.ok and res.witnesses[0].dim == 0,
                     [w.dim for w in res.witnesses], [0]))
    gs = gamma_sigma(ex.cone_z1(), ex.group_z1())
    out.append(expect("gamma_sigma.coefficients", gs.coefficients, [Fraction(1)]))
    return out


def _z1_splittings() -> list[Check]:
    fr = ex.frame_z1()
    N = ex.unit(2, 0, 1)
    out = []
    for z in Z_SAMPLES:
        F = ex.flag_z1(z)
        z = GaussRational.coerce(z)
        bigr = deligne_bigrading(fr.W, F)
        out.append(expect(f"bigrading.z={dump_scalar(z)}",
                          {k: v for k, v in sorted(bigr.items())},
                          {(-1, -1): _span([[1, 0]], 2), (0, 0): _span([[z, 1]], 2)}))
        d = delta_splitting(fr.W, F)
        out.append(expect(f"delta.z={dump_scalar(z)}", d.delta, N.scale(z.im)))
        out.append(expect(f"reconstruct.z={dump_scalar(z)}", d.reconstruct() == F, True))
        a = GaussRational(Fraction(1, 3), 2)
        moved = delta_splitting(fr.W, F.apply(N.exp_nilpotent(a)))
        out.append(expect(f"shift_law.z={dump_scalar(z)}", moved.delta, d.delta + N.scale(a.im)))
    return out


# 7.1.2 ------------------------------------------------------------------------

def _line_rmf_expected() -> IncFiltration:
    return inc(3, {-3: [], -2: [[1, 0, 0]], -1: [[1, 0, 0]], 0: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})


def _ell_rmf() -> list[Check]:
    fr = ex.frame_elliptic_ext()
    W = fr.W
    M = _line_rmf_expected()
    out = [expect("graded_dims", (graded_piece(W, -1).dim, graded_piece(W, 0).dim), (2, 1))]
    for n in range(-2, 3):
        res = relative_monodromy(FilteredNilp(W, ex.N_line(n)))
        out.append(expect(f"rmf.N{n}", (res.verdict, res.filtration), ("Exists", M)))
    x = FilteredNilp(W, ex.N_line(0))
    out.append(expect("verify.M", verify_rmf(x, M).ok, True))
    out.append(expect("verify.shifted", verify_rmf(x, M.shift_weights(1)).ok, False))
    out.append(expect("successive", successive_filtrations([ex.N_line(0)], W), [M]))
    for name, c in (("sigma0", ex.sigma_n(0)), ("sigma01", ex.sigma_nn1(0))):
        out.append(expect(f"admissible.{name}", check_admissible(c, W).verdict, "Admissible"))
    return out


def _ell_membership() -> list[Check]:
    fr = ex.frame_elliptic_ext()
    out = [expect("D.F(i,0)", in_D(fr, ex.flag_elliptic_ext(I, 0)), True),
           expect("D.F(-i,0)", in_D(fr, ex.flag_elliptic_ext(-I, 0)), False)]
    for z in Z_SAMPLES:
        F = ex.flag_elliptic_ext(I, z)
        out.append(expect(f"D.F(i,{dump_scalar(z)})", in_D(fr, F), True))
        d = delta_splitting(fr.W, F)
        hom = all(d.delta[i, j] == 0 for i in range(3) for j in range(3) if not (i < 2 and j == 2))
        out.append(Check(f"delta.F(i,{dump_scalar(z)})", hom and d.reconstruct() == F, d.delta,
                         "supported on Hom(gr_0, gr_-1), reconstructs F"))
    return out


def _ell_orbits() -> list[Check]:
    fr = ex.frame_elliptic_ext()
    out = []
    for z in Z_SAMPLES:
        F = ex.flag_elliptic_ext(I, z)
        out.append(expect(f"orbit.sigma0.z={dump_scalar(z)}", mixed_orbit_test(fr, ex.sigma_n(0), F).verdict,
                          "Generates"))
        out.append(expect(f"boundary.sigma0.z={dump_scalar(z)}",
                          classify_boundary(ex.sigma_n(0), ex.sigma_n(0), [0], F, fr).verdict, "Generates"))
        out.append(expect(f"relative.sigma0.z={dump_scalar(z)}",
                          relative_orbit_test(ex.marked_line(0), F, fr).verdict, "Generates"))
    for tau in (I, -I, GaussRational(0), GaussRational(1, 2)):
        F = ex.flag_elliptic_ext(tau, GaussRational(2, -1))
        out.append(expect(f"orbit.sigma01.tau={dump_scalar(tau)}",
                          mixed_orbit_test(fr, ex.sigma_nn1(0), F).verdict, "Generates"))
        out.append(expect(f"transversal.tau={dump_scalar(tau)}",
                          all(griffiths_transversal(ex.N_line(n), F) for n in range(-3, 4)), True))
    gf = fr.graded_frame(-1)
    Fg = ex.elliptic_flag(I)
    for label, N, want in (("N'", ex.NPRIME, "Generates"), ("-N'", -ex.NPRIME, "Fails")):
        try:
            verdict = pure_orbit_test(gf, [N], Fg, "both").verdict
        except OracleDisagreement as exc:
            verdict = f"OracleDisagreement: {exc}"
        out.append(expect(f"pure.gr-1.{label}", verdict, want))
    return out


def _ell_fans() -> list[Check]:
    fr = ex.frame_elliptic_ext()
    gd = ex.group_elliptic_ext()
    out = []
    for label, pairs in (("Sigma", True), ("Sigma0", False)):
        win = ex.line_fan_window(with_pairs=pairs)
        out.append(expect(f"{label}.face_closure", check_face_closure(win).ok, True))
        out.append(expect(f"{label}.fan_axiom", check_fan(win).ok, True))
        out.append(expect(f"{label}.strongly_compatible", check_strong_compat(win, gd).ok, True))
    win = ex.line_fan_window()
    F = ex.flag_elliptic_ext(I, 0)
    out.append(expect("gamma_sigma.sigma0", gamma_sigma(ex.sigma_n(0), gd).generators,
                      [ex.N_line(0).exp_nilpotent()]))
    half = Cone(3, [ex.N_line(0).scale(Fraction(1, 2))])
    out.append(expect("gamma_sigma.half_ray", gamma_sigma(half, gd).coefficients, [Fraction(2)]))
    out.append(expect("gamma_sigma.zero", gamma_sigma(Cone.zero(3), gd).generators, []))
    best = smallest_generating_cone(win, ex.sigma_n(0), F, fr)
    out.append(expect("smallest_cone.sigma0", best.canonical() if best else None, ex.sigma_n(0).canonical()))
    best = smallest_generating_cone(win, Cone.zero(3), F, fr)
    out.append(expect("smallest_cone.zero", best.dim if best else None, 0))
    cands = [F, ex.flag_elliptic_ext(I, GaussRational(1, 1))]
    out.append(expect("weakfan.window", weakfan_falsify(win, cands, fr), None))
    return out


def _ell_neron() -> list[Check]:
    ctx = ex.neron_elliptic_ext()
    out = [expect("sigma_upsilon.identity",
                  sigma_tau_upsilon(ctx, [0], Matrix.identity(3)).canonical(), ex.marked_line(0).canonical()),
           expect("sigma_upsilon.zero_face", sigma_tau_upsilon(ctx, [], Matrix.identity(3)).dim, 0)]
    for n in range(-2, 3):
        s = sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(0, -n))
        out.append(expect(f"sigma_upsilon.N{n}", s.canonical(), ex.marked_line(n).canonical()))
        out.append(expect(f"kummer.b=(0,{-n})", str(kummer_type(ctx, s)), "Iso"))
    half = sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(0, Fraction(1, 2)))
    out.append(expect("kummer.b=(0,1/2)", str(kummer_type(ctx, half)), "Kummer(2)"))
    out.append(expect("sigma1.b=(0,1/2)", in_sigma1(ctx, half), False))
    first = sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(Fraction(1, 2), 0))
    out.append(expect("sigma1.b=(1/2,0)", in_sigma1(ctx, first), True))
    integral = all(in_sigma1(ctx, sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(b1, b2)))
                   for b1 in range(-2, 3) for b2 in range(-2, 3))
    out.append(expect("sigma0_in_sigma1.window", integral, True))
    # every Iso cone over a rational υ is one of the σ_n
    same = True
    for b1, b2 in product([Fraction(k, 2) for k in range(-3, 4)], repeat=2):
        s = sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(b1, b2))
        if in_sigma1(ctx, s):
            same &= b2.denominator == 1 and s.canonical() == ex.marked_line(-b2).canonical()
    out.append(expect("sigma1_equals_sigma0.window", same, True))
    return out


# 7.1.3 ------------------------------------------------------------------------

def _twist_checks() -> list[Check]:
    out = []
    for b in (2, 3):
        fr = ex.frame_elliptic_ext(b)
        w = 1 - 2 * b
        M = inc(3, {w - 2: [], w - 1: [[1, 0, 0]], w: [[1, 0, 0]], w + 1: [[1, 0, 0], [0, 1, 0]],
                    0: [[1, 0, 0], [0, 1, 0], [0, 0, 1]]})
        for n in (-1, 0, 2):
            res = relative_monodromy(FilteredNilp(fr.W, ex.N_line(n)))
            out.append(expect(f"b={b}.rmf.N{n}", (res.verdict, res.filtration), ("Exists", M)))
        for tau, z, wv in ((I, 5, 0), (I, 5, 1), (GaussRational(1, 2), GaussRational(0, 1), GaussRational(3, 1))):
            out.append(expect(f"b={b}.check_D.{dump_scalar(tau)},{dump_scalar(z)},{dump_scalar(wv)}",
                              in_check_D(fr, ex.flag_elliptic_twist(tau, z, wv, b)), True))
    fr = ex.frame_elliptic_ext(2)
    out.append(expect("transversal.w=0", griffiths_transversal(ex.N_line(0), ex.flag_elliptic_twist(I, 5, 0)), True))
    out.append(expect("transversal.w=1", griffiths_transversal(ex.N_line(0), ex.flag_elliptic_twist(I, 5, 1)), False))
    for n in (-2, 1):
        out.append(expect(f"transversal.N{n}.w={-n}",
                          griffiths_transversal(ex.N_line(n), ex.flag_elliptic_twist(I, 5, -n)), True))
    good, bad = ex.flag_elliptic_twist(I, 5, 0), ex.flag_elliptic_twist(I, 5, 1)
    out.append(expect("orbit.w=0", mixed_orbit_test(fr, ex.sigma_n(0), good).verdict, "Generates"))
    rep = mixed_orbit_test(fr, ex.sigma_n(0), bad)
    out.append(expect("orbit.w=1", (rep.verdict, rep.reason), ("Fails", "Griffiths transversality")))
    out.append(expect("boundary.w=1", classify_boundary(ex.sigma_n(0), ex.sigma_n(0), [0], bad, fr).verdict, "Fails"))
    rep = relative_orbit_test(ex.marked_twist(0), ex.flag_elliptic_twist(I, 2, 1), fr)
    out.append(expect("relative.w=1", (rep.verdict, rep.reason), ("Fails", "Griffiths transversality")))
    gd = ex.group_elliptic_ext()
    out.append(expect("gamma_sigma.sigma0", gamma_sigma(ex.sigma_n(0), gd).generators, [ex.N_line(0).exp_nilpotent()]))
    out.append(expect("Sigma0.strongly_compatible",
                      check_strong_compat(ex.line_fan_window(with_pairs=False), gd).ok, True))
    return out


# 7.1.5 ------------------------------------------------------------------------

def _ranks() -> list[Check]:
    gs = ex.tensor_sum_monodromies()
    out = [expect("rank.none", invariants_rank([], 20), 20)]
    for k, want in ((1, 14), (2, 10), (3, 7)):
        out.append(expect(f"rank.first{k}", invariants_rank(gs[:k]), want))
    for j in range(3):
        out.append(expect(f"rank.only{j + 1}", invariants_rank([gs[j]]), 14))
    return out


# 7.2.1 / 7.2.2 ----------------------------------------------------------------

def _square_checks() -> list[Check]:
    fr = ex.frame_square()
    N1, N2 = ex.square_operators()
    tau = ex.square_cone()
    N0 = ex.square_N0()
    out = [expect("admissible.tau", check_admissible(tau, fr.W).verdict, "Admissible")]
    succ = successive_filtrations([N1, N2], fr.W)
    out.append(expect("successive.last", succ[-1], relative_monodromy(FilteredNilp(fr.W, N1 + N2)).filtration))
    for m, n in product((1, 2, 3), repeat=2):
        g = ex.square_gamma(m, n)
        moved = tau.ad(g)
        meet = tau.intersect(moved)
        out.append(expect(f"meet.{m},{n}", meet.canonical(), Cone(5, [N1.scale(m) + N2.scale(n)]).canonical()))
        out.append(expect(f"meet_is_face.{m},{n}", meet.is_face_of(tau), False))
        out.append(expect(f"interiors_meet.{m},{n}", tau.relative_interiors_meet(moved), True))
        out.append(expect(f"gamma_in_G.{m},{n}", fr.in_group(g, integral=True, unipotent=True), True))
    for m, n, mp, np_, _, k in GRID:
        g = ex.square_gamma(m, n)
        X = N1.scale(mp) + N2.scale(np_)
        out.append(expect(f"ad_fixed.{m},{n}", ad(g, N1.scale(m) + N2.scale(n)), N1.scale(m) + N2.scale(n)))
        out.append(expect(f"ad_orbit.{m},{n},{mp},{np_},{k}", ad(g, X, k), X + N0.scale(k * (mp * n - m * np_))))
    win = ex.square_window()
    res = check_fan(win)
    out.append(Check("fan_axiom.window", not res.ok, [encode(c) for c in res.witnesses[0]] if res.witnesses else None,
                     "violated"))
    F = ex.flag_square(I)
    out.append(expect("D.F", in_D(fr, F), True))
    out.append(expect("orbit.tau", mixed_orbit_test(fr, tau, F).verdict, "Generates"))
    cands = [F, ex.flag_square(I, (0, 1, -1, 0)), ex.flag_square(GaussRational(1, 1), (1, 0, 0, 2))]
    out.append(expect("weakfan.window", weakfan_falsify(win, cands, fr), None))
    out += _drift_certificate("drift", ex.square_gamma(1, 2), N1.scale(2) + N2)
    return out


def _cube_checks() -> list[Check]:
    Ns = ex.cube_operators()
    N0 = ex.cube_N0()
    out = []
    for m, n, mp, np_, ell, k in GRID:
        g = ex.cube_gamma(m, n)
        X = ex.combination(Ns, [mp, np_, ell])
        out.append(expect(f"ad_fixed.{m},{n},{ell}", ad(g, ex.combination(Ns, [m, n, ell])),
                          ex.combination(Ns, [m, n, ell])))
        out.append(expect(f"ad_orbit.{m},{n},{mp},{np_},{ell},{k}", ad(g, X, k),
                          X + N0.scale(k * (mp * n - m * np_))))
        fixes = (g - Matrix.identity(21)).submatrix(range(21), range(20)).is_zero()
        out.append(expect(f"gamma_fixes_lower_weight.{m},{n}", fixes and g.is_integral(), True))
    out += _drift_certificate("drift", ex.cube_gamma(1, 2), ex.combination(Ns, [2, 1, 1]))
    return out


def _drift_certificate(prefix: str, g: Matrix, X: Matrix) -> list[Check]:
    """Ad(γ)X = X + D with Ad(γ)D = D ≠ 0: the orbit X + kD lies in no sharp cone."""
    D = ad(g, X) - X
    out = [expect(f"{prefix}.nonzero", not D.is_zero(), True),
           expect(f"{prefix}.fixed", ad(g, D), D)]
    n = X.nrows
    for K in (1, 2, 3):
        window = Cone(n, [X + D.scale(k) for k in range(-K, K + 1)], check=False)
        out.append(expect(f"{prefix}.escapes.K={K}",
                          (window.contains_matrix(X + D.scale(K + 1)), window.contains_matrix(X - D.scale(K + 1))),
                          (False, False)))
    closure = Cone(n, [X, D, -D], check=False)
    out.append(expect(f"{prefix}.recession_not_sharp", closure.is_sharp(), False))
    return out


# 7.3.3 / 7.3.4 ------------------------------------------------------------------

def _sym_checks() -> list[Check]:
    fr = ex.frame_sym()
    Ns = ex.sym_operators()
    N0 = ex.sym_N0()
    F = ex.flag_sym()
    out = [expect("lie_algebra", all(fr.in_lie_algebra(N) for N in Ns), True),
           expect("D.F", in_D(fr, F), True),
           expect("orbit.tau", mixed_orbit_test(fr, ex.sym_cone(), F).verdict, "Generates"),
           expect("admissible.tau", check_admissible(ex.sym_cone(), fr.W).verdict, "Admissible")]
    for m, n, mp, np_, ell, k in GRID:
        g = ex.sym_gamma(m, n)
        out.append(expect(f"gamma_in_GZ.{m},{n}", fr.in_group(g, integral=True), True))
        out.append(expect(f"literal_gamma_in_G.{m},{n}", fr.in_group(ex.sym_gamma_as_printed(m, n)), False))
        fixed = ex.combination(Ns, [m, n, ell])
        out.append(expect(f"ad_fixed.{m},{n},{ell}", ad(g, fixed), fixed))
        X = ex.combination(Ns, [mp, np_, ell])
        out.append(expect(f"ad_orbit.{m},{n},{mp},{np_},{ell},{k}", ad(g, X, k),
                          X + N0.scale(k * (mp * n - m * np_))))
        out.append(expect(f"drift_fixed.{m},{n}", ad(g, N0), N0))
    out += _drift_certificate("drift", ex.sym_gamma(1, 2), ex.combination(Ns, [2, 1, 1]))
    return out


SUBCONES = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((2, 1, 1), (1, 2, 1), (1, 1, 2)),
    ((3, 1, 0), (1, 3, 1), (0, 1, 3)),
    ((1, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 1)),
    ((5, 1, 2), (1, 4, 1), (2, 3, 7)),
)


def _interior_pair(tau1: Cone, Ns, gens) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
    """Integer interior points (m, n, ℓ) and (m′, n′, ℓ) of τ₁ with mn′ − m′n ≠ 0."""
    p = [sum(g[i] for g in gens) for i in range(3)]
    K = 1
    while True:
        a = tuple(K * t for t in p)
        b = (a[0] + 1, a[1], a[2])
        if tau1.smallest_face_containing_matrix(ex.combination(Ns, b)).dim == 3:
            return a, b
        K *= 2


def _subcone_checks() -> list[Check]:
    fr = ex.frame_sym()
    Ns = ex.sym_operators()
    N0 = ex.sym_N0()
    tau = ex.sym_cone()
    F = ex.flag_sym()
    out = []
    for idx, gens in enumerate(SUBCONES):
        tau1 = Cone(7, [ex.combination(Ns, g) for g in gens])
        a, b = _interior_pair(tau1, Ns, gens)
        (m, n, _), (mp, np_, _) = a, b
        det = m * np_ - mp * n
        g = ex.sym_gamma(m, n)
        X = ex.combination(Ns, b)
        ok = (tau.contains_cone(tau1) and tau1.dim == 3 and det != 0
              and ad(g, ex.combination(Ns, a)) == ex.combination(Ns, a)
              and ad(g, X) == X + N0.scale(mp * n - m * np_) and ad(g, N0) == N0)
        out.append(Check(f"subcone{idx}.certificate", ok, {"fixed": list(a), "moving": list(b), "det": det},
                         "rank 3, det ≠ 0, drift certificate"))
        out.append(expect(f"subcone{idx}.orbit", mixed_orbit_test(fr, tau1, F).verdict, "Generates"))
    return out


# 7.3.6 ------------------------------------------------------------------------

def _relcomplete_checks(probe_count: int = 20, seed: int = 7) -> list[Check]:
    fan = build_relcomplete_fan(ex.two_weight_elliptic_ext())
    out = [expect("X_equals_Y", fan.X == fan.Y, True),
           expect("X", fan.X, Subspace.span(Matrix.from_rows([[1, 0]]))),
           expect("order", fan.order([]), 1),
           expect("m", fan.m, 1)]
    cones = []
    for n in range(-3, 4):
        c = fan.cone([], [n])
        ref = MarkedCone(1, fan.proj, [((1,), ex.N_line(n)), ((1,), ex.N_line(n + 1))], fan.W)
        out.append(expect(f"sigma(0,{n})", c.canonical(), ref.canonical()))
        cones.append(c)
    window = FanSet.from_faces(cones)
    out.append(expect("window.fan_axiom", check_fan(window).ok, True))
    out.append(expect("window.sharp", all(c.is_sharp() for c in cones), True))
    out.append(expect("query.(2N0+N1)/3", fan.query(ex.N_line(0).scale(2) + ex.N_line(1), 3), ([], [0])))
    out.append(expect("query.N(3/2)", fan.query(ex.N_line(Fraction(3, 2))), ([], [1])))
    two = MarkedCone(1, fan.proj, [((1,), ex.N_line(0)), ((1,), ex.N_line(2))], fan.W)
    res = relative_completeness_probe(fan, [two])[0]
    out.append(expect("probe.N0,N2", (res.covered, [p[0] for p in res.pieces]), (True, [(0,), (1,)])))
    single = MarkedCone(1, fan.proj, [((3,), ex.N_line(0).scale(2) + ex.N_line(1))], fan.W)
    res = relative_completeness_probe(fan, [single])[0]
    out.append(expect("probe.2N0+N1", (res.covered, [p[0] for p in res.pieces]), (True, [(0,)])))
    zero = MarkedCone(1, fan.proj, [], fan.W)
    out.append(expect("probe.zero", relative_completeness_probe(fan, [zero])[0].covered, True))
    probes = random_line_probes(fan, probe_count, seed)
    results = relative_completeness_probe(fan, probes)
    out.append(expect(f"probe.random{probe_count}", sum(not r.covered for r in results), 0))
    return out


def random_line_probes(fan, count: int, seed: int) -> list[MarkedCone]:
    """Rational cones inside the fiber over σ′, generated by one or two t·(1, N_{s})."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        gens = []
        for _ in range(rng.choice((1, 2))):
            s = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
            t = Fraction(rng.randint(1, 5), rng.randint(1, 5))
            gens.append(((t,), ex.N_line(s).scale(t)))
        out.append(MarkedCone(1, fan.proj, gens, fan.W))
    return out


def probes_generate(fan, probes) -> bool:
    fr = ex.frame_elliptic_ext()
    F = ex.flag_elliptic_ext(I, 0)
    return all(relative_orbit_test(p, F, fr).generates for p in probes)


# registry ---------------------------------------------------------------------

ITEMS: dict[str, list[tuple[str, Callable[[], list[Check]]]]] = {
    "7.1.1": [("membership", _z1_membership), ("orbit", _z1_orbits), ("fan", _z1_fan),
              ("splitting", _z1_splittings)],
    "7.1.2": [("rmf", _ell_rmf), ("membership", _ell_membership), ("orbit", _ell_orbits), ("fan", _ell_fans),
              ("neron", _ell_neron)],
    "7.1.3": [("twist", _twist_checks)],
    "7.1.5": [("ranks", _ranks)],
    "7.2.1": [("square", _square_checks)],
    "7.2.2": [("cube", _cube_checks)],
    "7.3.3": [("sym", _sym_checks)],
    "7.3.4": [("subcones", _subcone_checks)],
    "7.3.6": [("relcomplete", _relcomplete_checks)],
}


def corpus_run(name: str, threads: int = 1) -> CorpusReport:
    if name not in ITEMS:
        raise KeyError(f"unknown corpus item {name!r}; known: {', '.join(NAMES)}")
    groups = ITEMS[name]

    def run_group(item):
        prefix, fn = item
        return [Check(f"{prefix}.{c.id}", c.ok, c.observed, c.expected) for c in fn()]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_group, groups))
    else:
        results = [run_group(g) for g in groups]
    return CorpusReport(name, [c for r in results for c in r])


def b1_examples() -> list[Check]:
    """B₁ for a few unipotent matrices; used by the acceptance suite and the CLI."""
    out = []
    d = compute_B1(Matrix.from_rows([[1, 1], [0, 1]]))
    out.append(expect("b1.[[1,1],[0,1]]", (d.finite, d.divisible), ([], [[Fraction(1), Fraction(0)]])))
    d = compute_B1(Matrix.from_rows([[1, 2], [0, 1]]))
    out.append(Check("b1.[[1,2],[0,1]]", [k for _, k in d.finite] == [2] and len(d.divisible) == 1,
                     (d.finite, d.divisible), "Z/2 plus one divisible line"))
    d = compute_B1(Matrix.identity(2))
    out.append(expect("b1.identity", (d.finite, len(d.divisible)), ([], 2)))
    return out
