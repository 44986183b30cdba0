"""The thirteen acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

from __future__ import annotations

import contextlib
import io
import json
import random
from fractions import Fraction
from itertools import product

import pytest

from documents import sample_documents
from helpers import CORPUS_CONES, random_block_instance
from lmhodge import examples as ex
from lmhodge.cli import main
from lmhodge.cones import Cone
from lmhodge.corpus import GRID, Z_SAMPLES, ad, random_line_probes
from lmhodge.errors import OracleDisagreement
from lmhodge.exactlin import GaussRational, I, Matrix, Subspace, invariants_rank
from lmhodge.filtration import (
    FilteredNilp,
    IncFiltration,
    combine,
    inc_direct_sum,
    inc_hom,
    inc_restrict,
    inc_tensor,
)
from lmhodge.hodge import delta_splitting, random_mhs
from lmhodge.monodromy import adjoint_action, check_admissible, relative_monodromy
from lmhodge.neron import (
    build_relcomplete_fan,
    compute_B1,
    in_sigma1,
    kummer_type,
    relative_completeness_probe,
    sigma_tau_upsilon,
)
from lmhodge.orbits import mixed_orbit_test, pure_orbit_test


@pytest.fixture
def verdict(capsys):
    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return record


def span(rows, n):
    return Subspace.span(Matrix.from_rows(rows, n))


# 1 ----------------------------------------------------------------------------------

def test_c01_rmf_line_values(verdict):
    W = ex.frame_elliptic_ext().W
    e1 = span([[1, 0, 0]], 3)
    ok = True
    for n in range(-3, 4):
        res = relative_monodromy(FilteredNilp(W, ex.N_line(n)))
        M = res.filtration
        ok &= (res.verdict == "Exists" and M[-3].is_zero() and M[-2] == e1 and M[-1] == e1
               and M[0].is_full() and (M.lo, M.hi) == (-2, 0))
    verdict(1, "relative monodromy of the line example: M_-2 = M_-1 = span(e1), M_0 = full", ok)


# 2 ----------------------------------------------------------------------------------

def test_c02_rmf_nonexistence(verdict):
    W = IncFiltration.from_dims_of_coordinates(2, [0, 1])
    res = relative_monodromy(FilteredNilp(W, ex.unit(2, 0, 1)))
    ok = res.verdict == "NotExists" and res.witness["constraint"] == "N M_{1} ⊆ M_{-1}"
    verdict(2, "two-dimensional witness is NotExists with the violated constraint named", ok,
            f"{res.verdict}, {res.witness and res.witness.get('constraint')}")


# 3 / 4 ------------------------------------------------------------------------------

def _functoriality_instances(count: int = 100):
    rng = random.Random(20261017)
    for _ in range(count):
        a = random_block_instance(rng, 4)
        b = random_block_instance(rng, max(1, 8 // a.x.dim))
        yield a, b


def test_c03_functoriality_oracle(verdict):
    failures, undecided, total = [], 0, 0
    for a, b in _functoriality_instances():
        total += 1
        # the oracle M of each summand is known from its construction
        for op, ref in (("direct_sum", inc_direct_sum), ("tensor", inc_tensor), ("hom", inc_hom)):
            if op == "direct_sum" and a.x.dim + b.x.dim > 8:
                continue
            res = relative_monodromy(combine(a.x, b.x, op))
            undecided += res.verdict == "Undecided"
            if res.verdict != "Exists" or res.filtration != ref(a.M, b.M):
                failures.append(op)
        if a.x.dim + b.x.dim <= 8:
            M = relative_monodromy(combine(a.x, b.x, "direct_sum")).filtration
            n1, n = a.x.dim, a.x.dim + b.x.dim
            if inc_restrict(M, Subspace.coordinate(n, range(n1))) != a.M or \
                    inc_restrict(M, Subspace.coordinate(n, range(n1, n))) != b.M:
                failures.append("restriction")
    verdict(3, "functoriality under sum, tensor, Hom and restriction", not failures and not undecided and total >= 100,
            f"{total} instances, {len(failures)} failures, {undecided} undecided")


def test_c04_kernel_inclusion(verdict):
    checked, failures = 0, 0
    instances = [x for a, b in _functoriality_instances() for x in (a.x, b.x, combine(a.x, b.x, "tensor"))]
    instances += [FilteredNilp(W, N) for _, cone, W in CORPUS_CONES for N in cone.matrices]
    for x in instances:
        res = relative_monodromy(x)
        if res.verdict != "Exists":
            continue
        checked += 1
        ker = Subspace.zero(x.dim).preimage(x.N)
        M = res.filtration
        if not all(M[w].contains(ker & x.W[w]) for w in range(x.W.lo, x.W.hi + 1)):
            failures += 1
    verdict(4, "ker(N) ∩ W_w ⊆ M_w on every instance with a relative monodromy filtration", failures == 0,
            f"{checked} instances, {failures} failures")


# 5 ----------------------------------------------------------------------------------

def test_c05_adjoint_admissible(verdict):
    failures = []
    for name, cone, W in CORPUS_CONES:
        if not check_admissible(cone, W).admissible:
            continue
        if not check_admissible(cone, inc_hom(W, W), adjoint_action(cone.matrices)).admissible:
            failures.append(name)
    verdict(5, "admissible corpus cones stay admissible under the adjoint action", not failures,
            f"{len(CORPUS_CONES)} cones, failures: {failures}")


# 6 ----------------------------------------------------------------------------------

def test_c06_orbit_examples(verdict):
    fr = ex.frame_elliptic_ext()
    line = all(mixed_orbit_test(fr, ex.sigma_n(0), ex.flag_elliptic_ext(I, z)).verdict == "Generates"
               for z in Z_SAMPLES)
    tw = ex.frame_elliptic_ext(2)
    good = mixed_orbit_test(tw, ex.sigma_n(0), ex.flag_elliptic_twist(I, 5, 0)).verdict
    bad = mixed_orbit_test(tw, ex.sigma_n(0), ex.flag_elliptic_twist(I, 5, 1)).verdict
    verdict(6, "line orbit generates; twisted boundary passes at w = 0 and fails at w = 1",
            line and good == "Generates" and bad == "Fails", f"w=0 {good}, w=1 {bad}")


# 7 ----------------------------------------------------------------------------------

def _orbit_instances():
    out = []
    for sign in (1, -1):
        out += [(ex.frame_z1(), ex.cone_z1(sign), ex.flag_z1(z)) for z in Z_SAMPLES]
    fr = ex.frame_elliptic_ext()
    out += [(fr, ex.sigma_n(0), ex.flag_elliptic_ext(I, z)) for z in Z_SAMPLES]
    out += [(fr, ex.sigma_nn1(0), ex.flag_elliptic_ext(t, GaussRational(2, -1))) for t in (I, -I, GaussRational(1, 2))]
    tw = ex.frame_elliptic_ext(2)
    out += [(tw, ex.sigma_n(0), ex.flag_elliptic_twist(I, 5, w)) for w in (0, 1)]
    out.append((ex.frame_square(), ex.square_cone(), ex.flag_square(I)))
    out.append((ex.frame_sym(), ex.sym_cone(), ex.flag_sym()))
    return out


def test_c07_certified_vs_sampled(verdict):
    disagreements, runs = 0, 0
    cases = []
    for fr, cone, F in _orbit_instances():
        for w in fr.weights():
            gp = fr.piece(w)
            cases.append((fr.graded_frame(w), [gp.induced_map(N) for N in cone.matrices], fr.graded(w, F)))
    gf = ex.frame_elliptic_ext().graded_frame(-1)
    cases += [(gf, [N], ex.elliptic_flag(t)) for N in (ex.NPRIME, -ex.NPRIME) for t in (I, -I)]
    for frame, Ns, F in cases:
        runs += 1
        try:
            pure_orbit_test(frame, Ns, F, "both")
        except OracleDisagreement:
            disagreements += 1
    verdict(7, "certified and sampled pure orbit verdicts agree on the corpus", disagreements == 0,
            f"{runs} graded instances, {disagreements} disagreements")


# 8 ----------------------------------------------------------------------------------

def _grid():
    for (m, n, *_), (_, _, mp, np_, ell, k) in product(GRID, GRID):
        yield m, n, mp, np_, ell, k


def test_c08_fan_counterexamples(verdict):
    N1, N2 = ex.square_operators()
    tau = ex.square_cone()
    meet = tau.intersect(tau.ad(ex.square_gamma(1, 1)))
    meet_ok = meet.canonical() == Cone(5, [N1 + N2]).canonical() and not meet.is_face_of(tau)
    bad = 0
    for m, n, mp, np_, ell, k in _grid():
        X = N1.scale(mp) + N2.scale(np_)
        bad += ad(ex.square_gamma(m, n), X, k) != X + ex.square_N0().scale(k * (mp * n - m * np_))
        for Ns, gamma, N0 in ((ex.cube_operators(), ex.cube_gamma, ex.cube_N0()),
                              (ex.sym_operators(), ex.sym_gamma, ex.sym_N0())):
            g = gamma(m, n)
            fixed = ex.combination(Ns, [m, n, ell])
            X = ex.combination(Ns, [mp, np_, ell])
            bad += ad(g, fixed) != fixed
            bad += ad(g, X, k) != X + N0.scale(k * (mp * n - m * np_))
    verdict(8, "square intersection is R>=0(N1+N2) and not a face; Ad-orbit identities on a 3x3 grid",
            meet_ok and bad == 0, f"intersection ok={meet_ok}, {bad} identity failures")


# 9 ----------------------------------------------------------------------------------

def _in_B1_oracle(b):
    # (γ − 1)b = (b₂, 0) for γ = [[1, 1], [0, 1]]
    return b[1].denominator == 1


def test_c09_neron_values(verdict):
    gamma = Matrix.from_rows([[1, 1], [0, 1]])
    d = compute_B1(gamma)
    grid = [Fraction(p, q) for p in range(-4, 5) for q in (1, 2, 3)]
    described = d.finite == [] and d.divisible == [[Fraction(1), Fraction(0)]]
    agree = all(d.contains(gamma, [x, y]) == _in_B1_oracle([x, y]) for x in grid for y in grid)
    ctx = ex.neron_elliptic_ext()
    kinds = [str(kummer_type(ctx, sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(0, b))))
             for b in (0, -1, 2, Fraction(1, 2))]
    window = all(in_sigma1(ctx, sigma_tau_upsilon(ctx, [0], ex.upsilon_translation(b1, b2)))
                 for b1 in range(-2, 3) for b2 in range(-2, 3))
    ok = described and agree and kinds == ["Iso", "Iso", "Iso", "Kummer(2)"] and window
    verdict(9, "B1 of [[1,1],[0,1]], Iso/Kummer(2) examples, Sigma0 inside Sigma1 on a window", ok,
            f"B1 described={described}, membership agrees={agree}, kinds={kinds}")


# 10 ---------------------------------------------------------------------------------

def test_c10_relcomplete_reconstruction(verdict):
    fan = build_relcomplete_fan(ex.two_weight_elliptic_ext())
    mismatched = [n for n in range(-3, 4)
                  if fan.cone([], [n]).g_component().canonical() != ex.sigma_nn1(n).canonical()]
    probes = random_line_probes(fan, 20, seed=11)
    uncovered = sum(not r.covered for r in relative_completeness_probe(fan, probes))
    verdict(10, "relatively complete fan reproduces sigma_{n,n+1} and covers 20 random probes",
            not mismatched and uncovered == 0, f"mismatched n: {mismatched}, uncovered probes: {uncovered}")


# 11 ---------------------------------------------------------------------------------

def test_c11_invariant_ranks(verdict):
    gs = ex.tensor_sum_monodromies()
    ranks = [invariants_rank([], gs[0].nrows)] + [invariants_rank(gs[:k]) for k in (1, 2, 3)]
    verdict(11, "ranks of invariants 20 / 14 / 10 / 7", ranks == [20, 14, 10, 7], f"got {ranks}")


# 12 ---------------------------------------------------------------------------------

SHAPES = [
    {-1: {(-1, 0): 1, (0, -1): 1}, 0: {(0, 0): 1}},
    {-2: {(-1, -1): 1}, 0: {(0, 0): 2}},
    {-2: {(-1, -1): 1}, -1: {(-1, 0): 1, (0, -1): 1}, 0: {(0, 0): 1}},
    {0: {(1, -1): 1, (-1, 1): 1, (0, 0): 1}, 1: {(1, 0): 1, (0, 1): 1}},
    {-3: {(-2, -1): 1, (-1, -2): 1}, -1: {(-1, 0): 1, (0, -1): 1}},
]


def test_c12_delta_splitting(verdict):
    rng = random.Random(5)
    bad = 0
    for i in range(50):
        W, F = random_mhs(rng, SHAPES[i % len(SHAPES)])
        bad += delta_splitting(W, F).reconstruct() != F
    fr = ex.frame_z1()
    N = ex.unit(2, 0, 1)
    shift_bad = 0
    for z in Z_SAMPLES:
        F = ex.flag_z1(z)
        for a in (GaussRational(Fraction(1, 3), 2), GaussRational(-1, Fraction(-5, 2)), I):
            before = delta_splitting(fr.W, F).delta
            after = delta_splitting(fr.W, F.apply(N.exp_nilpotent(a))).delta
            shift_bad += after != before + N.scale(a.im)
    verdict(12, "delta reconstruction on 50 random MHS and the shift law on the line family",
            bad == 0 and shift_bad == 0, f"{bad} reconstruction failures, {shift_bad} shift failures")


# 13 ---------------------------------------------------------------------------------

def _cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        status = main(argv)
    return status, buf.getvalue()


def test_c13_cli_determinism(verdict, tmp_path):
    differing = []
    for name, (argv, doc) in sample_documents().items():
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(doc))
        outs = {_cli(argv + [str(path), "--threads", str(t)]) for t in (1, 1, 4)}
        if len(outs) != 1:
            differing.append(name)
    corpus = {_cli(["corpus", "run", "all", "--threads", str(t)]) for t in (1, 4)}
    if len(corpus) != 1:
        differing.append("corpus")
    corpus_ok = all(status == 0 for status, _ in corpus)
    verdict(13, "CLI reports are byte-identical across runs and thread counts", not differing and corpus_ok,
            f"differing: {differing}, corpus all PASS={corpus_ok}")
