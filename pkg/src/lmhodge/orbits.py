"""Nilpotent-orbit tests: transversality, pure and mixed generation, smallest cones, boundary points."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .cones import Cone, MarkedCone, PolyCone
from .errors import DimensionMismatch, NotInLieAlgebra, OracleDisagreement, UndecidedRMF, WeakFanViolation
from .exactlin import GaussRational, Matrix, SubQuotient, Subspace
from .filtration import DecFiltration, induced_dec
from .hodge import HodgeFrame, _hodge_decomposition, _i_power, _positive_definite, in_check_D, in_D, is_mhs
from .monodromy import AdmissibilityResult, check_admissible, weight_filtration

SAMPLE_EXPONENTS = tuple(range(4, 11))
TERMINAL_RUN = 3


@dataclass
class OrbitReport:
    verdict: str
    reason: str | None = None
    transversality: list[bool] = field(default_factory=list)
    admissibility: AdmissibilityResult | None = None
    gr_certificates: dict = field(default_factory=dict)
    samples: list[tuple[tuple[int, ...], bool]] = field(default_factory=list)

    @property
    def generates(self) -> bool:
        return self.verdict == "Generates"


def griffiths_transversal(N: Matrix, F: DecFiltration) -> bool:
    """N F^p ⊆ F^{p−1} for every p."""
    if N.shape != (F.ambient_dim, F.ambient_dim):
        raise DimensionMismatch("operator and filtration have different sizes")
    return all(F[p - 1].contains(F[p].image(N)) for p in range(F.lo, F.hi + 2))


def sample_schedule(count: int) -> list[tuple[int, ...]]:
    """y_j = 2^{k(count−j+1)} for k in SAMPLE_EXPONENTS, so y_1 ≫ y_2 ≫ … ≫ y_count ≫ 1."""
    return [tuple(2 ** (k * (count - j)) for j in range(count)) for k in SAMPLE_EXPONENTS]


def orbit_point(Ns: Sequence[Matrix], z: Sequence, F: DecFiltration) -> DecFiltration:
    """exp(Σ z_j N_j) F."""
    n = F.ambient_dim
    X = Matrix.zeros(n, n)
    for c, N in zip(z, Ns):
        X = X + N.scale(c)
    return F.apply(X.exp_nilpotent())


def _sampled(frame: HodgeFrame, Ns: Sequence[Matrix], F: DecFiltration) -> list[tuple[tuple[int, ...], bool]]:
    out = []
    for y in sample_schedule(len(Ns)):
        z = [GaussRational(0, t) for t in y]
        out.append((y, in_D(frame, orbit_point(Ns, z, F))))
    return out


def _terminal_true(samples) -> bool:
    return len(samples) >= TERMINAL_RUN and all(ok for _, ok in samples[-TERMINAL_RUN:])


def _coordinate_span(ambient: Subspace, s: Subspace) -> Subspace:
    if s.dim == 0:
        return Subspace.zero(ambient.dim)
    return Subspace.span(ambient.coordinates(s.basis), ambient.dim)


def _primitive_check(S: Matrix, N: Matrix, M, F: DecFiltration, w: int) -> dict | None:
    """Polarization of the primitive parts of gr^M by ⟨·, N^ℓ ·⟩; returns the failure or None."""
    top = max(M.hi - w, w - M.lo + 1, 0)
    for ell in range(0, top + 1):
        sq = SubQuotient(M[w + ell], M[w + ell - 1])
        if sq.dim == 0:
            continue
        Nl = N ** (ell + 1)
        f = (sq.lifts @ Nl.T).T
        prim = M[w - ell - 3].preimage(f)
        if prim.dim == 0:
            continue
        Fg = induced_dec(sq, F)
        Fp = DecFiltration(prim.dim, {p: _coordinate_span(prim, Fg[p] & prim)
                                       for p in range(Fg.lo, Fg.hi + 2)})
        parts = _hodge_decomposition(Fp, w + ell)
        if parts is None:
            return {"check": "primitive Hodge decomposition", "ell": ell}
        form = S @ (N ** ell)
        for (p, q), h in parts.items():
            rows = h.basis @ prim.basis @ sq.lifts
            gram = (rows @ form @ rows.conj().T).scale(_i_power(p - q))
            if not _positive_definite(gram):
                return {"check": "primitive positivity", "ell": ell, "type": [p, q]}
        # isotropy between F^p and F^{w+ℓ−p+1} for the form on the primitive part
        for p in range(Fp.lo, Fp.hi + 1):
            a, b = Fp[p], Fp[w + ell - p + 1]
            if a.dim and b.dim:
                ra = a.basis @ prim.basis @ sq.lifts
                rb = b.basis @ prim.basis @ sq.lifts
                if not (ra @ form @ rb.T).is_zero():
                    return {"check": "primitive isotropy", "ell": ell, "p": p}
    return None


def _certified_pure(frame: HodgeFrame, Ns: Sequence[Matrix], F: DecFiltration) -> tuple[str, str | None, dict]:
    (w,) = frame.weights()
    S = frame.pairings[w]
    if frame.piece(w).lifts != Matrix.identity(frame.n):
        raise ValueError("pure frame must have the trivial weight filtration")
    if not in_check_D(frame, F):
        return "Fails", "F is not in the compact dual", {}
    n = frame.n
    subsets = [list(range(len(Ns)))] if len(Ns) > 5 else [
        list(c) for r in range(1, len(Ns) + 1) for c in combinations(range(len(Ns)), r)]
    certs = {}
    if not Ns:
        subsets = [[]]
    for sub in subsets:
        N = Matrix.zeros(n, n)
        for j in sub:
            N = N + Ns[j]
        M = weight_filtration(N, w)
        if not is_mhs(M, F):
            return "Fails", f"(W(N), F) is not a mixed Hodge structure for face {sub}", certs
        bad = _primitive_check(S, N, M, F, w)
        if bad is not None:
            return "Fails", f"primitive polarization fails for face {sub}: {bad['check']}", certs
        certs[tuple(sub)] = M
    return "Generates", None, certs


def pure_orbit_test(frame: HodgeFrame, Ns: Sequence[Matrix], F: DecFiltration,
                    mode: str = "certified") -> OrbitReport:
    """Nilpotent-orbit test on a pure frame (single weight)."""
    if len(frame.weights()) > 1:
        raise ValueError("pure_orbit_test needs a frame of a single weight")
    if mode not in ("certified", "sampled", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    Ns = [N for N in Ns]
    for N in Ns:
        if not frame.in_lie_algebra(N):
            raise NotInLieAlgebra("operator does not preserve the pairing")
    trans = [griffiths_transversal(N, F) for N in Ns]
    report = OrbitReport("Undecided", transversality=trans)
    cert_verdict = samp_verdict = None
    if mode in ("certified", "both"):
        if not all(trans):
            cert_verdict, reason = "Fails", "Griffiths transversality"
        else:
            cert_verdict, reason, certs = _certified_pure(frame, Ns, F)
            report.gr_certificates = certs
        report.reason = reason
    if mode in ("sampled", "both"):
        report.samples = _sampled(frame, Ns, F)
        samp_verdict = "Generates" if all(trans) and _terminal_true(report.samples) else "Fails"
        if cert_verdict is None:
            report.reason = None if samp_verdict == "Generates" else (
                "Griffiths transversality" if not all(trans) else "sampled points leave D")
    if cert_verdict and samp_verdict and cert_verdict != samp_verdict:
        raise OracleDisagreement(f"certified verdict {cert_verdict} but sampled verdict {samp_verdict}")
    report.verdict = cert_verdict or samp_verdict
    return report


def _cone_matrices(sigma: PolyCone) -> list[Matrix]:
    if isinstance(sigma, Cone):
        return list(sigma.matrices)
    if isinstance(sigma, MarkedCone):
        return [N for _, N in sigma.pairs]
    raise TypeError("expected a Cone or MarkedCone")


def mixed_orbit_test(frame: HodgeFrame, sigma: Cone, F: DecFiltration, mode: str = "certified",
                     cross_check: bool = False) -> OrbitReport:
    """(σ, F) generates a nilpotent orbit: admissibility, transversality, graded pure tests."""
    if F.ambient_dim != frame.n:
        raise DimensionMismatch("Hodge filtration and frame have different ranks")
    Ns = _cone_matrices(sigma)
    for N in Ns:
        if not frame.in_lie_algebra(N):
            raise NotInLieAlgebra("cone generator is not in the Lie algebra of the frame")
    trans = [griffiths_transversal(N, F) for N in Ns]
    report = OrbitReport("Undecided", transversality=trans)
    if not in_check_D(frame, F):
        report.verdict, report.reason = "Fails", "F is not in the compact dual"
        return report
    adm = check_admissible(sigma if isinstance(sigma, Cone) else Cone(frame.n, Ns, check=False), frame.W)
    report.admissibility = adm
    if not adm.admissible:
        if adm.failure and adm.failure.get("verdict") == "Undecided":
            raise UndecidedRMF("relative monodromy undecided while checking admissibility")
        report.verdict, report.reason = "Fails", "admissibility"
        return report
    if not all(trans):
        report.verdict, report.reason = "Fails", "Griffiths transversality"
        return report
    for w in frame.weights():
        gp = frame.piece(w)
        sub = pure_orbit_test(frame.graded_frame(w), [gp.induced_map(N) for N in Ns],
                              frame.graded(w, F), mode)
        report.gr_certificates[w] = sub
        if not sub.generates:
            report.verdict, report.reason = "Fails", f"graded orbit on gr^W_{w}: {sub.reason}"
            return report
    report.verdict = "Generates"
    if cross_check:
        report.samples = _sampled(frame, Ns, F)
        if not _terminal_true(report.samples):
            raise OracleDisagreement("certified Generates but sampled points leave D")
    return report


def relative_orbit_test(mk: MarkedCone, F: DecFiltration, frame: HodgeFrame, mode: str = "certified") -> OrbitReport:
    """Condition on the 𝔤-component of a marked cone; independent of the σ′-coordinate."""
    return mixed_orbit_test(frame, mk.g_component(), F, mode)


def orbit_test(frame: HodgeFrame, sigma: PolyCone, F: DecFiltration, mode: str = "certified") -> OrbitReport:
    if isinstance(sigma, MarkedCone):
        return relative_orbit_test(sigma, F, frame, mode)
    return mixed_orbit_test(frame, sigma, F, mode)


def smallest_generating_cone(fan: Iterable[PolyCone], tau: PolyCone, F: DecFiltration,
                             frame: HodgeFrame) -> PolyCone | None:
    """Smallest σ in the fan containing τ with (σ, F) generating; it must be a face of every such σ."""
    A = [s for s in fan if s.contains_cone(tau) and orbit_test(frame, s, F).generates]
    if not A:
        return None
    best = min(A, key=lambda s: (s.dim, len(s.extreme_rays())))
    for s in A:
        if not best.is_face_of(s):
            raise WeakFanViolation(f"{best!r} is not a face of {s!r}")
    return best


def classify_boundary(sigma: PolyCone, tau: PolyCone, a: Sequence, F: DecFiltration,
                      frame: HodgeFrame) -> OrbitReport:
    """Orbit test for (τ, exp(a)F), with a given by coefficients on σ's generators."""
    if not tau.is_face_of(sigma):
        raise ValueError("τ is not a face of σ")
    Ns = _cone_matrices(sigma)
    if len(a) != len(Ns):
        raise DimensionMismatch("one coefficient per generator of σ is required")
    return orbit_test(frame, tau, orbit_point(Ns, a, F))
