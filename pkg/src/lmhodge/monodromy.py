"""Weight filtrations of nilpotent operators, relative monodromy filtrations, admissibility.

The relative monodromy solver works in two stages.  Bound propagation
squeezes each M_k between a forced lower subspace and an allowed upper
subspace; a contradiction there yields a non-existence witness naming the
violated constraint.  The second stage builds M by lifting primitive vectors
one weight at a time; it either produces M or finds a vector that no lift can
repair, which is again a named witness.  Every produced M is re-checked by
:func:`verify_rmf`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cones import Cone, PolyCone
from .errors import DimensionMismatch, NonCommuting, NotNilpotent, RMFNotExists, UndecidedRMF
from .exactlin import Matrix, Subspace, sum_all
from .filtration import FilteredNilp, GradedPiece, IncFiltration, hom_operator


# powers are reused heavily
class _Powers:
    def __init__(self, N: Matrix):
        self.N = N
        self._p = [Matrix.identity(N.nrows)]

    def __getitem__(self, k: int) -> Matrix:
        while len(self._p) <= k:
            self._p.append(self._p[-1] @ self.N)
        return self._p[k]


def _relative_length(P: _Powers, big: Subspace, small: Subspace) -> int:
    """Largest ℓ with N^ℓ big ⊄ small (−1 when big = small)."""
    if small.contains(big):
        return -1
    ell = 0
    while not small.contains(big.image(P[ell + 1])):
        ell += 1
    return ell


def graded_weight_filtration(N: Matrix, big: Subspace, small: Subspace, center: int,
                             powers: _Powers | None = None) -> tuple[dict[int, Subspace], int]:
    """Weight filtration of N on big/small centred at ``center``, as subspaces between small and big.

    Returns the steps on [center − ℓ − 1, center + ℓ] and ℓ.  Uses
    M_{c+d} = Σ_{i − j = d} ker N^{i+1} ∩ Im N^j (computed modulo small).
    """
    P = powers or _Powers(N)
    ell = _relative_length(P, big, small)
    if ell < 0:
        return {center: big}, 0
    ker = [big & small.preimage(P[i]) for i in range(ell + 2)]
    img = [big.image(P[j]) + small for j in range(ell + 1)]
    steps = {center - ell - 1: small}
    for d in range(-ell, ell + 1):
        parts = [ker[i + 1] & img[i - d] for i in range(max(0, d), ell + 1) if 0 <= i - d <= ell]
        steps[center + d] = sum_all(parts + [small], big.ambient_dim)
    steps[center + ell] = big
    return steps, ell


def weight_filtration(N: Matrix, center: int = 0) -> IncFiltration:
    """The unique W(N) with N W_k ⊆ W_{k−2} and N^ℓ: gr_{c+ℓ} ≅ gr_{c−ℓ}."""
    if not N.is_square:
        raise DimensionMismatch("N must be square")
    if not N.is_nilpotent():
        raise NotNilpotent("weight filtration needs a nilpotent operator")
    n = N.nrows
    if n == 0:
        return IncFiltration(0, {})
    steps, _ = graded_weight_filtration(N, Subspace.full(n), Subspace.zero(n), center)
    return IncFiltration(n, steps)


def weight_filtration_by_peeling(N: Matrix, center: int = 0) -> IncFiltration:
    """Independent construction by recursive peeling.

    With ℓ the nilpotency order minus one, set M_{c+ℓ} = V, M_{c−ℓ−1} = 0,
    M_{c+ℓ−1} = ker N^ℓ and M_{c−ℓ} = Im N^ℓ, then recurse on
    ker N^ℓ / Im N^ℓ with the same centre.
    """
    n = N.nrows
    if n == 0:
        return IncFiltration(0, {})
    steps = _peel(N, Subspace.full(n), Subspace.zero(n), center)
    return IncFiltration(n, steps)


def _peel(N: Matrix, big: Subspace, small: Subspace, c: int) -> dict[int, Subspace]:
    P = _Powers(N)
    ell = _relative_length(P, big, small)
    if ell < 0:
        return {c: big}
    if ell == 0:
        return {c - 1: small, c: big}
    kerl = big & small.preimage(P[ell])
    imgl = big.image(P[ell]) + small
    inner = _peel(N, kerl, imgl, c)
    out = {k: _clamp(inner, k) for k in range(c - ell + 1, c + ell - 1)}
    out.update({c - ell - 1: small, c - ell: imgl, c + ell - 1: kerl, c + ell: big})
    return out


def is_weight_filtration_of(N: Matrix, M: IncFiltration, center: int = 0) -> bool:
    """Axiom check: N M_k ⊆ M_{k−2} and N^j: gr_{c+j} → gr_{c−j} bijective for j ≥ 0."""
    if not M.lowered_by(N, 2):
        return False
    P = _Powers(N)
    for j in range(0, max(M.hi - center, center - M.lo) + 2):
        src = GradedPiece(M, center + j)
        dst = GradedPiece(M, center - j)
        if src.dim != dst.dim:
            return False
        if src.dim and dst.project(src.lifts @ P[j].T).rank() != src.dim:
            return False
    return True


# relative monodromy --------------------------------------------------------

@dataclass
class RMFResult:
    """Outcome of the relative monodromy solver; ``verdict`` is Exists, NotExists or Undecided."""

    verdict: str
    filtration: IncFiltration | None = None
    witness: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def exists(self) -> bool:
        return self.verdict == "Exists"

    def require(self) -> IncFiltration:
        if self.verdict == "Exists":
            return self.filtration
        if self.verdict == "NotExists":
            raise RMFNotExists("relative monodromy filtration does not exist", self.witness)
        raise UndecidedRMF("relative monodromy solver could not decide")


@dataclass
class VerifyReport:
    ok: bool
    failure: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


def _clamp(steps: Mapping[int, Subspace], k: int) -> Subspace:
    """Step k of a filtration stored on a contiguous window, constant outside it."""
    lo, hi = min(steps), max(steps)
    return steps[min(max(k, lo), hi)]


def _power_label(k: int) -> str:
    return "N" if k == 1 else f"N^{k}"


def _vector_witness(space: Subspace, target: Subspace) -> list:
    for i in range(space.dim):
        row = space.basis.row(i)
        if not target.contains(row):
            return row.row_list(0)
    return []


def relative_monodromy(x: FilteredNilp, max_rounds: int = 10_000) -> RMFResult:
    """Decide whether the relative monodromy filtration M(N, W) exists and compute it."""
    W, N = x.W, x.N
    n = x.dim
    if n == 0:
        return RMFResult("Exists", IncFiltration(0, {}))
    if W.lowered_by(N, 2):
        # N is zero on every gr^W, so M = W satisfies both conditions; uniqueness does the rest
        return RMFResult("Exists", W, stats={"shortcut": "N W_k ⊆ W_{k-2}"})
    P = _Powers(N)
    jumps = W.jumps()
    grwf: dict[int, tuple[dict[int, Subspace], int]] = {
        w: graded_weight_filtration(N, W[w], W[w - 1], w, P) for w in jumps}
    k_lo = min(w - ell for w, (_, ell) in grwf.items())
    k_hi = max(w + ell for w, (_, ell) in grwf.items())
    forced = {k: sum(_clamp(steps, k).dim - W[w - 1].dim for w, (steps, _) in grwf.items())
              for k in range(k_lo - 1, k_hi + 1)}

    zero, full = Subspace.zero(n), Subspace.full(n)
    rng = range(k_lo, k_hi)
    low = {k: zero for k in rng}
    up = {k: full for k in rng}
    low_src: dict[int, list[tuple[str, Subspace]]] = {k: [] for k in rng}
    up_src: dict[int, list[str]] = {k: [] for k in rng}
    top = jumps[-1]
    top_steps = grwf[top][0]

    def low_at(k):
        return zero if k < k_lo else full if k >= k_hi else low[k]

    def up_at(k):
        return zero if k < k_lo else full if k >= k_hi else up[k]

    rounds = 0
    changed = True
    while changed:
        rounds += 1
        if rounds > max_rounds:
            return RMFResult("Undecided", witness={"reason": "propagation round limit"})
        changed = False
        for k in rng:
            # forced from above: N M_{k+2} ⊆ M_k
            contrib = low_at(k + 2).image(N)
            if not low[k].contains(contrib):
                low[k] = low[k] + contrib
                low_src[k].append((f"N M_{{{k + 2}}} ⊆ M_{{{k}}}", contrib))
                changed = True
            # the kernel of N inside W_k lies in M_k
            contrib = W[k] & zero.preimage(N)
            if not low[k].contains(contrib):
                low[k] = low[k] + contrib
                low_src[k].append((f"ker N ∩ W_{{{k}}} ⊆ M_{{{k}}}", contrib))
                changed = True
            # allowed: M_k ⊆ N^{-1} M_{k-2}
            bound = up_at(k - 2).preimage(N)
            if not bound.contains(up[k]):
                up[k] = up[k] & bound
                up_src[k].append(f"N M_{{{k}}} ⊆ M_{{{k - 2}}}")
                changed = True
            # the top graded piece pins down M_k modulo W_{top-1}
            bound = _clamp(top_steps, k)
            if not bound.contains(up[k]):
                up[k] = up[k] & bound
                up_src[k].append(f"M_{{{k}}} induces the weight filtration on gr^W_{{{top}}}")
                changed = True
        for k in rng:
            if not up[k].contains(low[k]):
                return _propagation_witness(k, low_src[k], up[k], up_src[k], rounds)
            if low[k].dim > forced[k] or up[k].dim < forced[k]:
                return RMFResult("NotExists", witness={
                    "index": k,
                    "constraint": f"dim M_{{{k}}} = {forced[k]}",
                    "vector": [],
                    "lower_dim": low[k].dim,
                    "upper_dim": up[k].dim,
                }, stats={"rounds": rounds})

    stats = {"rounds": rounds, "bounds_met": all(low[k] == up[k] for k in rng)}
    steps, failure = _lift_construct(W, N, P, grwf, k_lo, k_hi)
    if failure is not None:
        return RMFResult("NotExists", witness=failure, stats=stats)
    M = IncFiltration(n, steps)
    for k in rng:
        if not (M[k].contains(low[k]) and up[k].contains(M[k])):
            return RMFResult("Undecided", witness={"reason": "constructed M escapes the bounds", "index": k},
                             stats=stats)
    report = verify_rmf(x, M)
    if not report:
        return RMFResult("Undecided", witness={"reason": "constructed M fails verification", **report.failure},
                         stats=stats)
    return RMFResult("Exists", M, stats=stats)


def _propagation_witness(k, sources, upper, upper_src, rounds) -> RMFResult:
    for label, contrib in sources:
        if not upper.contains(contrib):
            return RMFResult("NotExists", witness={
                "index": k,
                "constraint": label,
                "vector": _vector_witness(contrib, upper),
                "upper_constraints": list(upper_src),
            }, stats={"rounds": rounds})
    raise AssertionError("propagation contradiction without an offending source")


def _lift_construct(W: IncFiltration, N: Matrix, P: _Powers, grwf, k_lo: int, k_hi: int):
    """Build M weight by weight; returns (steps, None) or (None, witness).

    On W_{w-1} the filtration is already built.  Each primitive class of the
    weight filtration on gr^W_w, of length ℓ, is lifted to p ∈ W_w and corrected
    by u ∈ W_{w-1} until N^{ℓ+1}(p+u) lands in M_{w-ℓ-2}; the string
    p+u, N(p+u), ... is then added at weights w+ℓ, w+ℓ-2, ...
    """
    n = W.ambient_dim
    zero = Subspace.zero(n)
    jumps = W.jumps()
    rng = range(k_lo - 1, k_hi + 1)
    cur = {k: _clamp(grwf[jumps[0]][0], k) for k in rng}
    for w in jumps[1:]:
        U, Vw = W[w - 1], W[w]
        mk, ell_w = grwf[w]
        strings: list[tuple[int, Matrix]] = []
        for ell in range(ell_w, -1, -1):
            a = Vw & U.preimage(P[ell + 1]) & _clamp(mk, w + ell)
            chosen = a & _clamp(mk, w + ell - 1)
            target = cur.get(w - ell - 2, zero)
            for i in range(a.dim):
                p = a.basis.row(i)
                if chosen.contains(p):
                    continue
                chosen = chosen + Subspace.span(p)
                fixed = _fix_primitive(P[ell + 1], p, U, target)
                if fixed is None:
                    return None, {
                        "index": w - ell - 2,
                        "constraint": f"{_power_label(ell + 1)} M_{{{w + ell}}} ⊆ M_{{{w - ell - 2}}}",
                        "vector": p.row_list(0),
                        "weight": w,
                    }
                strings.append((ell, fixed))
        new = {}
        for k in rng:
            rows = [p @ P[j].T for ell, p in strings for j in range(ell + 1) if w + ell - 2 * j <= k]
            new[k] = cur[k] + Subspace.span(Matrix.vstack(rows)) if rows else cur[k]
        cur = new
    return cur, None


def _fix_primitive(Nl: Matrix, p: Matrix, U: Subspace, target: Subspace) -> Matrix | None:
    """Find u ∈ U with Nl(p + u) ∈ target; return p + u (a row) or None."""
    img = p @ Nl.T
    if target.contains(img):
        return p
    if U.dim == 0:
        return None
    cols = [(U.basis @ Nl.T).T]
    if target.dim:
        cols.append(-target.basis.T)
    a = Matrix.hstack(cols)
    sol = a.solve_particular(-img.T)
    if sol is None:
        return None
    c = sol.submatrix(range(U.dim), [0]).T
    return p + c @ U.basis


def verify_rmf(x: FilteredNilp, M: IncFiltration) -> VerifyReport:
    """Check N M_k ⊆ M_{k−2} and that M induces on gr^W_w the weight filtration centred at w."""
    W, N = x.W, x.N
    if M.ambient_dim != x.dim:
        raise DimensionMismatch("candidate lives on a different space")
    for k in range(M.lo, M.hi + 3):
        if not M[k - 2].contains(M[k].image(N)):
            return VerifyReport(False, {"check": "N M_k ⊆ M_{k-2}", "index": k})
    P = _Powers(N)
    for w in W.jumps():
        big, small = W[w], W[w - 1]
        ell = _relative_length(P, big, small)
        span = max(ell + 2, max(abs(M.hi - w), abs(M.lo - w)) + 2)

        cache: dict[int, Subspace] = {}

        def F(i):
            if i not in cache:
                cache[i] = (M[i] & big) + small
            return cache[i]

        for m in range(0, span + 1):
            src = F(w + m)
            lower = F(w + m - 1)
            kernel_like = src & F(w - m - 1).preimage(P[m])
            if kernel_like != lower:
                return VerifyReport(False, {"check": "N^m injective on gr", "weight": w, "m": m})
            d_src = src.dim - lower.dim
            d_dst = F(w - m).dim - F(w - m - 1).dim
            if d_src != d_dst:
                return VerifyReport(False, {"check": "N^m surjective on gr", "weight": w, "m": m})
    return VerifyReport(True)


def successive_filtrations(Ns: Sequence[Matrix], W: IncFiltration) -> list[IncFiltration]:
    """M_0 = W, M_j = M(N_j, M_{j−1})."""
    out = []
    cur = W
    for idx, N in enumerate(Ns):
        res = relative_monodromy(FilteredNilp(cur, N))
        if res.verdict == "NotExists":
            raise RMFNotExists(f"no relative monodromy filtration at index {idx}", res.witness, idx)
        if res.verdict != "Exists":
            raise UndecidedRMF(f"undecided at index {idx}")
        cur = res.filtration
        out.append(cur)
    return out


# admissibility --------------------------------------------------------------

def adjoint_action(Ns: Sequence[Matrix]) -> list[Matrix]:
    """ad N acting on row-major vectorized End(V)."""
    return [hom_operator(N, N) for N in Ns]


@dataclass
class AdmissibilityResult:
    verdict: str
    certificate: list[tuple[tuple[int, ...], IncFiltration]] = field(default_factory=list)
    failure: dict | None = None

    @property
    def admissible(self) -> bool:
        return self.verdict == "Admissible"

    def filtration_of(self, support: Sequence[int]) -> IncFiltration:
        key = tuple(sorted(support))
        for s, m in self.certificate:
            if s == key:
                return m
        raise KeyError(key)


def _action_images(sigma: PolyCone, action) -> list[Matrix]:
    if action is None:
        if not isinstance(sigma, Cone):
            raise ValueError("an action is required for cones that are not matrix cones")
        return list(sigma.matrices)
    if callable(action):
        return [action(v) for v in sigma.vectors]
    mats = list(action)
    if len(mats) != len(sigma.vectors):
        raise DimensionMismatch("action needs one image per cone generator")
    return mats


def check_admissible(sigma: PolyCone, W: IncFiltration, action=None) -> AdmissibilityResult:
    """Admissibility of (σ, W) for an action given by images of σ's generators."""
    images = _action_images(sigma, action)
    n = W.ambient_dim
    for g in images:
        if g.shape != (n, n):
            raise DimensionMismatch("action image has the wrong size")
        if not g.is_nilpotent():
            raise NotNilpotent("action image is not nilpotent")
        if not W.is_preserved_by(g):
            return AdmissibilityResult("NotAdmissible", failure={"condition": "N preserves W"})
    for i, g in enumerate(images):
        for h in images[i + 1:]:
            if not g.commutes_with(h):
                raise NonCommuting("action images do not commute")

    lattice = sigma.faces()

    def act(support):
        out = Matrix.zeros(n, n)
        for i in support:
            out = out + images[i]
        return out

    certs: dict[tuple[int, ...], IncFiltration] = {}
    for support in lattice.supports:
        res = relative_monodromy(FilteredNilp(W, act(support)))
        if res.verdict != "Exists":
            return AdmissibilityResult("NotAdmissible", list(certs.items()), {
                "condition": "M(τ) exists", "face": list(support), "verdict": res.verdict,
                "witness": res.witness})
        certs[support] = res.filtration

    minimal = lattice.supports[0]
    if certs[minimal] != W:
        return AdmissibilityResult("NotAdmissible", list(certs.items()),
                                   {"condition": "M at the minimal face equals W", "face": list(minimal)})
    for support, M in certs.items():
        for i, g in enumerate(images):
            if not M.is_preserved_by(g):
                return AdmissibilityResult("NotAdmissible", list(certs.items()), {
                    "condition": "σ preserves M(τ)", "face": list(support), "generator": i})
        for i in support:
            if not M.lowered_by(images[i], 2):
                return AdmissibilityResult("NotAdmissible", list(certs.items()), {
                    "condition": "τ lowers M(τ) by 2", "face": list(support), "generator": i})

    # composition: M(τ') = M(N, M(τ)) for generators N and τ' the face spanned by τ and N
    probes = [[1 if j == i else 0 for j in range(len(images))] for i in range(len(images))]
    seen = set()
    for support, M in certs.items():
        for coeffs in probes:
            key = (support, tuple(coeffs))
            if key in seen or not any(coeffs):
                continue
            seen.add(key)
            v = [sum(c * sigma.vectors[j][t] for j, c in enumerate(coeffs)) for t in range(sigma.ambient_dim)]
            base = [sum(sigma.vectors[j][t] for j in support) for t in range(sigma.ambient_dim)]
            joint_support = sigma.smallest_face_support([a + b for a, b in zip(v, base)])
            Nprime = Matrix.zeros(n, n)
            for j, c in enumerate(coeffs):
                if c:
                    Nprime = Nprime + images[j].scale(c)
            res = relative_monodromy(FilteredNilp(M, Nprime))
            if res.verdict != "Exists" or res.filtration != certs[joint_support]:
                return AdmissibilityResult("NotAdmissible", list(certs.items()), {
                    "condition": "M(τ') = M(N', M(τ))", "face": list(support),
                    "probe": list(coeffs), "joint_face": list(joint_support)})
    return AdmissibilityResult("Admissible", sorted(certs.items()))
