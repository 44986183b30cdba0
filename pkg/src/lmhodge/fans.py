"""Finite fans and weak fans: face closure, the fan axiom, weak-fan falsification, Γ(σ) and compatibility."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Callable, Iterable, Sequence

from .cones import Cone, MarkedCone, PolyCone
from .errors import NotIntegralizable, NotSimplicial, UndecidedRMF
from .exactlin import Matrix
from .hodge import HodgeFrame
from .orbits import orbit_test


class FanSet:
    """A finite set of sharp rational cones, stored once per canonical form.

    ``schema`` optionally decides membership in an infinite fan of which the
    stored cones are a finite window; compatibility checks consult it for
    transported cones that leave the window.
    """

    def __init__(self, cones: Iterable[PolyCone], flavor: str | None = None,
                 schema: Callable[[PolyCone], bool] | None = None):
        seen: dict[tuple, PolyCone] = {}
        for c in cones:
            if not c.is_sharp():
                raise ValueError(f"cone {c!r} is not sharp")
            seen.setdefault(c.canonical(), c)
        self._cones = dict(sorted(seen.items()))
        if flavor is None:
            flavor = "marked" if any(isinstance(c, MarkedCone) for c in seen.values()) else "absolute"
        self.flavor = flavor
        self.schema = schema

    @classmethod
    def from_faces(cls, cones: Iterable[PolyCone], **kw) -> "FanSet":
        """All faces of the given cones."""
        out = []
        for c in cones:
            out.extend(c.faces().faces)
        return cls(out, **kw)

    def __iter__(self):
        return iter(self._cones.values())

    def __len__(self) -> int:
        return len(self._cones)

    def __contains__(self, cone: PolyCone) -> bool:
        return cone.canonical() in self._cones

    def member(self, cone: PolyCone) -> bool:
        if cone in self:
            return True
        return bool(self.schema and self.schema(cone))


@dataclass
class FanCheck:
    ok: bool
    witnesses: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def check_face_closure(fan: FanSet) -> FanCheck:
    missing = []
    for c in fan:
        for f in c.faces().faces:
            if f not in fan and all(f.canonical() != m.canonical() for m in missing):
                missing.append(f)
    return FanCheck(not missing, missing)


def check_fan(fan: FanSet) -> FanCheck:
    """σ ∩ σ′ is a face of both, for every pair."""
    cones = list(fan)
    for i, a in enumerate(cones):
        for b in cones[i + 1:]:
            meet = a.intersect(b)
            if not meet.is_face_of(a):
                return FanCheck(False, [(a, b, meet)])
            if not meet.is_face_of(b):
                return FanCheck(False, [(b, a, meet)])
    return FanCheck(True)


@dataclass
class WeakFanViolationReport:
    sigma: PolyCone
    sigma_prime: PolyCone
    F_index: int


def weakfan_falsify(fan: FanSet, candidates: Sequence, frame: HodgeFrame) -> WeakFanViolationReport | None:
    """Search for σ ≠ σ′ with meeting relative interiors and a common generating F among the candidates."""
    cones = list(fan)
    cache: dict[tuple[tuple, int], bool] = {}

    def generates(c: PolyCone, k: int) -> bool:
        key = (c.canonical(), k)
        if key not in cache:
            try:
                cache[key] = orbit_test(frame, c, candidates[k]).generates
            except UndecidedRMF as exc:
                raise UndecidedRMF(f"undecided for cone {c!r}: {exc}") from exc
        return cache[key]

    for i, a in enumerate(cones):
        for b in cones[i + 1:]:
            if not a.relative_interiors_meet(b):
                continue
            for k in range(len(candidates)):
                if generates(a, k) and generates(b, k):
                    return WeakFanViolationReport(a, b, k)
    return None


# Γ and Γ(σ) ---------------------------------------------------------------------

@dataclass
class GroupData:
    """Generators of Γ ⊆ G_Z together with a membership predicate.

    Without an explicit predicate an element is taken to be in Γ when it is
    integral and (with a frame) lies in G_Z.
    """

    generators: list[Matrix]
    frame: HodgeFrame | None = None
    contains: Callable[[Matrix], bool] | None = None

    def __post_init__(self):
        for g in self.generators:
            if not (g.is_integral() and g.inverse().is_integral()):
                raise ValueError("Γ generators must be integral with integral inverse")
            if self.frame is not None and not self.frame.in_group(g, integral=True):
                raise ValueError("Γ generator is not in G_Z")

    @property
    def unipotent_flags(self) -> list[bool]:
        return [(g - Matrix.identity(g.nrows)).is_nilpotent() for g in self.generators]

    def member(self, g: Matrix) -> bool:
        if not (g.is_integral() and g.inverse().is_integral()):
            return False
        if self.frame is not None and not self.frame.in_group(g, integral=True):
            return False
        return self.contains(g) if self.contains is not None else True

    def transports(self) -> list[Matrix]:
        return [m for g in self.generators for m in (g, g.inverse())]


def _lcm_1_to(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out = lcm(out, i)
    return out


def minimal_exponent(N: Matrix, group: GroupData, bound: int | None = None) -> Fraction:
    """Smallest c > 0 with exp(cN) ∈ Γ; the set of such c is a cyclic subgroup of Q."""
    entries = [Fraction(x) for x in N.entries() if x]
    if not entries:
        raise NotIntegralizable("zero ray")
    den = 1
    num = 0
    for x in entries:
        den = lcm(den, x.denominator)
    from math import gcd

    for x in entries:
        num = gcd(num, int(x * den))
    # cN ∈ (1/ℓ)Z-matrices forces c ∈ (den/(num·ℓ))Z
    k = N.nilpotency_index() or 1
    step = Fraction(den, num * _lcm_1_to(max(k - 1, 1)))
    limit = bound if bound is not None else _lcm_1_to(max(k - 1, 1)) * den ** max(k, 1) * 8
    for j in range(1, limit + 1):
        c = step * j
        if group.member(N.exp_nilpotent(c)):
            return c
    raise NotIntegralizable("no exponential of the ray lies in Γ within the search bound")


@dataclass
class GammaSigma:
    generators: list[Matrix]
    coefficients: list[Fraction]
    complete: bool | None


def gamma_sigma(sigma: Cone, group: GroupData) -> GammaSigma:
    """Generators exp(c_i N_i) of Γ(σ) = Γ ∩ exp(σ) for a simplicial σ."""
    if not sigma.matrices:
        return GammaSigma([], [], True)
    if not sigma.is_simplicial():
        raise NotSimplicial("Γ(σ) extraction needs a simplicial cone")
    Ns = list(sigma.matrices)
    cs = [minimal_exponent(N, group) for N in Ns]
    gens = [N.exp_nilpotent(c) for N, c in zip(Ns, cs)]
    return GammaSigma(gens, cs, _box_is_empty(sigma.n, Ns, cs, group))


def _box_is_empty(n: int, Ns: list[Matrix], cs: list[Fraction], group: GroupData) -> bool | None:
    """True when no element of Γ ∩ exp(σ) other than 1 has coefficients in ∏[0, c_i).

    Any such element has Σ t_i N_i in (1/ℓ)·M_n(Z), which confines t to a grid
    of step 1/(ℓ·δ), δ a denominator of the inverse of a maximal minor.
    None means the grid was too large to scan.
    """
    A = Matrix.from_rows([N.entries() for N in Ns])
    _, pivots = A.rref()
    sub = A.submatrix(range(len(Ns)), pivots)
    k = max((N.nilpotency_index() or 1) for N in Ns)
    step = Fraction(1, _lcm_1_to(max(k - 1, 1)) * _denominator_of(sub.inverse()))
    ranges = [range(int(c / step) + (0 if (c / step).denominator == 1 else 1)) for c in cs]
    size = 1
    for r in ranges:
        size *= len(r)
    if size > 4096:
        return None
    for js in product(*ranges):
        if not any(js):
            continue
        X = Matrix.zeros(n, n)
        for j, N in zip(js, Ns):
            if j:
                X = X + N.scale(step * j)
        if group.member(X.exp_nilpotent()):
            return False
    return True


def _denominator_of(N: Matrix) -> int:
    d = 1
    for x in N.entries():
        d = lcm(d, Fraction(x).denominator)
    return d


@dataclass
class CompatReport:
    ok: bool
    compatible: bool
    strong: bool
    pairs: list[tuple[int, int, str]] = field(default_factory=list)
    rays: list[tuple[int, str]] = field(default_factory=list)


def check_strong_compat(fan: FanSet, group: GroupData) -> CompatReport:
    """Ad(γ)σ ∈ Σ for generators γ^{±1}, and every ray of every σ has a Γ(σ) element."""
    cones = list(fan)
    pairs = []
    compatible = True
    for gi, g in enumerate(group.transports()):
        for si, s in enumerate(cones):
            moved = s.ad(g)
            if moved in fan:
                status = "in window"
            elif fan.schema is not None and fan.schema(moved):
                status = "in schema"
            else:
                status = "missing"
                compatible = False
            pairs.append((gi, si, status))
    rays = []
    strong = True
    for si, s in enumerate(cones):
        for ray in _ray_matrices(s):
            try:
                minimal_exponent(ray, group)
                rays.append((si, "ok"))
            except NotIntegralizable:
                rays.append((si, "no integral exponential"))
                strong = False
    return CompatReport(compatible and strong, compatible, strong, pairs, rays)


def _ray_matrices(s: PolyCone) -> list[Matrix]:
    if isinstance(s, Cone):
        return [Matrix.from_flat(s.n, s.n, list(r)) for r in s.extreme_rays()]
    if isinstance(s, MarkedCone):
        return [Matrix.from_flat(s.n, s.n, list(r)[s.r:]) for r in s.extreme_rays()]
    raise TypeError("expected a Cone or MarkedCone")
