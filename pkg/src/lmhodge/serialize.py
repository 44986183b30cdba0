"""Exact JSON encodings: rationals as "p/q", Gaussian rationals as {"re", "im"}, matrices row-major."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any, Sequence

from .cones import Cone, MarkedCone, PolyCone
from .errors import FormatError
from .exactlin import GaussRational, Matrix, Subspace, format_rational, parse_rational
from .filtration import DecFiltration, FilteredNilp, IncFiltration
from .hodge import HodgeFrame


# scalars and matrices ----------------------------------------------------------

def dump_scalar(x) -> Any:
    if isinstance(x, GaussRational):
        if x.im == 0:
            return format_rational(Fraction(x.re))
        return {"re": format_rational(Fraction(x.re)), "im": format_rational(Fraction(x.im))}
    return format_rational(Fraction(x))


def load_scalar(v):
    if isinstance(v, str):
        try:
            return parse_rational(v)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        re, im = load_scalar(v["re"]), load_scalar(v["im"])
        if not isinstance(re, Fraction) or not isinstance(im, Fraction):
            raise FormatError("Gaussian rational parts must be rationals")
        if im == 0:
            raise FormatError("a Gaussian rational with zero imaginary part must be written as a rational")
        return GaussRational(re, im)
    raise FormatError(f"not an exact scalar: {v!r}")


def dump_matrix(m: Matrix) -> list[list]:
    return [[dump_scalar(x) for x in row] for row in m.to_lists()]


def load_matrix(v, ncols: int | None = None) -> Matrix:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise FormatError("a matrix must be an array of rows")
    if not v:
        if ncols is None:
            raise FormatError("an empty matrix needs a known column count")
        return Matrix.zeros(0, ncols)
    widths = {len(r) for r in v}
    if len(widths) != 1 or (ncols is not None and widths != {ncols}):
        raise FormatError("matrix rows have inconsistent lengths")
    return Matrix.from_rows([[load_scalar(x) for x in r] for r in v])


def load_square(v, n: int) -> Matrix:
    m = load_matrix(v, n)
    if m.shape != (n, n):
        raise FormatError(f"expected a {n}×{n} matrix")
    return m


def dump_vector(v: Sequence) -> list:
    return [dump_scalar(x) for x in v]


def load_vector(v) -> list:
    if not isinstance(v, list):
        raise FormatError("a vector must be an array")
    return [load_scalar(x) for x in v]


# filtrations ---------------------------------------------------------------------

def dump_subspace(s: Subspace) -> list[list]:
    return dump_matrix(s.basis)


def load_subspace(v, n: int) -> Subspace:
    m = load_matrix(v, n)
    return Subspace.span(m, n) if m.nrows else Subspace.zero(n)


def dump_inc(W: IncFiltration) -> dict:
    return {"lo": W.lo, "hi": W.hi, "steps": [[w, dump_subspace(W[w])] for w in range(W.lo, W.hi + 1)]}


def dump_dec(F: DecFiltration) -> dict:
    return {"lo": F.lo, "hi": F.hi, "steps": [[p, dump_subspace(F[p])] for p in range(F.lo, F.hi + 1)]}


def _steps(v, n: int) -> dict[int, Subspace]:
    if not isinstance(v, dict) or not {"lo", "hi", "steps"} <= set(v):
        raise FormatError("a filtration needs lo, hi and steps")
    out = {}
    for item in v["steps"]:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)):
            raise FormatError("filtration steps are [index, basis] pairs")
        out[item[0]] = load_subspace(item[1], n)
    if not out:
        raise FormatError("a filtration needs at least one step")
    return out


def load_inc(v, n: int) -> IncFiltration:
    steps = _steps(v, n)
    try:
        W = IncFiltration(n, steps)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if (W.lo, W.hi) != (v["lo"], v["hi"]):
        raise FormatError("declared window does not match the steps")
    return W


def load_dec(v, n: int) -> DecFiltration:
    steps = _steps(v, n)
    try:
        F = DecFiltration(n, steps)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if (F.lo, F.hi) != (v["lo"], v["hi"]):
        raise FormatError("declared window does not match the steps")
    return F


def dump_filtered_nilp(x: FilteredNilp) -> dict:
    return {"rank": x.dim, "W": dump_inc(x.W), "N": dump_matrix(x.N)}


def load_filtered_nilp(v) -> FilteredNilp:
    n = _rank(v)
    try:
        return FilteredNilp(load_inc(_field(v, "W"), n), load_square(_field(v, "N"), n))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# frames and cones ------------------------------------------------------------------

def dump_frame(fr: HodgeFrame) -> dict:
    return {"rank": fr.n, "W": dump_inc(fr.W),
            "pairings": {str(w): dump_matrix(P) for w, P in sorted(fr.pairings.items())},
            "hodge": [[p, q, h] for (p, q), h in sorted(fr.hodge_numbers.items())]}


def load_frame(v) -> HodgeFrame:
    n = _rank(v)
    W = load_inc(_field(v, "W"), n)
    pairings = {}
    for k, m in _field(v, "pairings").items():
        try:
            w = int(k)
        except ValueError:
            raise FormatError(f"pairing key {k!r} is not an integer weight") from None
        pairings[w] = load_matrix(m)
    hodge = {}
    for item in _field(v, "hodge"):
        if not (isinstance(item, list) and len(item) == 3 and all(isinstance(t, int) for t in item)):
            raise FormatError("Hodge numbers are [p, q, h] integer triples")
        hodge[(item[0], item[1])] = item[2]
    try:
        return HodgeFrame(W, pairings, hodge)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_cone(c: PolyCone) -> dict:
    if isinstance(c, MarkedCone):
        return {"ambient_dim": c.n, "r": c.r, "proj": [dump_matrix(p) for p in c.proj],
                "pairs": [[dump_vector(x), dump_matrix(N)] for x, N in c.pairs]}
    if isinstance(c, Cone):
        return {"ambient_dim": c.n, "generators": [dump_matrix(N) for N in c.matrices]}
    raise TypeError("expected a Cone or MarkedCone")


def load_cone(v, W: IncFiltration | None = None) -> PolyCone:
    if not isinstance(v, dict) or "ambient_dim" not in v:
        raise FormatError("a cone needs ambient_dim")
    n = v["ambient_dim"]
    if not isinstance(n, int) or n < 0:
        raise FormatError("ambient_dim must be a non-negative integer")
    try:
        if "pairs" in v:
            r = v.get("r")
            if not isinstance(r, int):
                raise FormatError("a marked cone needs an integer r")
            proj = [load_square(p, n) for p in _field(v, "proj")]
            pairs = []
            for item in v["pairs"]:
                if not (isinstance(item, list) and len(item) == 2):
                    raise FormatError("marked generators are [x, N] pairs")
                pairs.append((load_vector(item[0]), load_square(item[1], n)))
            return MarkedCone(r, proj, pairs, W)
        return Cone(n, [load_square(m, n) for m in _field(v, "generators")])
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _rank(v) -> int:
    n = _field(v, "rank")
    if not isinstance(n, int) or n < 0:
        raise FormatError("rank must be a non-negative integer")
    return n


def _field(v, key: str):
    if not isinstance(v, dict) or key not in v:
        raise FormatError(f"missing field {key!r}")
    return v[key]


# documents ---------------------------------------------------------------------

def canonical_json(doc) -> str:
    """Byte-stable JSON text: sorted keys, fixed separators, ASCII only."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def pretty_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def digest(doc) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


def _reject_floats(x):
    raise FormatError(f"floating-point literal {x!r} is not allowed")


def parse_document(text: str):
    try:
        return json.loads(text, parse_float=_reject_floats)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
