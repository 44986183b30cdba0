"""Exact rational linear feasibility by the two-phase simplex method (Bland's rule)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def feasible_point(a_eq: Sequence[Sequence], b_eq: Sequence) -> list[Fraction] | None:
    """Find x ≥ 0 with A x = b, or return None when none exists.

    Phase one of the simplex method with one artificial variable per row;
    Bland's rule guarantees termination.
    """
    m = len(a_eq)
    n = len(a_eq[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    rows = []
    for i in range(m):
        r = [Fraction(x) for x in a_eq[i]]
        rhs = Fraction(b_eq[i])
        if rhs < 0:
            r = [-x for x in r]
            rhs = -rhs
        rows.append(r + [Fraction(int(k == i)) for k in range(m)] + [rhs])
    width = n + m
    basis = [n + i for i in range(m)]
    # objective: minimize the sum of artificials, reduced costs kept in row ``obj``
    obj = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(width + 1):
            obj[j] -= r[j]
    for i in range(m):
        obj[n + i] += 1

    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded cannot happen in phase one
            break
        _pivot(rows, obj, best[1], enter)
        basis[best[1]] = enter

    if obj[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][-1]
    return x


def _pivot(rows: list[list[Fraction]], obj: list[Fraction], pr: int, pc: int) -> None:
    p = rows[pr][pc]
    rows[pr] = [x / p for x in rows[pr]]
    prow = rows[pr]
    for i, r in enumerate(rows):
        if i != pr and r[pc]:
            f = r[pc]
            rows[i] = [x - f * y for x, y in zip(r, prow)]
    if obj[pc]:
        f = obj[pc]
        obj[:] = [x - f * y for x, y in zip(obj, prow)]
