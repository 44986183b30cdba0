"""Exact scalars, matrices, subspaces and integer-lattice utilities."""

from .lattice import (
    LatticeSubgroup,
    elementary_divisors,
    hermite_rows,
    invariants_rank,
    saturate,
    smith_form,
)
from .lp import feasible_point
from .matrix import Matrix, column, vector
from .scalars import (
    GaussRational,
    I,
    Rational,
    as_fraction,
    conj,
    format_rational,
    normalize_scalar,
    parse_rational,
)
from .subspace import SubQuotient, Subspace, intersect_all, sum_all


def subspace_ops(a: Subspace, b: Subspace, op: str):
    """Dispatch for sum / intersect / contains / equal."""
    if a.ambient_dim != b.ambient_dim:
        from ..errors import DimensionMismatch

        raise DimensionMismatch("subspaces live in different ambient spaces")
    if op == "sum":
        return a + b
    if op == "intersect":
        return a & b
    if op == "contains":
        return a.contains(b)
    if op == "equal":
        return a == b
    raise ValueError(f"unknown subspace operation {op!r}")


def image_preimage(f: Matrix, s: Subspace, direction: str) -> Subspace:
    if direction == "image":
        return s.image(f)
    if direction == "preimage":
        return s.preimage(f)
    raise ValueError(f"unknown direction {direction!r}")


__all__ = [
    "GaussRational", "I", "LatticeSubgroup", "Matrix", "Rational", "SubQuotient", "Subspace",
    "as_fraction", "column", "conj", "elementary_divisors", "feasible_point", "format_rational",
    "hermite_rows", "image_preimage", "intersect_all", "invariants_rank", "normalize_scalar",
    "parse_rational", "saturate", "smith_form", "subspace_ops", "sum_all", "vector",
]
