"""Finite cochain and chain complexes of the point case.

A complex is an exterior algebra split into degree blocks together with a
differential of degree +1 (cohomology) or -1 (homology). Blocks are ordered
by ``monomials(dim, p)`` so vectors and elements convert without a lookup.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from src.exceptions import (
    DegreeError,
    DimensionMismatchError,
    NotAComplexError,
    NotACocycleError,
    NotUnimodularError,
)
from src.services.exterior import ExteriorElement, Multivector, monomials
from src.services.graded_ops import GradedOperator
from src.services.linalg import Matrix, is_zero_matrix, mat_mul, rank, solve
from src.services.twisted import TwistedStructure, interior_operator, modular_section, require_twisted

logger = logging.getLogger(__name__)


@dataclass
class ChainComplex:
    """Differential matrices D_p from block p to block p + direction."""

    dim: int
    cls: type[ExteriorElement]
    direction: int
    differentials: list[Matrix]
    name: str = "complex"

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise DegreeError(f"a differential has degree +1 or -1, got {self.direction}")
        if len(self.differentials) != self.dim + 1:
            raise DimensionMismatchError("one differential block per degree is required")
        for p in range(self.dim + 1):
            q = p + self.direction
            if not 0 <= q <= self.dim:
                continue
            following = self.differentials[q]
            if following and self.differentials[p] and not is_zero_matrix(
                mat_mul(following, self.differentials[p])
            ):
                raise NotAComplexError(
                    f"{self.name}: the differential does not square to zero from degree {p}",
                    degree=p,
                )

    @property
    def blocks(self) -> list[int]:
        return [comb(self.dim, p) for p in range(self.dim + 1)]

    def to_vector(self, v: ExteriorElement, degree: int) -> list[Fraction]:
        if v.dim != self.dim or not isinstance(v, self.cls):
            raise DimensionMismatchError(f"element does not live in {self.name}")
        found = v.degree()
        if found is not None and found != degree:
            raise DegreeError(f"element has degree {found}, block {degree} was requested")
        return [Fraction(v.coefficient(m)) for m in monomials(self.dim, degree)]

    def from_vector(self, values: list[Fraction], degree: int) -> ExteriorElement:
        return self.cls(self.dim, dict(zip(monomials(self.dim, degree), values, strict=True)))

    def rank_out(self, p: int) -> int:
        return rank(self.differentials[p])

    def rank_in(self, p: int) -> int:
        source = p - self.direction
        if not 0 <= source <= self.dim:
            return 0
        return rank(self.differentials[source])


def complex_from_operator(op: GradedOperator, name: str = "complex") -> ChainComplex:
    """Complex of a square-zero operator of degree +1 or -1."""
    matrices: list[Matrix] = []
    for p in range(op.dim + 1):
        target = p + op.degree
        matrices.append(op.block(p) if 0 <= target <= op.dim else [])
    logger.debug("complex %s: blocks %s", name, [len(monomials(op.dim, p)) for p in range(op.dim + 1)])
    return ChainComplex(op.dim, op.cls, op.degree, matrices, name)


def betti_numbers(c: ChainComplex) -> list[int]:
    """dim ker - dim im in every degree."""
    return [c.blocks[p] - c.rank_out(p) - c.rank_in(p) for p in range(c.dim + 1)]


@dataclass(frozen=True)
class CoboundaryResult:
    """Preimage when one exists, else the rank certificate of non-membership."""

    preimage: ExteriorElement | None
    rank: int
    augmented_rank: int

    @property
    def is_coboundary(self) -> bool:
        return self.preimage is not None


def is_coboundary(c: ChainComplex, degree: int, v: ExteriorElement) -> CoboundaryResult:
    if not 0 <= degree <= c.dim:
        raise DegreeError(f"degree {degree} is outside 0..{c.dim}")
    values = c.to_vector(v, degree)
    outgoing = c.differentials[degree]
    if outgoing:
        image = [sum((a * x for a, x in zip(row, values, strict=True)), Fraction(0)) for row in outgoing]
        if any(image):
            raise NotACocycleError(f"element of degree {degree} is not closed in {c.name}")
    source = degree - c.direction
    if not 0 <= source <= c.dim:
        if any(values):
            return CoboundaryResult(None, 0, 1)
        return CoboundaryResult(c.cls(c.dim), 0, 0)
    incoming = c.differentials[source]
    augmented = [row + [x] for row, x in zip(incoming, values, strict=True)]
    r, r_aug = rank(incoming), rank(augmented)
    if r != r_aug:
        return CoboundaryResult(None, r, r_aug)
    solution = solve(incoming, values)
    assert solution is not None
    return CoboundaryResult(c.from_vector(solution, source), r, r_aug)


# Complexes of a twisted structure


def cohomology_complex(s: TwistedStructure) -> ChainComplex:
    """(multivectors, d_{pi,psi})."""
    return complex_from_operator(s.operators.d_pi_psi, f"{s.name}: d_pi_psi")


def homology_complex(s: TwistedStructure) -> ChainComplex:
    """(forms, del_pi + del_underline - i_Y)."""
    return complex_from_operator(s.operators.generator, f"{s.name}: generator")


def is_unimodular(s: TwistedStructure) -> bool:
    """Whether Z is d_{pi,psi}-exact; over a point that means Z = 0."""
    z = modular_section(s)
    return is_coboundary(cohomology_complex(s), 1, z).is_coboundary


@dataclass(frozen=True)
class DualityReport:
    """Homology in degree k against cohomology in degree N - k."""

    left: list[int]
    right: list[int]
    conjugate: bool

    @property
    def isomorphic(self) -> bool:
        return self.left == self.right


def duality_check(s: TwistedStructure) -> DualityReport:
    require_twisted(s)
    if not is_unimodular(s):
        raise NotUnimodularError(f"{s.name} has a nonzero modular class")
    homology = betti_numbers(homology_complex(s))
    cohomology = betti_numbers(cohomology_complex(s))
    ops = s.operators
    z: Multivector = modular_section(s)
    conjugate = ops.bv_lambda == ops.generator + interior_operator(z)
    return DualityReport(left=homology, right=list(reversed(cohomology)), conjugate=conjugate)
