"""Graded linear operators on a full exterior algebra.

An operator is stored by its columns: the image of every basis monomial.
Dense degree blocks are materialized on demand for rank computations.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from src.config import settings
from src.exceptions import DegreeError, DimensionLimitError, DimensionMismatchError
from src.services.exterior import (
    ExteriorElement,
    all_monomials,
    indices_of,
    monomials,
    wedge,
    wedge_sign,
)

logger = logging.getLogger(__name__)

Bracket = Callable[[ExteriorElement, ExteriorElement], ExteriorElement]

ORDER_ABOVE_TWO = 3


def _sign(exponent: int) -> int:
    return -1 if exponent & 1 else 1


def _check_dim(dim: int) -> None:
    if dim > settings.max_dim:
        raise DimensionLimitError(
            f"dimension {dim} exceeds the cap {settings.max_dim} (set TMTOOL_MAX_DIM to raise it)"
        )


class GradedOperator:
    """Degree-homogeneous linear endomorphism of an exterior algebra."""

    __slots__ = ("dim", "degree", "cls", "columns")

    def __init__(
        self,
        dim: int,
        degree: int,
        cls: type[ExteriorElement],
        columns: dict[int, dict[int, Fraction]],
    ):
        _check_dim(dim)
        self.dim = dim
        self.degree = degree
        self.cls = cls
        self.columns = {m: col for m, col in columns.items() if col}

    @classmethod
    def from_map(
        cls,
        dim: int,
        degree: int,
        element_cls: type[ExteriorElement],
        fn: Callable[[ExteriorElement], ExteriorElement],
    ) -> GradedOperator:
        """Tabulate a linear map by its values on basis monomials."""
        _check_dim(dim)
        columns: dict[int, dict[int, Fraction]] = {}
        for m in all_monomials(dim):
            image = fn(element_cls(dim, {m: 1}))
            for out in image.terms:
                if out.bit_count() != m.bit_count() + degree:
                    raise DegreeError(
                        f"map sends degree {m.bit_count()} to degree {out.bit_count()}, "
                        f"not {m.bit_count() + degree}"
                    )
            columns[m] = dict(image.terms)
        return cls(dim, degree, element_cls, columns)

    @classmethod
    def zero(cls, dim: int, degree: int, element_cls: type[ExteriorElement]) -> GradedOperator:
        return cls(dim, degree, element_cls, {})

    @classmethod
    def identity(cls, dim: int, element_cls: type[ExteriorElement]) -> GradedOperator:
        return cls(dim, 0, element_cls, {m: {m: Fraction(1)} for m in all_monomials(dim)})

    @classmethod
    def left_multiplication(
        cls, a: ExteriorElement, degree: int | None = None
    ) -> GradedOperator:
        """l_a: b -> a ^ b. ``degree`` types the operator when ``a`` is zero."""
        found = a.degree()
        if found is None:
            found = degree if degree is not None else 0
        elif degree is not None and degree != found:
            raise DegreeError(f"left multiplication by degree {found}, expected {degree}")
        element_cls = type(a)
        return cls.from_map(a.dim, found, element_cls, lambda b: wedge(a, b))

    # Application

    def __call__(self, x: ExteriorElement) -> ExteriorElement:
        if x.dim != self.dim:
            raise DimensionMismatchError(f"operator on dimension {self.dim} applied to dimension {x.dim}")
        acc: dict[int, Fraction] = {}
        for m, c in x.terms.items():
            for out, v in self.columns.get(m, {}).items():
                acc[out] = acc.get(out, Fraction(0)) + c * v
        return self.cls(self.dim, acc)

    def column(self, mask: int) -> ExteriorElement:
        return self.cls(self.dim, self.columns.get(mask, {}))

    def unit_image(self) -> ExteriorElement:
        """u(1)."""
        return self.column(0)

    def block(self, p: int) -> list[list[Fraction]]:
        """Dense matrix from the degree-p monomials to the degree-(p + degree) ones."""
        rows = monomials(self.dim, p + self.degree)
        cols = monomials(self.dim, p)
        position = {m: i for i, m in enumerate(rows)}
        matrix = [[Fraction(0)] * len(cols) for _ in rows]
        for j, m in enumerate(cols):
            for out, v in self.columns.get(m, {}).items():
                matrix[position[out]][j] = v
        return matrix

    # Algebra

    def _check_compatible(self, other: GradedOperator) -> None:
        if other.dim != self.dim or other.cls is not self.cls:
            raise DimensionMismatchError("operators act on different algebras")

    def __add__(self, other: GradedOperator) -> GradedOperator:
        self._check_compatible(other)
        if other.degree != self.degree and self.columns and other.columns:
            raise DegreeError(f"cannot add operators of degree {self.degree} and {other.degree}")
        degree = self.degree if self.columns else other.degree
        columns = {m: dict(col) for m, col in self.columns.items()}
        for m, col in other.columns.items():
            target = columns.setdefault(m, {})
            for out, v in col.items():
                target[out] = target.get(out, Fraction(0)) + v
                if not target[out]:
                    del target[out]
        return GradedOperator(self.dim, degree, self.cls, columns)

    def __neg__(self) -> GradedOperator:
        return self.scaled(-1)

    def __sub__(self, other: GradedOperator) -> GradedOperator:
        return self + (-other)

    def scaled(self, c: Any) -> GradedOperator:
        c = Fraction(c)
        if not c:
            return GradedOperator.zero(self.dim, self.degree, self.cls)
        return GradedOperator(
            self.dim,
            self.degree,
            self.cls,
            {m: {out: c * v for out, v in col.items()} for m, col in self.columns.items()},
        )

    def __rmul__(self, c: Any) -> GradedOperator:
        return self.scaled(c)

    def __matmul__(self, other: GradedOperator) -> GradedOperator:
        """Composition self o other."""
        self._check_compatible(other)
        columns = {m: dict(self(other.column(m)).terms) for m in other.columns}
        return GradedOperator(self.dim, self.degree + other.degree, self.cls, columns)

    def is_zero(self) -> bool:
        return not self.columns

    def mismatch(self, other: GradedOperator) -> int | None:
        """First basis monomial on which two operators differ."""
        for m in all_monomials(self.dim):
            if self.column(m) != other.column(m):
                return m
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedOperator):
            return NotImplemented
        if other.dim != self.dim or other.cls is not self.cls:
            return False
        return self.mismatch(other) is None and (
            self.degree == other.degree or self.is_zero()
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"GradedOperator(dim={self.dim}, degree={self.degree}, "
            f"on={self.cls.__name__}, nonzero_columns={len(self.columns)})"
        )


def graded_commutator(u: GradedOperator, v: GradedOperator) -> GradedOperator:
    """[u, v] = u o v - (-1)^{|u||v|} v o u."""
    return (u @ v) - (v @ u).scaled(_sign(u.degree * v.degree))


# Order filtration


def phi1(u: GradedOperator) -> GradedOperator:
    """Phi^1_u(a) = u(a) - u(1) a."""
    return u - GradedOperator.left_multiplication(u.unit_image(), u.degree)


def _next_phi(p: GradedOperator, a: ExteriorElement) -> GradedOperator:
    # P(a .) - P(a) . - (-1)^{|P||a|} a P(.)
    deg_a = a.degree()
    if deg_a is None:
        return GradedOperator.zero(p.dim, p.degree, p.cls)
    left = GradedOperator.left_multiplication(a)
    return (
        (p @ left)
        - GradedOperator.left_multiplication(p(a), p.degree + deg_a)
        - (left @ p).scaled(_sign(p.degree * deg_a))
    )


def phi2(u: GradedOperator, a: ExteriorElement) -> GradedOperator:
    """Phi^2_u(a)(b) = Phi^1(ab) - Phi^1(a) b - (-1)^{|a||u|} a Phi^1(b)."""
    return _next_phi(phi1(u), a)


def phi3(u: GradedOperator, a: ExteriorElement, b: ExteriorElement) -> GradedOperator:
    """Phi^3_u(a, b)(c) = Phi^2(a)(bc) - Phi^2(a)(b) c - (-1)^{(|a|+|u|)|b|} b Phi^2(a)(c)."""
    return _next_phi(phi2(u, a), b)


@dataclass(frozen=True)
class PhiTables:
    """Phi^1 on monomials and Phi^2 on monomial pairs, shared by the order checks."""

    first: dict[int, ExteriorElement]
    second: dict[tuple[int, int], ExteriorElement]


def _monomial_times(mask: int, x: ExteriorElement, left: bool) -> ExteriorElement:
    acc: dict[int, Fraction] = {}
    for m, c in x.terms.items():
        s = wedge_sign(mask, m) if left else wedge_sign(m, mask)
        if s:
            acc[mask | m] = s * c
    return type(x)(x.dim, acc)


def _on_product(table: dict[int, ExteriorElement], a: int, b: int, cls: type[ExteriorElement], dim: int) -> ExteriorElement:
    s = wedge_sign(a, b)
    if not s:
        return cls(dim)
    return s * table[a | b]


def phi_tables(u: GradedOperator, with_second: bool = True) -> PhiTables:
    dim, cls = u.dim, u.cls
    unit = u.unit_image()
    masks = all_monomials(dim)
    first = {m: u.column(m) - wedge(unit, cls(dim, {m: 1})) for m in masks}
    second: dict[tuple[int, int], ExteriorElement] = {}
    if with_second:
        for a in masks:
            sa = _sign(a.bit_count() * u.degree)
            for b in masks:
                value = (
                    _on_product(first, a, b, cls, dim)
                    - _monomial_times(b, first[a], left=False)
                    - sa * _monomial_times(a, first[b], left=True)
                )
                second[(a, b)] = value
    return PhiTables(first, second)


def operator_order(u: GradedOperator) -> int:
    """Smallest k in {0, 1, 2} with Phi^{k+1}_u = 0; 3 stands for "above 2"."""
    tables = phi_tables(u)
    if not any(tables.first.values()):
        return 0
    if not any(tables.second.values()):
        return 1
    dim, cls = u.dim, u.cls
    masks = all_monomials(dim)
    for a in masks:
        row = {c: tables.second[(a, c)] for c in masks}
        for b in masks:
            s = _sign((a.bit_count() + u.degree) * b.bit_count())
            for c in masks:
                total = a.bit_count() + b.bit_count() + c.bit_count() + u.degree
                if total < 0 or total > dim:
                    continue
                value = (
                    _on_product(row, b, c, cls, dim)
                    - _monomial_times(c, tables.second[(a, b)], left=False)
                    - s * _monomial_times(b, row[c], left=True)
                )
                if value:
                    logger.debug(
                        "Phi^3 nonzero at %s, %s, %s", indices_of(a), indices_of(b), indices_of(c)
                    )
                    return ORDER_ABOVE_TWO
    return 2


def is_derivation(u: GradedOperator) -> bool:
    """Order at most 1 and u(1) = 0."""
    if u.unit_image():
        return False
    tables = phi_tables(u)
    return not any(tables.second.values())


def skew_symmetry_holds(u: GradedOperator) -> bool:
    """(-1)^{|b|} Phi^2(b)(a) = -(-1)^{(|a|+1)(|b|+1)} (-1)^{|a|} Phi^2(a)(b) on monomials."""
    tables = phi_tables(u)
    for (a, b), value in tables.second.items():
        da, db = a.bit_count(), b.bit_count()
        lhs = _sign(db) * tables.second[(b, a)]
        rhs = (-_sign((da + 1) * (db + 1) + da)) * value
        if lhs != rhs:
            return False
    return True


def bracket_mismatch(
    u: GradedOperator, bracket: Bracket
) -> tuple[int, int, ExteriorElement, ExteriorElement] | None:
    """First monomial pair violating [a,b] = (-1)^{|a|}(u(ab) - u(a)b - (-1)^{|a|} a u(b))."""
    if u.degree != -1 and not u.is_zero():
        raise DegreeError(f"a generator has degree -1, got {u.degree}")
    dim, cls = u.dim, u.cls
    masks = all_monomials(dim)
    for a in masks:
        ea = cls(dim, {a: 1})
        da = a.bit_count()
        ua = u.column(a)
        for b in masks:
            if da + b.bit_count() > dim + 1:
                continue
            eb = cls(dim, {b: 1})
            expected = _sign(da) * (
                u(wedge(ea, eb)) - wedge(ua, eb) - _sign(da) * wedge(ea, u.column(b))
            )
            found = bracket(ea, eb)
            if found != expected:
                return a, b, found, expected
    return None


def generates_bracket(u: GradedOperator, bracket: Bracket) -> bool:
    """Whether u is a generator of ``bracket`` on every pair of basis monomials."""
    return bracket_mismatch(u, bracket) is None
