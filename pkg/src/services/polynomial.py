"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from collections.abc import Iterator, Mapping, Sequence
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any

from src.exceptions import DegreeError, DimensionMismatchError

Exponent = tuple[int, ...]


class Poly:
    """Polynomial in ``nvars`` variables, stored as {exponent vector: coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Any] | None = None):
        self.nvars = nvars
        self.terms: dict[Exponent, Fraction] = {}
        for powers, coeff in (terms or {}).items():
            if len(powers) != nvars:
                raise DimensionMismatchError(f"exponent {powers} has the wrong length for {nvars} variables")
            self.add_term(Fraction(coeff), tuple(powers))

    def add_term(self, coeff: Fraction, powers: Exponent) -> None:
        if coeff == 0:
            return
        value = self.terms.get(powers, Fraction(0)) + coeff
        if value == 0:
            self.terms.pop(powers, None)
        else:
            self.terms[powers] = value

    # Constructors

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value: Any) -> Poly:
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars: int, i: int) -> Poly:
        powers = [0] * nvars
        powers[i] = 1
        return cls(nvars, {tuple(powers): 1})

    @classmethod
    def monomial(cls, powers: Sequence[int], coeff: Any = 1) -> Poly:
        return cls(len(powers), {tuple(powers): coeff})

    def _lift(self, other: Any) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatchError(f"polynomials in {self.nvars} and {other.nvars} variables")
            return other
        return Poly.constant(self.nvars, other)

    # Ring operations

    def __add__(self, other: Any) -> Poly:
        other = self._lift(other)
        result = Poly(self.nvars, self.terms)
        for powers, coeff in other.terms.items():
            result.add_term(coeff, powers)
        return result

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.nvars, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other: Any) -> Poly:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> Poly:
        return self._lift(other) - self

    def __mul__(self, other: Any) -> Poly:
        if not isinstance(other, Poly):
            try:
                scalar = Fraction(other)
            except TypeError:
                return NotImplemented
            return Poly(self.nvars, {p: c * scalar for p, c in self.terms.items()})
        other = self._lift(other)
        result = Poly(self.nvars)
        for p1, c1 in self.terms.items():
            for p2, c2 in other.terms.items():
                result.add_term(c1 * c2, tuple(a + b for a, b in zip(p1, p2, strict=True)))
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> Poly:
        result = Poly.constant(self.nvars, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.constant(self.nvars, other).terms
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return bool(self.terms)

    # Calculus

    def derivative(self, i: int) -> Poly:
        """Partial derivative in the i-th variable."""
        result = Poly(self.nvars)
        for powers, coeff in self.terms.items():
            k = powers[i]
            if k:
                lowered = list(powers)
                lowered[i] = k - 1
                result.add_term(coeff * k, tuple(lowered))
        return result

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0."""
        return max((sum(p) for p in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(sum(p) == 0 for p in self.terms)

    def as_constant(self) -> Fraction:
        if not self.is_constant():
            raise DegreeError(f"expected a constant, got {self}")
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def coefficient(self, powers: Exponent) -> Fraction:
        return self.terms.get(tuple(powers), Fraction(0))

    def items(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(sorted(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for powers, coeff in sorted(self.terms.items(), reverse=True):
            factors = [
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(powers) if k
            ]
            parts.append("*".join([str(coeff)] + factors) if factors else str(coeff))
        return " + ".join(parts).replace("+ -", "- ")


def exponents_up_to(nvars: int, degree: int) -> list[Exponent]:
    """All exponent vectors of total degree at most ``degree``, graded then lexicographic."""
    out: list[Exponent] = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            powers = [0] * nvars
            for i in combo:
                powers[i] += 1
            out.append(tuple(powers))
    return out


# Matrices over the polynomial ring


def determinant(matrix: Sequence[Sequence[Any]]) -> Any:
    """Laplace expansion along the first row; any commutative coefficient ring."""
    n = len(matrix)
    if n == 0:
        return 1
    if n == 1:
        return matrix[0][0]
    total: Any = 0
    for j in range(n):
        entry = matrix[0][j]
        if not entry:
            continue
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = entry * determinant(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate(matrix: Sequence[Sequence[Any]]) -> list[list[Any]]:
    """Transpose of the cofactor matrix, so that A adj(A) = det(A) I."""
    n = len(matrix)
    adj: list[list[Any]] = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [matrix[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            cof = determinant(minor)
            adj[j][i] = cof if (i + j) % 2 == 0 else -cof
    return adj
