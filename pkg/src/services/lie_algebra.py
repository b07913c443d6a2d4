"""Finite-dimensional Lie algebras as Lie algebroids over a point.

The anchor of a Lie algebra seen as an algebroid over a point is zero, so
every anchor term of the algebroid formulas drops out here: the
Chevalley-Eilenberg differential keeps only its bracket sum, the Gerstenhaber
bracket of a multivector with a scalar vanishes, and scalars are closed.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from fractions import Fraction
from functools import cached_property

from src.exceptions import DegreeError, MalformedStructureError, UnknownBasisError
from src.services.exterior import (
    ExteriorElement,
    Form,
    Multivector,
    indices_of,
    interior_by_multivector,
    mask_of,
    wedge,
)

logger = logging.getLogger(__name__)

Constants = Mapping[tuple[int, int], Mapping[int, Fraction]]


class LieAlgebra:
    """Structure constants c^k_{ij} for i < j, plus an optional invariant bilinear form."""

    def __init__(
        self,
        basis: Sequence[str],
        constants: Constants,
        bilinear_form: Sequence[Sequence[Fraction]] | None = None,
        *,
        validate: bool = True,
    ):
        self.basis = list(basis)
        self.dim = len(self.basis)
        if len(set(self.basis)) != self.dim:
            raise MalformedStructureError("basis names must be distinct")
        self.constants: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), value in constants.items():
            if not 0 <= i < j < self.dim:
                raise MalformedStructureError(
                    f"structure constants are given for i < j only, got ({i}, {j})"
                )
            clean = {k: Fraction(c) for k, c in value.items() if c}
            if any(not 0 <= k < self.dim for k in clean):
                raise MalformedStructureError(f"bracket ({i}, {j}) leaves the basis")
            if clean:
                self.constants[(i, j)] = clean
        self.bilinear_form = (
            [[Fraction(x) for x in row] for row in bilinear_form] if bilinear_form is not None else None
        )
        if self.bilinear_form is not None and (
            len(self.bilinear_form) != self.dim or any(len(r) != self.dim for r in self.bilinear_form)
        ):
            raise MalformedStructureError("bilinear form must be a square matrix over the basis")
        if validate:
            violation = self.jacobi_violation()
            if violation is not None:
                names = [self.basis[i] for i in violation]
                raise MalformedStructureError(f"Jacobi identity fails on {names}")
            if self.bilinear_form is not None and not self.form_is_invariant():
                raise MalformedStructureError("bilinear form is not symmetric and ad-invariant")

    @classmethod
    def abelian(cls, basis: Sequence[str]) -> LieAlgebra:
        return cls(basis, {})

    def index(self, name: str) -> int:
        try:
            return self.basis.index(name)
        except ValueError:
            raise UnknownBasisError(f"unknown basis element '{name}'", name=name) from None

    # Brackets

    def bracket_basis(self, i: int, j: int) -> Multivector:
        """[e_i, e_j]."""
        if i == j:
            return Multivector(self.dim)
        if i < j:
            return Multivector(self.dim, {1 << k: c for k, c in self.constants.get((i, j), {}).items()})
        return -self.bracket_basis(j, i)

    def bracket(self, x: ExteriorElement, y: ExteriorElement) -> Multivector:
        """Lie bracket of two vectors."""
        for v in (x, y):
            if v.degree() not in (None, 1):
                raise DegreeError("the Lie bracket takes vectors")
        result = Multivector(self.dim)
        for mx, cx in x.terms.items():
            for my, cy in y.terms.items():
                i, j = indices_of(mx)[0], indices_of(my)[0]
                result = result + (cx * cy) * self.bracket_basis(i, j)
        return result

    def ad(self, x: ExteriorElement) -> list[list[Fraction]]:
        """Matrix of ad_x: entry [k][j] is the e_k coefficient of [x, e_j]."""
        matrix = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            image = self.bracket(x, Multivector.basis(self.dim, [j]))
            for m, c in image.terms.items():
                matrix[indices_of(m)[0]][j] = c
        return matrix

    def coadjoint(self, x: ExteriorElement) -> list[list[Fraction]]:
        """Matrix of ad*_x on the dual basis, minus the transpose of ad_x."""
        ad = self.ad(x)
        return [[-ad[j][k] for j in range(self.dim)] for k in range(self.dim)]

    def jacobi_violation(self) -> tuple[int, int, int] | None:
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    e = [Multivector.basis(n, [t]) for t in (i, j, k)]
                    total = (
                        self.bracket(self.bracket(e[0], e[1]), e[2])
                        + self.bracket(self.bracket(e[1], e[2]), e[0])
                        + self.bracket(self.bracket(e[2], e[0]), e[1])
                    )
                    if total:
                        return i, j, k
        return None

    # Invariant form

    def form_value(self, x: ExteriorElement, y: ExteriorElement) -> Fraction:
        if self.bilinear_form is None:
            raise MalformedStructureError("algebra carries no bilinear form")
        total = Fraction(0)
        for mx, cx in x.terms.items():
            for my, cy in y.terms.items():
                total += cx * cy * self.bilinear_form[indices_of(mx)[0]][indices_of(my)[0]]
        return total

    def form_is_invariant(self) -> bool:
        """Symmetric and <[x,y],z> + <y,[x,z]> = 0 on basis triples."""
        g = self.bilinear_form
        if g is None:
            return False
        n = self.dim
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            return False
        e = [Multivector.basis(n, [t]) for t in range(n)]
        for x in e:
            for y in e:
                for z in e:
                    if self.form_value(self.bracket(x, y), z) + self.form_value(y, self.bracket(x, z)):
                        return False
        return True

    def flat(self, x: ExteriorElement) -> Form:
        """The 1-form <x, .> of the bilinear form."""
        return Form(
            self.dim,
            {1 << j: self.form_value(x, Multivector.basis(self.dim, [j])) for j in range(self.dim)},
        )

    # Cached differential on 1-forms

    @cached_property
    def _d_of_generators(self) -> list[Form]:
        # d e^m = -sum_{i<j} c^m_{ij} e^i ^ e^j
        images: list[dict[int, Fraction]] = [{} for _ in range(self.dim)]
        for (i, j), value in self.constants.items():
            for k, c in value.items():
                images[k][mask_of([i, j])] = -c
        return [Form(self.dim, img) for img in images]

    def __repr__(self) -> str:
        return f"LieAlgebra(basis={self.basis}, brackets={len(self.constants)})"


def check_jacobi(algebra: LieAlgebra) -> bool:
    """Whether the cyclic sum of [[e_i,e_j],e_k] vanishes on all basis triples."""
    return algebra.jacobi_violation() is None


def ce_differential(algebra: LieAlgebra, omega: ExteriorElement) -> Form:
    """Chevalley-Eilenberg differential: (d a)(x_0..x_q) = sum (-1)^{k+l} a([x_k,x_l], ...)."""
    n = algebra.dim
    omega.degree()
    result = Form(n)
    d1 = algebra._d_of_generators
    for m, c in omega.terms.items():
        idx = indices_of(m)
        for t, k in enumerate(idx):
            if not d1[k]:
                continue
            prefix = Form.basis(n, idx[:t])
            suffix = Form.basis(n, idx[t + 1 :])
            term = wedge(wedge(prefix, d1[k]), suffix)
            result = result + (c if t % 2 == 0 else -c) * term
    return result


def schouten(algebra: LieAlgebra, a: ExteriorElement, b: ExteriorElement) -> Multivector:
    """Gerstenhaber bracket of multivectors.

    [a_1^..^a_q, b_1^..^b_r] = sum_{k,l} (-1)^{k+l} [a_k, b_l] ^ a_1..(a_k)..a_q ^ b_1..(b_l)..b_r,
    and brackets with scalars vanish.
    """
    n = algebra.dim
    a.degree()
    b.degree()
    result = Multivector(n)
    for ma, ca in a.terms.items():
        ia = indices_of(ma)
        for mb, cb in b.terms.items():
            ib = indices_of(mb)
            for k, x in enumerate(ia):
                rest_a = Multivector.basis(n, ia[:k] + ia[k + 1 :])
                for l, y in enumerate(ib):
                    inner = algebra.bracket_basis(x, y)
                    if not inner:
                        continue
                    rest_b = Multivector.basis(n, ib[:l] + ib[l + 1 :])
                    sign = 1 if (k + l) % 2 == 0 else -1
                    result = result + (sign * ca * cb) * wedge(wedge(inner, rest_a), rest_b)
    return result


def lie_derivative(algebra: LieAlgebra, x: ExteriorElement, omega: ExteriorElement) -> Form:
    """L_X = i_X d + d i_X."""
    if x.degree() not in (None, 1):
        raise DegreeError("the Lie derivative is taken along a vector")
    return interior_by_multivector(x, ce_differential(algebra, omega)) + ce_differential(
        algebra, interior_by_multivector(x, omega)
    )


def trace(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    return sum((matrix[i][i] for i in range(len(matrix))), Fraction(0))


def infinitesimal_character(algebra: LieAlgebra) -> Form:
    """The 1-form x -> Tr(ad_x)."""
    n = algebra.dim
    return Form(
        n, {1 << k: trace(algebra.ad(Multivector.basis(n, [k]))) for k in range(n)}
    )
