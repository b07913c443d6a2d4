"""Twisted Poisson structures on a Lie algebra with a volume form.

A structure is a bivector pi, a closed 3-form psi with
1/2 [pi, pi] = (wedge^3 pi#) psi, and a top-degree volume form lambda.
This module builds the operators it induces on forms and multivectors,
its modular section and the identities relating them.

Conventions: the derived operators are

* ``del_pi = [d, i_pi]`` and ``delta = i_{psi1}`` on forms,
* ``del_underline = i_{psi2}`` on forms,
* ``d_underline = -i_{psi2}`` on multivectors, so that
  ``d_{pi,psi} = [pi, .] + d_underline`` is the differential of the dual
  bracket ``[a, b]_{pi,psi} = [a, b]_pi + psi2(a, b)``.

With these choices the modular section is ``Z = X - Y`` and the canonical
square-zero generator is ``del_pi + del_underline - i_Y``.

The generic helpers (``build_psi1``, ``build_psi2``, ``psi2_evaluate``,
``y_from``) only use ring operations and are shared with the polynomial
case in ``poly_geometry``.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

from src.exceptions import (
    DegreeError,
    DimensionMismatchError,
    MalformedStructureError,
    TwistedConditionError,
)
from src.services.exterior import (
    ExteriorElement,
    Form,
    MixedTensor,
    Multivector,
    evaluate,
    full_mask,
    indices_of,
    interior_by_mixed,
    interior_by_mixed_on_multivectors,
    interior_by_multivector,
    is_volume,
    mask_of,
    monomials,
    pairing,
    push_forward,
    sharp,
    star,
    star_inverse,
    wedge,
)
from src.services.graded_ops import (
    GradedOperator,
    bracket_mismatch,
    graded_commutator,
)
from src.services.lie_algebra import (
    LieAlgebra,
    ce_differential,
    infinitesimal_character,
    lie_derivative,
    schouten,
)
from src.services.linalg import inverse

logger = logging.getLogger(__name__)


# Generic constructions


def build_psi1(pi: ExteriorElement, psi: ExteriorElement) -> MixedTensor:
    """psi1 = sum_k (i_{pi# e^k} psi) (x) e_k, so that psi1(xi)(X, Y) = psi(pi# xi, X, Y)."""
    dim = pi.dim
    pairs = [
        (interior_by_multivector(sharp(pi, psi.basis(dim, [k])), psi), pi.basis(dim, [k]))
        for k in range(dim)
    ]
    return MixedTensor.from_pairs(dim, (2, 1), pairs)


def build_psi2(pi: ExteriorElement, psi: ExteriorElement) -> MixedTensor:
    """psi2 = sum_{k<l} psi(pi# e^k, pi# e^l, .) (x) e_k ^ e_l."""
    dim = pi.dim
    images = [sharp(pi, psi.basis(dim, [k])) for k in range(dim)]
    pairs = []
    for k in range(dim):
        for l in range(k + 1, dim):
            mu = interior_by_multivector(images[l], interior_by_multivector(images[k], psi))
            pairs.append((mu, pi.basis(dim, [k, l])))
    return MixedTensor.from_pairs(dim, (1, 2), pairs)


def psi2_evaluate(psi2: MixedTensor, alpha: ExteriorElement, beta: ExteriorElement) -> ExteriorElement:
    """psi2(alpha, beta) = sum_{k<l} mu_kl <alpha ^ beta, e_k ^ e_l>."""
    ab = wedge(alpha, beta)
    acc: dict[int, Any] = {}
    for (fm, vm), c in psi2.terms.items():
        if vm in ab.terms:
            value = c * ab.terms[vm]
            acc[fm] = acc[fm] + value if fm in acc else value
    return alpha._new(acc)


def y_from(pi: ExteriorElement, psi: ExteriorElement) -> ExteriorElement:
    """Y = pi#(i_pi psi)."""
    return sharp(pi, interior_by_multivector(pi, psi))


def trace_psi2(psi2: MixedTensor, alpha: ExteriorElement) -> Any:
    """Tr Psi_alpha = sum_m <psi2(alpha, e^m), e_m>."""
    dim = alpha.dim
    total = alpha._zero_coefficient()
    for m in range(dim):
        value = psi2_evaluate(psi2, alpha, alpha.basis(dim, [m]))
        total = total + value.coefficient(1 << m)
    return total


# Structures


@dataclass(frozen=True)
class TwistedReport:
    """Outcome of the twisted-condition check."""

    closed: bool
    condition: bool
    defect: ExteriorElement

    @property
    def holds(self) -> bool:
        return self.closed and self.condition


@dataclass(frozen=True)
class DerivedOperators:
    """Operators induced by (pi, psi, lambda), tabulated on basis monomials."""

    psi1: MixedTensor
    psi2: MixedTensor
    d_form: GradedOperator
    i_pi: GradedOperator
    del_pi: GradedOperator
    delta: GradedOperator
    del_underline: GradedOperator
    i_y: GradedOperator
    generator: GradedOperator
    d_pi: GradedOperator
    d_underline: GradedOperator
    d_pi_psi: GradedOperator
    d_quasi: GradedOperator
    bv_lambda: GradedOperator


class TwistedStructure:
    """A Lie algebra with a bivector, a 3-form and a volume form."""

    def __init__(
        self,
        algebra: LieAlgebra,
        pi: Multivector,
        psi: Form,
        volume: Form,
        name: str = "structure",
    ):
        n = algebra.dim
        for label, element, kind, degree in (
            ("pi", pi, "multivector", 2),
            ("psi", psi, "form", 3),
            ("lambda", volume, "form", n),
        ):
            if element.dim != n:
                raise DimensionMismatchError(f"{label} has dimension {element.dim}, algebra has {n}")
            if element.kind != kind:
                raise MalformedStructureError(f"{label} must be a {kind}")
            found = element.degree()
            if found is not None and found != degree:
                raise DegreeError(f"{label} must have degree {degree}, got {found}")
        if not is_volume(volume):
            raise DegreeError("lambda must be a nonzero form of top degree")
        self.algebra = algebra
        self.pi = pi
        self.psi = psi
        self.volume = volume
        self.name = name

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def rescaled(self, c: Fraction | int) -> TwistedStructure:
        """Same (pi, psi) with lambda multiplied by a nonzero constant."""
        if not c:
            raise DegreeError("volume rescaling needs a nonzero constant")
        return TwistedStructure(self.algebra, self.pi, self.psi, Fraction(c) * self.volume, self.name)

    def with_psi(self, psi: Form) -> TwistedStructure:
        return TwistedStructure(self.algebra, self.pi, psi, self.volume, self.name)

    def covector(self, k: int) -> Form:
        return Form.basis(self.dim, [k])

    def vector(self, k: int) -> Multivector:
        return Multivector.basis(self.dim, [k])

    def d(self, omega: ExteriorElement) -> Form:
        return ce_differential(self.algebra, omega)

    @cached_property
    def report(self) -> TwistedReport:
        return verify_twisted(self)

    @cached_property
    def y(self) -> Multivector:
        return y_from(self.pi, self.psi)

    @cached_property
    def x(self) -> Multivector:
        return x_section(self)

    @cached_property
    def operators(self) -> DerivedOperators:
        n = self.dim
        logger.debug("building derived operators for %s (dimension %d)", self.name, n)
        psi1 = build_psi1(self.pi, self.psi)
        psi2 = build_psi2(self.pi, self.psi)
        d_form = GradedOperator.from_map(n, 1, Form, self.d)
        i_pi = GradedOperator.from_map(n, -2, Form, lambda w: interior_by_multivector(self.pi, w))
        del_pi = graded_commutator(d_form, i_pi)
        delta = GradedOperator.from_map(n, 1, Form, lambda w: interior_by_mixed(psi1, w))
        del_underline = GradedOperator.from_map(n, -1, Form, lambda w: interior_by_mixed(psi2, w))
        i_y = GradedOperator.from_map(n, -1, Form, lambda w: interior_by_multivector(self.y, w))
        d_pi = GradedOperator.from_map(
            n, 1, Multivector, lambda v: schouten(self.algebra, self.pi, v)
        )
        d_underline = GradedOperator.from_map(
            n, 1, Multivector, lambda v: -interior_by_mixed_on_multivectors(psi2, v)
        )
        d_pi_psi = d_pi + d_underline
        bv_lambda = GradedOperator.from_map(
            n,
            -1,
            Form,
            lambda w: -star(self.volume, d_pi_psi(star_inverse(self.volume, w))),
        )
        return DerivedOperators(
            psi1=psi1,
            psi2=psi2,
            d_form=d_form,
            i_pi=i_pi,
            del_pi=del_pi,
            delta=delta,
            del_underline=del_underline,
            i_y=i_y,
            generator=del_pi + del_underline - i_y,
            d_pi=d_pi,
            d_underline=d_underline,
            d_pi_psi=d_pi_psi,
            d_quasi=d_form + delta,
            bv_lambda=bv_lambda,
        )

    def __repr__(self) -> str:
        return f"TwistedStructure({self.name}, dim={self.dim})"


def interior_operator(v: Multivector) -> GradedOperator:
    """i_V as an operator on forms."""
    degree = v.degree() or 0
    return GradedOperator.from_map(v.dim, -degree, Form, lambda w: interior_by_multivector(v, w))


# Twisted condition


def twist_defect(half_bracket: ExteriorElement, pi: ExteriorElement, psi: ExteriorElement) -> ExteriorElement:
    """1/2[pi, pi] - (wedge^3 pi#) psi."""
    return half_bracket - push_forward(pi, psi)


def verify_twisted(s: TwistedStructure) -> TwistedReport:
    """closed: d psi = 0; condition: 1/2[pi, pi] = (wedge^3 pi#) psi."""
    half = Fraction(1, 2) * schouten(s.algebra, s.pi, s.pi)
    defect = twist_defect(half, s.pi, s.psi)
    return TwistedReport(closed=not s.d(s.psi), condition=not defect, defect=defect)


def require_twisted(s: TwistedStructure) -> None:
    report = s.report
    if not report.holds:
        raise TwistedConditionError(
            f"{s.name} is not a twisted Poisson structure",
            closed=report.closed,
            defect=report.defect,
        )


# Sections


def psi1(s: TwistedStructure) -> MixedTensor:
    return s.operators.psi1


def psi2(s: TwistedStructure) -> MixedTensor:
    return s.operators.psi2


def y_section(s: TwistedStructure) -> Multivector:
    """Y = pi#(i_pi psi)."""
    return s.y


def y_trace_relation(s: TwistedStructure) -> bool:
    """<a, Y> = -1/2 Tr Psi_a and <a, Y> = -i_{pi# a ^ pi} psi for every basis covector a."""
    psi2_ = s.operators.psi2
    for k in range(s.dim):
        alpha = s.covector(k)
        value = pairing(alpha, s.y)
        if value != Fraction(-1, 2) * trace_psi2(psi2_, alpha):
            return False
        contracted = interior_by_multivector(wedge(sharp(s.pi, alpha), s.pi), s.psi)
        if value != -contracted.scalar_part():
            return False
    return True


def _volume_ratio(s: TwistedStructure, top: ExteriorElement) -> Fraction:
    full = full_mask(s.dim)
    return top.coefficient(full) / s.volume.coefficient(full)


def x_section(s: TwistedStructure) -> Multivector:
    """X with <a, X> lambda = L_{pi# a} lambda - (i_pi d a) lambda."""
    coefficients = {}
    for k in range(s.dim):
        alpha = s.covector(k)
        lie = lie_derivative(s.algebra, sharp(s.pi, alpha), s.volume)
        contraction = interior_by_multivector(s.pi, s.d(alpha)).scalar_part()
        coefficients[1 << k] = _volume_ratio(s, lie) - contraction
    return Multivector(s.dim, coefficients)


def x_by_volume(s: TwistedStructure) -> Multivector:
    """X from *X = -d i_pi lambda."""
    return star_inverse(s.volume, -s.d(interior_by_multivector(s.pi, s.volume)))


def raw_modular_section(s: TwistedStructure) -> Multivector:
    """X - Y without the twisted precondition."""
    return s.x - s.y


def modular_section(s: TwistedStructure) -> Multivector:
    """Z = X - Y; defined for twisted structures only."""
    require_twisted(s)
    return raw_modular_section(s)


# Brackets


def twisted_bracket_forms(s: TwistedStructure, alpha: Form, beta: Form) -> Form:
    """[a, b]_{pi,psi} = i_{pi# a} d b - i_{pi# b} d a + psi2(a, b) on 1-forms."""
    for label, form in (("alpha", alpha), ("beta", beta)):
        if form.degree() not in (None, 1):
            raise DegreeError(f"{label} must be a 1-form")
    koszul = interior_by_multivector(sharp(s.pi, alpha), s.d(beta)) - interior_by_multivector(
        sharp(s.pi, beta), s.d(alpha)
    )
    return koszul + psi2_evaluate(s.operators.psi2, alpha, beta)


def dual_algebra(s: TwistedStructure) -> LieAlgebra:
    """Lie algebra on the dual space with the bracket [ , ]_{pi,psi}; Jacobi is not enforced."""
    n = s.dim
    constants: dict[tuple[int, int], dict[int, Fraction]] = {}
    for i in range(n):
        for j in range(i + 1, n):
            value = twisted_bracket_forms(s, s.covector(i), s.covector(j))
            if value:
                constants[(i, j)] = {indices_of(m)[0]: c for m, c in value.terms.items()}
    names = [f"{b}*" for b in s.algebra.basis]
    return LieAlgebra(names, constants, validate=False)


def extended_bracket(s: TwistedStructure) -> Callable[[ExteriorElement, ExteriorElement], Form]:
    """Gerstenhaber extension of [ , ]_{pi,psi} to all forms."""
    dual = dual_algebra(s)
    n = s.dim

    def bracket(a: ExteriorElement, b: ExteriorElement) -> Form:
        value = schouten(dual, Multivector(n, a.terms), Multivector(n, b.terms))
        return Form(n, value.terms)

    return bracket


def sharp_is_morphism(s: TwistedStructure) -> bool:
    """pi#[a, b]_{pi,psi} = [pi# a, pi# b] on basis covectors."""
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            a, b = s.covector(i), s.covector(j)
            lhs = sharp(s.pi, twisted_bracket_forms(s, a, b))
            rhs = s.algebra.bracket(sharp(s.pi, a), sharp(s.pi, b))
            if lhs != rhs:
                return False
    return True


# Differentials


def d_pi_psi(s: TwistedStructure, v: Multivector) -> Multivector:
    """d_{pi,psi} V = [pi, V] + d_underline V."""
    return s.operators.d_pi_psi(v)  # type: ignore[return-value]


def chain_map_mismatch(s: TwistedStructure) -> tuple[int, ExteriorElement, ExteriorElement] | None:
    """First basis form a with d_{pi,psi}(wedge pi#) a != -(wedge pi#) d a."""
    ops = s.operators
    for q in range(1, s.dim):
        for m in monomials(s.dim, q):
            alpha = Form(s.dim, {m: 1})
            lhs = ops.d_pi_psi(push_forward(s.pi, alpha))
            rhs = -push_forward(s.pi, s.d(alpha))
            if lhs != rhs:
                return m, lhs, rhs
    return None


def coboundary_relation(s: TwistedStructure) -> bool:
    """Both closed forms of <a ^ b, d_{pi,psi} Y> on basis pairs.

    <a^b, dY> = -i_pi d(i_{pi#a ^ pi#b} psi) - 1/2 <d(a^b), [pi,pi]>
              = -(d i_pi psi)(pi#a, pi#b).
    """
    dy = d_pi_psi(s, s.y)
    bracket = schouten(s.algebra, s.pi, s.pi)
    theta = s.d(interior_by_multivector(s.pi, s.psi))
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            a, b = s.covector(i), s.covector(j)
            ab = wedge(a, b)
            lhs = pairing(ab, dy)
            pa, pb = sharp(s.pi, a), sharp(s.pi, b)
            inner = s.d(interior_by_multivector(wedge(pa, pb), s.psi))
            first = -interior_by_multivector(s.pi, inner).scalar_part() - Fraction(1, 2) * pairing(
                s.d(ab), bracket
            )
            second = -evaluate(theta, pa, pb)
            if lhs != first or lhs != second:
                return False
    return True


# Generators


def bv_generator(s: TwistedStructure) -> GradedOperator:
    """del_pi + del_underline - i_Y."""
    return s.operators.generator


def bv_generator_lambda(s: TwistedStructure) -> GradedOperator:
    """-*_lambda d_{pi,psi} *_lambda^{-1}."""
    return s.operators.bv_lambda


@dataclass(frozen=True)
class GeneratorReport:
    """Generator checks for the canonical generator del_pi + del_underline - i_Y."""

    generates_bracket: bool
    square_zero: bool
    cocycle_lemma: bool
    residual: Multivector

    @property
    def holds(self) -> bool:
        return self.generates_bracket and self.square_zero and self.cocycle_lemma


def cocycle_lemma(s: TwistedStructure, u: Multivector) -> bool:
    """(G0 + i_U)^2 = G0^2 - i_{d_{pi,psi} U} for G0 = del_pi + del_underline."""
    ops = s.operators
    g0 = ops.del_pi + ops.del_underline
    shifted = g0 + interior_operator(u)
    return shifted @ shifted == (g0 @ g0) - interior_operator(d_pi_psi(s, u))


def generator_report(s: TwistedStructure) -> GeneratorReport:
    g = bv_generator(s)
    mismatch = bracket_mismatch(g, extended_bracket(s))
    if mismatch is not None:
        a, b, _, _ = mismatch
        logger.info("generator law fails on %s, %s", indices_of(a), indices_of(b))
    return GeneratorReport(
        generates_bracket=mismatch is None,
        square_zero=(g @ g).is_zero(),
        cocycle_lemma=cocycle_lemma(s, -s.y),
        residual=d_pi_psi(s, s.y),
    )


def volume_generator_relations(s: TwistedStructure) -> dict[str, bool]:
    """Checks on -*d_{pi,psi}*^{-1}: square zero, kills lambda, differs from G by i_Z."""
    ops = s.operators
    bv = ops.bv_lambda
    return {
        "bv_lambda_square_zero": (bv @ bv).is_zero(),
        "bv_lambda_kills_volume": not bv(s.volume),
        "bv_lambda_difference": bv - ops.generator == interior_operator(raw_modular_section(s)),
        "bv_lambda_generates_bracket": bracket_mismatch(bv, extended_bracket(s)) is None,
    }


def check_self_identity(s: TwistedStructure) -> bool:
    """[i_pi, delta] = 2 del_underline - i_Y."""
    ops = s.operators
    return graded_commutator(ops.i_pi, ops.delta) == ops.del_underline.scaled(2) - ops.i_y


def star_relations(s: TwistedStructure) -> dict[str, bool]:
    """Relations between the volume form, X, Y and Z valid for arbitrary (pi, psi)."""
    ops = s.operators
    lam = s.volume
    z = raw_modular_section(s)
    star_z = star(lam, z)
    return {
        "del_underline_volume": ops.del_underline(lam) == 2 * star(lam, s.y),
        "star_x": ops.del_pi(lam) == -star(lam, s.x),
        "star_z": star_z == -ops.generator(lam),
        "star_z_quasi": star_z
        == -ops.d_quasi(star(lam, s.pi)) - 2 * ops.del_underline(lam),
    }


# Characteristic classes


def elw_class_of_dual(s: TwistedStructure) -> Multivector:
    """Infinitesimal modular character of the dual algebra, as a vector."""
    require_twisted(s)
    character = infinitesimal_character(dual_algebra(s))
    return Multivector(s.dim, character.terms)


def elw_generator_formula(s: TwistedStructure) -> bool:
    """<a, X~> lambda = (G a) lambda - a ^ G lambda for the canonical generator G."""
    g = bv_generator(s)
    elw = elw_class_of_dual(s)
    g_lambda = g(s.volume)
    for k in range(s.dim):
        alpha = s.covector(k)
        lhs = pairing(alpha, elw) * s.volume
        rhs = wedge(g(alpha), s.volume) - wedge(alpha, g_lambda)
        if lhs != rhs:
            return False
    return True


def half_class_criterion(s: TwistedStructure) -> bool:
    """d(i_{pi# a} lambda) = 0 for every basis covector a."""
    return all(
        not s.d(interior_by_multivector(sharp(s.pi, s.covector(k)), s.volume))
        for k in range(s.dim)
    )


def character_decomposition(s: TwistedStructure) -> bool:
    """X~ = 2Z - pi#(chi) with chi the infinitesimal character of the algebra."""
    chi = infinitesimal_character(s.algebra)
    return elw_class_of_dual(s) == 2 * modular_section(s) - sharp(s.pi, chi)


# Invariant forms


def cartan_3form(algebra: LieAlgebra) -> Form:
    """psi(X, Y, Z) = 1/2 <X, [Y, Z]> for an invariant nondegenerate form."""
    if algebra.bilinear_form is None:
        raise MalformedStructureError("the Cartan 3-form needs an invariant bilinear form")
    if inverse(algebra.bilinear_form) is None:
        raise MalformedStructureError("bilinear form is degenerate")
    n = algebra.dim
    terms = {}
    for m in monomials(n, 3):
        i, j, k = indices_of(m)
        value = Fraction(1, 2) * algebra.form_value(
            Multivector.basis(n, [i]), algebra.bracket_basis(j, k)
        )
        terms[m] = value
    return Form(n, terms)


def cartan_contraction_holds(algebra: LieAlgebra, psi: Form) -> bool:
    """i_X psi = -1/2 d(X flat) for every basis vector X."""
    for k in range(algebra.dim):
        x = Multivector.basis(algebra.dim, [k])
        if interior_by_multivector(x, psi) != Fraction(-1, 2) * ce_differential(
            algebra, algebra.flat(x)
        ):
            return False
    return True


# Constructions


def sharp_matrix(pi: ExteriorElement) -> list[list[Any]]:
    """Entry [k][l] is pi^{kl}, the e_l coefficient of pi#(e^k)."""
    n = pi.dim
    rows = []
    for k in range(n):
        image = sharp(pi, pi.dual_class().basis(n, [k]))
        rows.append([image.coefficient(1 << l) for l in range(n)])
    return rows


def nondegenerate_twist(algebra: LieAlgebra, pi: Multivector, name: str = "nondegenerate") -> TwistedStructure:
    """(pi, psi = -d omega, lambda = omega^{N/2}) with omega the inverse 2-form of pi."""
    n = algebra.dim
    w = inverse(sharp_matrix(pi)) if n % 2 == 0 else None
    if w is None:
        raise DegreeError("pi is not of maximal rank")
    omega = Form(n, {mask_of([a, b]): w[a][b] for a in range(n) for b in range(a + 1, n)})
    volume = Form.one(n)
    for _ in range(n // 2):
        volume = wedge(volume, omega)
    return TwistedStructure(algebra, pi, -ce_differential(algebra, omega), volume, name)
