"""Twisted Poisson geometry on R^n with polynomial coefficients.

Multivector fields and differential forms are exterior elements over the
coordinate frames d1..dn and dx1..dxn whose coefficients are ``Poly`` values
in the same n variables. The anchor is the identity, so the Schouten bracket
and the de Rham differential pick up derivative terms that vanish over a
point.

Volume forms are restricted to nonzero constant multiples of
dx1 ^ ... ^ dxn so that every division stays inside the polynomial ring.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Any

from src.config import settings
from src.constants import Limits
from src.exceptions import (
    DegreeError,
    DimensionLimitError,
    DimensionMismatchError,
    GaugeNotInvertibleError,
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
    interior_by_mixed_on_multivectors,
    interior_by_multivector,
    is_volume,
    mask_of,
    pairing,
    sharp,
    star_inverse,
    wedge,
)
from src.services.linalg import solve
from src.services.polynomial import Poly, adjugate, determinant, exponents_up_to
from src.services.twisted import (
    TwistedReport,
    build_psi1,
    build_psi2,
    psi2_evaluate,
    sharp_matrix,
    twist_defect,
    y_from,
)

logger = logging.getLogger(__name__)


class _PolyCoefficients:
    """Coefficient hooks for elements over the polynomial ring in ``dim`` variables."""

    __slots__ = ()
    dim: int

    def _coerce(self, value: Any) -> Poly:
        if isinstance(value, Poly):
            if value.nvars != self.dim:
                raise DimensionMismatchError(
                    f"coefficient in {value.nvars} variables on R^{self.dim}"
                )
            return value
        return Poly.constant(self.dim, value)

    def _zero_coefficient(self) -> Poly:
        return Poly.zero(self.dim)


class PolyMultivector(_PolyCoefficients, Multivector):
    """Multivector field sum f_I d_I with polynomial f_I."""

    __slots__ = ()


class PolyForm(_PolyCoefficients, Form):
    """Differential form sum f_I dx_I with polynomial f_I."""

    __slots__ = ()


PolyMultivector._dual = PolyForm
PolyForm._dual = PolyMultivector


def check_base_dim(n: int) -> None:
    if n > settings.max_base_dim:
        raise DimensionLimitError(
            f"R^{n} exceeds the base cap {settings.max_base_dim} (set TMTOOL_MAX_BASE_DIM to raise it)"
        )


def function(n: int, f: Poly | Fraction | int) -> PolyForm:
    """A polynomial as a 0-form."""
    return PolyForm(n, {0: f})


def coordinate(n: int, i: int) -> Poly:
    return Poly.variable(n, i)


# Calculus


def _partial(v: ExteriorElement, i: int) -> ExteriorElement:
    """Coefficientwise partial derivative in x_i."""
    return v._new({m: c.derivative(i) for m, c in v.terms.items()})


def _right_derivative(v: ExteriorElement, i: int) -> ExteriorElement:
    """Derivative with respect to the odd variable theta_i acting from the right."""
    bit = 1 << i
    acc = {}
    for m, c in v.terms.items():
        if m & bit:
            sign = -1 if (m >> (i + 1)).bit_count() & 1 else 1
            acc[m ^ bit] = sign * c
    return v._new(acc)


def de_rham(omega: ExteriorElement) -> PolyForm:
    """d(f dx_I) = sum_i (d_i f) dx_i ^ dx_I."""
    if omega.kind != "form":
        raise DegreeError("the de Rham differential acts on forms")
    n = omega.dim
    acc: dict[int, Poly] = {}
    for m, c in omega.terms.items():
        for i in range(n):
            bit = 1 << i
            if m & bit:
                continue
            derivative = c.derivative(i)
            if not derivative:
                continue
            sign = -1 if (m & (bit - 1)).bit_count() & 1 else 1
            key = m | bit
            acc[key] = acc[key] + sign * derivative if key in acc else sign * derivative
    return PolyForm(n, acc)


def _schouten_homogeneous(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    p, q = a.degree() or 0, b.degree() or 0
    result = PolyMultivector(a.dim)
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    for i in range(a.dim):
        da = _right_derivative(a, i)
        if da:
            result = result + wedge(da, _partial(b, i))
        db = _right_derivative(b, i)
        if db:
            result = result - sign * wedge(db, _partial(a, i))
    return result


def schouten_fields(a: ExteriorElement, b: ExteriorElement) -> PolyMultivector:
    """Schouten bracket of multivector fields, bilinear over degree components.

    [P, Q] = sum_i P<d/dtheta_i ^ d_i Q - (-1)^{(p-1)(q-1)} Q<d/dtheta_i ^ d_i P.
    """
    for label, v in (("a", a), ("b", b)):
        if v.kind != "multivector":
            raise DegreeError(f"{label} must be a multivector field")
    if a.dim != b.dim:
        raise DimensionMismatchError(f"R^{a.dim} and R^{b.dim}")
    result = PolyMultivector(a.dim)
    for p in sorted(a.degrees()):
        for q in sorted(b.degrees()):
            result = result + _schouten_homogeneous(a.component(p), b.component(q))
    return result


def lie_derivative_fields(x: ExteriorElement, omega: ExteriorElement) -> PolyForm:
    """L_X = i_X d + d i_X."""
    return interior_by_multivector(x, de_rham(omega)) + de_rham(interior_by_multivector(x, omega))


def divergence(x: ExteriorElement) -> Poly:
    """div X = sum_i d_i X^i for the standard volume."""
    total = Poly.zero(x.dim)
    for i in range(x.dim):
        total = total + x.coefficient(1 << i).derivative(i)
    return total


def apply_vector(x: ExteriorElement, f: Poly) -> Poly:
    """X(f) = <df, X>."""
    return pairing(de_rham(function(x.dim, f)), x)


# Hamiltonian calculus


def hamiltonian(pi: ExteriorElement, f: Poly) -> PolyMultivector:
    """H_f = pi#(df)."""
    return sharp(pi, de_rham(function(pi.dim, f)))


def hamiltonian_by_bracket(pi: ExteriorElement, f: Poly) -> PolyMultivector:
    """-[pi, f]."""
    return -schouten_fields(pi, PolyMultivector(pi.dim, {0: f}))


def poisson_bracket(pi: ExteriorElement, f: Poly, g: Poly) -> Poly:
    """{f, g} = pi(df, dg)."""
    n = pi.dim
    return pairing(wedge(de_rham(function(n, f)), de_rham(function(n, g))), pi)


# Twisted structures on R^n


class PolyTwistedStructure:
    """(pi, psi, lambda) on R^n with lambda a constant multiple of the standard volume."""

    def __init__(
        self,
        pi: PolyMultivector,
        psi: PolyForm,
        volume: PolyForm | None = None,
        name: str = "structure",
    ):
        n = pi.dim
        check_base_dim(n)
        if volume is None:
            volume = PolyForm(n, {full_mask(n): 1})
        for label, element, kind, degree in (
            ("pi", pi, "multivector", 2),
            ("psi", psi, "form", 3),
            ("lambda", volume, "form", n),
        ):
            if element.dim != n:
                raise DimensionMismatchError(f"{label} lives on R^{element.dim}, pi on R^{n}")
            if element.kind != kind:
                raise MalformedStructureError(f"{label} must be a {kind}")
            found = element.degree()
            if found is not None and found != degree:
                raise DegreeError(f"{label} must have degree {degree}, got {found}")
        if not is_volume(volume) or not volume.terms[full_mask(n)].is_constant():
            raise DegreeError("lambda must be a nonzero constant multiple of dx1^...^dxn")
        self.pi = pi
        self.psi = psi
        self.volume = volume
        self.name = name

    @property
    def dim(self) -> int:
        return self.pi.dim

    def covector(self, k: int) -> PolyForm:
        return PolyForm.basis(self.dim, [k])

    def vector(self, k: int) -> PolyMultivector:
        return PolyMultivector.basis(self.dim, [k])

    @cached_property
    def psi1(self) -> MixedTensor:
        return build_psi1(self.pi, self.psi)

    @cached_property
    def psi2(self) -> MixedTensor:
        return build_psi2(self.pi, self.psi)

    @cached_property
    def report(self) -> TwistedReport:
        half = Fraction(1, 2) * schouten_fields(self.pi, self.pi)
        defect = twist_defect(half, self.pi, self.psi)
        return TwistedReport(closed=not de_rham(self.psi), condition=not defect, defect=defect)

    def require_twisted(self) -> None:
        if not self.report.holds:
            raise TwistedConditionError(
                f"{self.name} is not a twisted Poisson structure",
                closed=self.report.closed,
                defect=self.report.defect,
            )

    def d_pi_psi(self, v: ExteriorElement) -> PolyMultivector:
        """[pi, V] - i_{psi2} V."""
        return schouten_fields(self.pi, v) - interior_by_mixed_on_multivectors(self.psi2, v)

    def twisted_bracket(self, alpha: ExteriorElement, beta: ExteriorElement) -> PolyForm:
        """[a, b]_{pi,psi} = L_{pi# a} b - L_{pi# b} a - d pi(a, b) + psi2(a, b)."""
        pa, pb = sharp(self.pi, alpha), sharp(self.pi, beta)
        value = pairing(wedge(alpha, beta), self.pi)
        koszul = (
            lie_derivative_fields(pa, beta)
            - lie_derivative_fields(pb, alpha)
            - de_rham(function(self.dim, value))
        )
        return koszul + psi2_evaluate(self.psi2, alpha, beta)

    @cached_property
    def y(self) -> PolyMultivector:
        """Y = pi#(i_pi psi)."""
        return y_from(self.pi, self.psi)

    @cached_property
    def x(self) -> PolyMultivector:
        """X with i_X lambda = -d(i_pi lambda); <dx_k, X> = div(pi# dx_k)."""
        return star_inverse(self.volume, -de_rham(interior_by_multivector(self.pi, self.volume)))

    def __repr__(self) -> str:
        return f"PolyTwistedStructure({self.name}, n={self.dim})"


def verify_twisted_fields(s: PolyTwistedStructure) -> TwistedReport:
    return s.report


def modular_vector_field(s: PolyTwistedStructure) -> PolyMultivector:
    """Z = X - Y; a d_{pi,psi}-cocycle for twisted structures."""
    s.require_twisted()
    z = s.x - s.y
    if s.d_pi_psi(z):
        logger.warning("modular field of %s is not a cocycle", s.name)
    return z


def divergence_relation(s: PolyTwistedStructure, f: Poly) -> bool:
    """L_{H_f} lambda = X(f) lambda."""
    h = hamiltonian(s.pi, f)
    return lie_derivative_fields(h, s.volume) == apply_vector(s.x, f) * s.volume


@dataclass(frozen=True)
class JacobiAnomaly:
    """Both sides of {{f,g},h} + cyclic = psi(H_f, H_g, H_h)."""

    lhs: Poly
    rhs: Poly

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def jacobi_anomaly(s: PolyTwistedStructure, f: Poly, g: Poly, h: Poly) -> JacobiAnomaly:
    pi = s.pi
    lhs = (
        poisson_bracket(pi, poisson_bracket(pi, f, g), h)
        + poisson_bracket(pi, poisson_bracket(pi, g, h), f)
        + poisson_bracket(pi, poisson_bracket(pi, h, f), g)
    )
    rhs = evaluate(s.psi, hamiltonian(pi, f), hamiltonian(pi, g), hamiltonian(pi, h))
    return JacobiAnomaly(lhs=lhs, rhs=rhs)


def psi1_on_vectors(s: PolyTwistedStructure, x: ExteriorElement, y: ExteriorElement) -> PolyMultivector:
    """sum_k psi(pi# dx_k, X, Y) d_k."""
    result = PolyMultivector(s.dim)
    for k in range(s.dim):
        value = evaluate(s.psi, sharp(s.pi, s.covector(k)), x, y)
        result = result + value * s.vector(k)
    return result


def hamiltonian_morphism(s: PolyTwistedStructure, f: Poly, g: Poly) -> tuple[PolyMultivector, PolyMultivector]:
    """H_{{f,g}} against [H_f, H_g] + psi1(H_f, H_g)."""
    hf, hg = hamiltonian(s.pi, f), hamiltonian(s.pi, g)
    lhs = hamiltonian(s.pi, poisson_bracket(s.pi, f, g))
    rhs = schouten_fields(hf, hg) + psi1_on_vectors(s, hf, hg)
    return lhs, rhs


# Coboundaries of functions


def default_degree_bound(*elements: ExteriorElement) -> int:
    """2 * (largest coefficient degree) + slack, unless configured."""
    if settings.degree_bound is not None:
        return settings.degree_bound
    top = max((c.degree() for e in elements for c in e.terms.values()), default=0)
    return 2 * top + Limits.DEGREE_BOUND_SLACK


def hamiltonian_potential(pi: ExteriorElement, v: ExteriorElement, max_degree: int) -> Poly | None:
    """A polynomial u of degree <= max_degree with [pi, u] = V, or None."""
    n = pi.dim
    if v.degree() not in (None, 1):
        raise DegreeError("V must be a vector field")
    basis = exponents_up_to(n, max_degree)
    images = [schouten_fields(pi, PolyMultivector(n, {0: Poly.monomial(e)})) for e in basis]
    rows: dict[tuple[int, tuple[int, ...]], int] = {}
    for image in [*images, v]:
        for m, c in image.terms.items():
            for powers in c.terms:
                rows.setdefault((m, powers), len(rows))
    logger.debug("potential search: %d unknowns, %d equations", len(basis), len(rows))
    if not rows:
        return Poly.zero(n)
    matrix = [[Fraction(0)] * len(basis) for _ in rows]
    for j, image in enumerate(images):
        for m, c in image.terms.items():
            for powers, value in c.terms.items():
                matrix[rows[(m, powers)]][j] = value
    rhs = [Fraction(0)] * len(rows)
    for m, c in v.terms.items():
        for powers, value in c.terms.items():
            rhs[rows[(m, powers)]] = value
    solution = solve(matrix, rhs)
    if solution is None:
        return None
    return Poly(n, {e: x for e, x in zip(basis, solution, strict=True) if x})


def not_globally_hamiltonian(pi: ExteriorElement, v: ExteriorElement, max_degree: int) -> bool:
    """True iff [pi, u] = V has no polynomial solution of degree <= max_degree."""
    return hamiltonian_potential(pi, v, max_degree) is None


# Modular classes


@dataclass(frozen=True)
class FactorTwoReport:
    """U computed from the representation on the volume line, against 2Z."""

    u: PolyMultivector
    z: PolyMultivector

    @property
    def holds(self) -> bool:
        return self.u == 2 * self.z


def elw_factor_two(s: PolyTwistedStructure) -> FactorTwoReport:
    """U^k = sum_m (dx_m component of [dx_k, dx_m]_{pi,psi}) + div(pi# dx_k)."""
    z = modular_vector_field(s)
    n = s.dim
    coefficients = {}
    for k in range(n):
        alpha = s.covector(k)
        total = divergence(sharp(s.pi, alpha))
        for m in range(n):
            if m == k:
                continue
            beta = s.covector(m)
            bracket = de_rham(function(n, pairing(wedge(alpha, beta), s.pi))) + psi2_evaluate(
                s.psi2, alpha, beta
            )
            total = total + bracket.coefficient(1 << m)
        coefficients[1 << k] = total
    return FactorTwoReport(u=PolyMultivector(n, coefficients), z=z)


# Gauge transformations


@dataclass(frozen=True)
class GaugeResult:
    """(pi', psi - dB) with the matrix of sigma_B and its determinant."""

    structure: PolyTwistedStructure
    sigma: list[list[Poly]]
    det: Fraction


def gauge_transform(s: PolyTwistedStructure, b: PolyForm) -> GaugeResult:
    """pi'# = pi# o sigma_B^{-1} with sigma_B(a) = a + i_{pi# a} B; psi' = psi - dB."""
    n = s.dim
    if b.dim != n or b.kind != "form" or b.degree() not in (None, 2):
        raise DegreeError("B must be a 2-form on the same base")
    images = [sharp(s.pi, s.covector(k)) for k in range(n)]
    sigma = []
    for k in range(n):
        row_form = s.covector(k) + interior_by_multivector(images[k], b)
        sigma.append([row_form.coefficient(1 << j) for j in range(n)])
    det = determinant(sigma)
    det_poly = det if isinstance(det, Poly) else Poly.constant(n, det)
    if not det_poly or not det_poly.is_constant():
        raise GaugeNotInvertibleError(
            f"det(Id + B pi#) = {det_poly} is not a nonzero constant", det=str(det_poly)
        )
    scale = Fraction(1) / det_poly.as_constant()
    adj = adjugate(sigma)
    terms: dict[int, Poly] = {}
    for k in range(n):
        image = PolyMultivector(n)
        for j in range(n):
            image = image + (adj[k][j] * scale) * images[j]
        for l in range(k + 1, n):
            value = image.coefficient(1 << l)
            if value:
                terms[mask_of([k, l])] = value
    pi_prime = PolyMultivector(n, terms)
    psi_prime = s.psi - de_rham(b)
    logger.debug("gauge of %s: det = %s", s.name, det_poly)
    return GaugeResult(
        structure=PolyTwistedStructure(pi_prime, psi_prime, s.volume, f"{s.name} gauged"),
        sigma=sigma,
        det=det_poly.as_constant(),
    )


@dataclass(frozen=True)
class GaugeReport:
    """Modular fields before and after a gauge transformation."""

    z: PolyMultivector
    z_prime: PolyMultivector
    predicted: PolyMultivector
    alternative: PolyMultivector
    potential: Poly | None
    alternative_potential: Poly | None
    twisted_preserved: bool

    @property
    def correspondence(self) -> bool:
        return self.potential is not None


def gauge_modular_correspondence(
    s: PolyTwistedStructure, b: PolyForm, max_degree: int | None = None
) -> GaugeReport:
    """Z' against Z - pi'#(i_Z B) up to [pi', u], with lambda' = lambda."""
    gauged = gauge_transform(s, b).structure
    z = modular_vector_field(s)
    z_prime = modular_vector_field(gauged)
    bound = max_degree if max_degree is not None else default_degree_bound(s.pi, s.psi, b)
    i_z_b = interior_by_multivector(z, b)
    predicted = z - sharp(gauged.pi, i_z_b)
    alternative = z + sharp(s.pi, i_z_b)
    return GaugeReport(
        z=z,
        z_prime=z_prime,
        predicted=predicted,
        alternative=alternative,
        potential=hamiltonian_potential(gauged.pi, z_prime - predicted, bound),
        alternative_potential=hamiltonian_potential(gauged.pi, z_prime - alternative, bound),
        twisted_preserved=gauged.report.holds,
    )


# Constructions


def nondegenerate_twist(pi: PolyMultivector, name: str = "nondegenerate") -> PolyTwistedStructure:
    """(pi, -d omega, omega^{n/2}) for omega the inverse 2-form of a pi with constant Pfaffian."""
    n = pi.dim
    if n % 2:
        raise DegreeError("pi is not of maximal rank on an odd-dimensional base")
    p = sharp_matrix(pi)
    det = determinant(p)
    det_poly = det if isinstance(det, Poly) else Poly.constant(n, det)
    if not det_poly or not det_poly.is_constant():
        raise DegreeError(f"pi must have a nonzero constant determinant, got {det_poly}")
    scale = Fraction(1) / det_poly.as_constant()
    w = adjugate(p)
    omega = PolyForm(
        n, {mask_of([a, c]): w[a][c] * scale for a in range(n) for c in range(a + 1, n)}
    )
    volume = PolyForm.one(n)
    for _ in range(n // 2):
        volume = wedge(volume, omega)
    return PolyTwistedStructure(pi, -de_rham(omega), volume, name)

