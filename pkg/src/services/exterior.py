"""Exact exterior algebra over a finite basis.

Multivectors live in the exterior algebra of a basis e_1..e_N, forms in the
exterior algebra of the dual basis. Both are stored sparsely as maps from a
basis monomial (an N-bit mask, bit k standing for index k) to a coefficient.
Coefficients are exact: ``Fraction`` for the point case, polynomials for
fields on R^n (see ``poly_geometry``). Every routine below only needs ring
operations on coefficients, so both cases share the same code.

Sign conventions:

* the interior product by a basis vector is the degree -1 derivation with
  ``i_{e_k} e^I = (-1)^{#(i in I, i < k)} e^{I minus k}``;
* ``i_{X_1 ^ ... ^ X_p} = i_{X_1} o ... o i_{X_p}``;
* ``<e^I, e_J> = delta_IJ`` on sorted monomials.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Any, ClassVar

if TYPE_CHECKING:
    from typing_extensions import Self

from src.exceptions import DegreeError, DimensionMismatchError, InputError


# Bitmask helpers


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of a set of basis indices."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> list[int]:
    """Sorted basis indices of a bitmask."""
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def full_mask(dim: int) -> int:
    return (1 << dim) - 1


def monomials(dim: int, degree: int) -> list[int]:
    """Basis monomials of one degree, in lexicographic order of index tuples."""
    if degree < 0 or degree > dim:
        return []
    return [mask_of(c) for c in combinations(range(dim), degree)]


def all_monomials(dim: int) -> list[int]:
    """Every basis monomial, ordered by degree then lexicographically."""
    return [m for p in range(dim + 1) for m in monomials(dim, p)]


def wedge_sign(left: int, right: int) -> int:
    """Sign of e^left ^ e^right relative to the sorted monomial (0 if they overlap)."""
    if left & right:
        return 0
    swaps = 0
    for j in indices_of(right):
        swaps += (left >> (j + 1)).bit_count()
    return -1 if swaps & 1 else 1


def contract(inner: int, outer: int) -> tuple[int, int] | None:
    """Sign and remainder of i_{e_inner} applied to e^outer.

    Returns None when ``inner`` is not contained in ``outer``.
    """
    if inner & outer != inner:
        return None
    sign = 1
    rest = outer
    for k in reversed(indices_of(inner)):
        if (rest & ((1 << k) - 1)).bit_count() & 1:
            sign = -sign
        rest ^= 1 << k
    return sign, rest


def permutation_sign(indices: Sequence[int]) -> int:
    """Sign of the permutation sorting ``indices`` (0 on repeats)."""
    if len(set(indices)) != len(indices):
        return 0
    inversions = sum(
        1 for a in range(len(indices)) for b in range(a + 1, len(indices)) if indices[a] > indices[b]
    )
    return -1 if inversions & 1 else 1


def _accumulate(acc: dict[Any, Any], key: Any, value: Any) -> None:
    if key in acc:
        acc[key] = acc[key] + value
    else:
        acc[key] = value


# Elements


class ExteriorElement:
    """Sparse element of an exterior algebra of dimension ``dim``."""

    kind: ClassVar[str] = "element"
    _dual: ClassVar[type[ExteriorElement]]

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[int, Any] | None = None):
        self.dim = dim
        limit = 1 << dim
        clean: dict[int, Any] = {}
        for mask, coeff in (terms or {}).items():
            if mask < 0 or mask >= limit:
                raise DimensionMismatchError(
                    f"monomial {indices_of(mask)} outside a basis of dimension {dim}"
                )
            value = self._coerce(coeff)
            if value:
                clean[mask] = value
        self.terms = clean

    # Coefficient ring hooks, overridden for polynomial coefficients

    def _coerce(self, value: Any) -> Any:
        return value if isinstance(value, Fraction) else Fraction(value)

    def _zero_coefficient(self) -> Any:
        return Fraction(0)

    # Constructors

    @classmethod
    def zero(cls, dim: int) -> Self:
        return cls(dim)

    @classmethod
    def one(cls, dim: int) -> Self:
        return cls(dim, {0: 1})

    @classmethod
    def basis(cls, dim: int, indices: Sequence[int], coeff: Any = 1) -> Self:
        """Monomial with the given (possibly unsorted) indices."""
        if any(i < 0 or i >= dim for i in indices):
            raise DimensionMismatchError(f"index outside a basis of dimension {dim}")
        sign = permutation_sign(indices)
        if sign == 0:
            return cls(dim)
        return cls(dim, {mask_of(indices): sign * coeff})

    def _new(self, terms: Mapping[int, Any]) -> Self:
        return type(self)(self.dim, terms)

    def dual_class(self) -> type[ExteriorElement]:
        return self._dual

    # Grading

    def degrees(self) -> set[int]:
        return {m.bit_count() for m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Degree of a homogeneous element, None for zero."""
        degrees = self.degrees()
        if not degrees:
            return None
        if len(degrees) > 1:
            raise DegreeError(f"{self.kind} is not homogeneous: degrees {sorted(degrees)}")
        return degrees.pop()

    def component(self, degree: int) -> Self:
        return self._new({m: c for m, c in self.terms.items() if m.bit_count() == degree})

    def coefficient(self, mask: int) -> Any:
        return self.terms.get(mask, self._zero_coefficient())

    def scalar_part(self) -> Any:
        return self.coefficient(0)

    def items(self) -> Iterator[tuple[int, Any]]:
        return iter(sorted(self.terms.items()))

    # Linear structure

    def _check_same(self, other: ExteriorElement) -> None:
        if not isinstance(other, ExteriorElement) or other.kind != self.kind:
            raise InputError(f"cannot combine {self.kind} with {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimensions {self.dim} and {other.dim} differ")

    def __add__(self, other: ExteriorElement) -> Self:
        self._check_same(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _accumulate(acc, m, c)
        return self._new(acc)

    def __sub__(self, other: ExteriorElement) -> Self:
        return self + (-other)

    def __neg__(self) -> Self:
        return self._new({m: -c for m, c in self.terms.items()})

    def __mul__(self, scalar: Any) -> Self:
        if isinstance(scalar, ExteriorElement):
            return NotImplemented
        return self._new({m: c * scalar for m, c in self.terms.items()})

    def __rmul__(self, scalar: Any) -> Self:
        if isinstance(scalar, ExteriorElement):
            return NotImplemented
        return self._new({m: scalar * c for m, c in self.terms.items()})

    def __xor__(self, other: ExteriorElement) -> Self:
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        if other.kind != self.kind or other.dim != self.dim:
            return False
        if self.terms.keys() != other.terms.keys():
            return False
        return all(self.terms[m] == other.terms[m] for m in self.terms)

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        symbol = "e" if self.kind == "multivector" else "E"
        if not self.terms:
            return f"{type(self).__name__}(0)"
        parts = []
        for m, c in self.items():
            name = "^".join(f"{symbol}{i + 1}" for i in indices_of(m)) or "1"
            parts.append(f"({c})*{name}")
        return f"{type(self).__name__}({' + '.join(parts)})"


class Multivector(ExteriorElement):
    """Element of the exterior algebra of the basis e_1..e_N."""

    kind = "multivector"
    __slots__ = ()


class Form(ExteriorElement):
    """Element of the exterior algebra of the dual basis."""

    kind = "form"
    __slots__ = ()


Multivector._dual = Form
Form._dual = Multivector


def _require_dim(*elements: ExteriorElement | MixedTensor) -> int:
    dims = {e.dim for e in elements}
    if len(dims) != 1:
        raise DimensionMismatchError(f"dimensions {sorted(dims)} differ")
    return dims.pop()


def _require_kind(element: ExteriorElement, kind: str, name: str) -> None:
    if element.kind != kind:
        raise InputError(f"{name} must be a {kind}, got a {element.kind}")


def _require_degree(element: ExteriorElement, degree: int, name: str) -> None:
    found = element.degree()
    if found is not None and found != degree:
        raise DegreeError(f"{name} must have degree {degree}, got {found}")


# Products


def wedge(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    """Exterior product of two elements of the same kind."""
    a._check_same(b)
    acc: dict[int, Any] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign = wedge_sign(ma, mb)
            if sign:
                _accumulate(acc, ma | mb, sign * (ca * cb))
    return a._new(acc)


def wedge_all(dim: int, factors: Sequence[ExteriorElement], cls: type[ExteriorElement]) -> Any:
    result: ExteriorElement = cls.one(dim)
    for f in factors:
        result = wedge(result, f)
    return result


def wedge_left(xi: Form, omega: Form) -> Form:
    """Left exterior multiplication by a 1-form."""
    _require_kind(xi, "form", "xi")
    _require_degree(xi, 1, "xi")
    return wedge(xi, omega)


def _contract_terms(inner: ExteriorElement, outer: ExteriorElement) -> dict[int, Any]:
    acc: dict[int, Any] = {}
    for mi, ci in inner.terms.items():
        for mo, co in outer.terms.items():
            hit = contract(mi, mo)
            if hit is not None:
                sign, rest = hit
                _accumulate(acc, rest, sign * (ci * co))
    return acc


def interior_by_multivector(v: ExteriorElement, omega: ExteriorElement) -> ExteriorElement:
    """i_V omega for a homogeneous multivector V and a homogeneous form omega."""
    _require_kind(v, "multivector", "V")
    _require_kind(omega, "form", "omega")
    _require_dim(v, omega)
    v.degree()
    omega.degree()
    return omega._new(_contract_terms(v, omega))


def interior_by_form(xi: ExteriorElement, v: ExteriorElement) -> ExteriorElement:
    """i_xi V, the mirror contraction of a multivector by a form."""
    _require_kind(xi, "form", "xi")
    _require_kind(v, "multivector", "V")
    _require_dim(xi, v)
    xi.degree()
    v.degree()
    return v._new(_contract_terms(xi, v))


def pairing(omega: ExteriorElement, v: ExteriorElement) -> Any:
    """<omega, V> for a form and a multivector of equal degree."""
    _require_kind(omega, "form", "omega")
    _require_kind(v, "multivector", "V")
    _require_dim(omega, v)
    p, q = omega.degree(), v.degree()
    if p is not None and q is not None and p != q:
        raise DegreeError(f"pairing needs equal degrees, got {p} and {q}")
    total = omega._zero_coefficient()
    for m, c in omega.terms.items():
        if m in v.terms:
            total = total + c * v.terms[m]
    return total


def evaluate(omega: ExteriorElement, *vectors: ExteriorElement) -> Any:
    """omega(X_1, ..., X_q) = <omega, X_1 ^ ... ^ X_q>."""
    dim = omega.dim
    cls = omega.dual_class()
    return pairing(omega, wedge_all(dim, vectors, cls))


def sharp(pi: ExteriorElement, alpha: ExteriorElement) -> ExteriorElement:
    """pi#(alpha), defined by <beta, pi# alpha> = pi(alpha, beta).

    Equivalently pi#(e^k) = sum_l pi^{kl} e_l, which is the mirror contraction i_alpha pi.
    """
    _require_kind(pi, "multivector", "pi")
    _require_kind(alpha, "form", "alpha")
    _require_degree(pi, 2, "pi")
    _require_degree(alpha, 1, "alpha")
    return interior_by_form(alpha, pi)


def push_forward(pi: ExteriorElement, omega: ExteriorElement) -> ExteriorElement:
    """(wedge^q pi#) omega, sending a_1 ^ ... ^ a_q to pi#a_1 ^ ... ^ pi#a_q."""
    _require_kind(omega, "form", "omega")
    dim = _require_dim(pi, omega)
    cls = omega.dual_class()
    images = [sharp(pi, omega.basis(dim, [k])) for k in range(dim)]
    result = cls.zero(dim)
    for m, c in omega.terms.items():
        factors = [images[k] for k in indices_of(m)]
        result = result + c * wedge_all(dim, factors, cls)
    return result


def is_volume(lam: ExteriorElement) -> bool:
    return lam.kind == "form" and set(lam.terms) == {full_mask(lam.dim)}


def _volume_scalar(lam: ExteriorElement) -> Fraction:
    if not is_volume(lam):
        raise DegreeError("volume form must be nonzero and of top degree")
    value = lam.terms[full_mask(lam.dim)]
    if isinstance(value, Fraction):
        return value
    return value.as_constant()


def star(lam: ExteriorElement, v: ExteriorElement) -> ExteriorElement:
    """*_lambda V = i_V lambda."""
    _volume_scalar(lam)
    return interior_by_multivector(v, lam)


def star_inverse(lam: ExteriorElement, omega: ExteriorElement) -> ExteriorElement:
    """The multivector V with i_V lambda = omega."""
    scale = _volume_scalar(lam)
    _require_kind(omega, "form", "omega")
    dim = _require_dim(lam, omega)
    top = full_mask(dim)
    acc: dict[int, Any] = {}
    for m, c in omega.terms.items():
        comp = top ^ m
        sign, _ = contract(comp, top)  # type: ignore[misc]
        acc[comp] = c * (Fraction(1) / (scale * sign))
    return omega.dual_class()(dim, acc)


# Mixed tensors


class MixedTensor:
    """Element of wedge^q(dual) (x) wedge^p(basis), typed by its bidegree (q, p)."""

    __slots__ = ("dim", "bidegree", "terms")

    def __init__(self, dim: int, bidegree: tuple[int, int], terms: Mapping[tuple[int, int], Any] | None = None):
        self.dim = dim
        self.bidegree = bidegree
        q, p = bidegree
        clean: dict[tuple[int, int], Any] = {}
        for (fm, vm), c in (terms or {}).items():
            if fm.bit_count() != q or vm.bit_count() != p:
                raise DegreeError(f"term {(indices_of(fm), indices_of(vm))} is not of bidegree {bidegree}")
            if c:
                clean[(fm, vm)] = c
        self.terms = clean

    @classmethod
    def from_pairs(
        cls, dim: int, bidegree: tuple[int, int], pairs: Iterable[tuple[ExteriorElement, ExteriorElement]]
    ) -> MixedTensor:
        """Sum of xi (x) W over (form, multivector) pairs."""
        acc: dict[tuple[int, int], Any] = {}
        for xi, w in pairs:
            for fm, fc in xi.terms.items():
                for vm, vc in w.terms.items():
                    _accumulate(acc, (fm, vm), fc * vc)
        return cls(dim, bidegree, acc)

    def __add__(self, other: MixedTensor) -> MixedTensor:
        if other.bidegree != self.bidegree or other.dim != self.dim:
            raise DegreeError("mixed tensors of different bidegree")
        acc = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(acc, k, c)
        return MixedTensor(self.dim, self.bidegree, acc)

    def __neg__(self) -> MixedTensor:
        return MixedTensor(self.dim, self.bidegree, {k: -c for k, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedTensor):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.bidegree == other.bidegree
            and self.terms.keys() == other.terms.keys()
            and all(self.terms[k] == other.terms[k] for k in self.terms)
        )

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"MixedTensor(dim={self.dim}, bidegree={self.bidegree}, terms={len(self.terms)})"


def interior_by_mixed(t: MixedTensor, omega: ExteriorElement) -> ExteriorElement:
    """i_{xi (x) W} omega = xi ^ i_W omega; vanishes when deg W > deg omega."""
    _require_kind(omega, "form", "omega")
    _require_dim(t, omega)
    omega.degree()
    acc: dict[int, Any] = {}
    for (fm, vm), c in t.terms.items():
        for om, oc in omega.terms.items():
            hit = contract(vm, om)
            if hit is None:
                continue
            sign, rest = hit
            s2 = wedge_sign(fm, rest)
            if s2:
                _accumulate(acc, fm | rest, (sign * s2) * (c * oc))
    return omega._new(acc)


def interior_by_mixed_on_multivectors(t: MixedTensor, v: ExteriorElement) -> ExteriorElement:
    """i_{xi (x) W} V = W ^ i_xi V, the same construction with the two sides exchanged."""
    _require_kind(v, "multivector", "V")
    _require_dim(t, v)
    v.degree()
    acc: dict[int, Any] = {}
    for (fm, vm), c in t.terms.items():
        for mm, mc in v.terms.items():
            hit = contract(fm, mm)
            if hit is None:
                continue
            sign, rest = hit
            s2 = wedge_sign(vm, rest)
            if s2:
                _accumulate(acc, vm | rest, (sign * s2) * (c * mc))
    return v._new(acc)
