from fractions import Fraction

import pytest

from src.exceptions import (
    DegreeError,
    DimensionLimitError,
    GaugeNotInvertibleError,
    TwistedConditionError,
)
from src.services.polynomial import Poly
from src.services.poly_geometry import (
    PolyForm,
    PolyMultivector,
    PolyTwistedStructure,
    apply_vector,
    check_base_dim,
    coordinate,
    de_rham,
    default_degree_bound,
    divergence,
    divergence_relation,
    elw_factor_two,
    function,
    gauge_modular_correspondence,
    gauge_transform,
    hamiltonian,
    hamiltonian_by_bracket,
    hamiltonian_morphism,
    hamiltonian_potential,
    jacobi_anomaly,
    modular_vector_field,
    nondegenerate_twist,
    not_globally_hamiltonian,
    poisson_bracket,
    schouten_fields,
    verify_twisted_fields,
)


def field(n: int, indices: list[int], coeff=1) -> PolyMultivector:
    return PolyMultivector.basis(n, indices, coeff)


def form(n: int, indices: list[int], coeff=1) -> PolyForm:
    return PolyForm.basis(n, indices, coeff)


@pytest.fixture
def symplectic() -> PolyTwistedStructure:
    """d1 ^ d2 on R^2."""
    return PolyTwistedStructure(field(2, [0, 1]), PolyForm(2), name="symplectic")


@pytest.fixture
def linear_rr() -> PolyTwistedStructure:
    """-x2 d1 ^ d2 on R^2."""
    return PolyTwistedStructure(field(2, [0, 1], -coordinate(2, 1)), PolyForm(2), name="linear_rr")


@pytest.fixture
def gauge_r3() -> PolyTwistedStructure:
    """x1 d1 ^ d2 twisted by dx1 ^ dx2 ^ dx3."""
    return PolyTwistedStructure(field(3, [0, 1], coordinate(3, 0)), form(3, [0, 1, 2]), name="gauge_r3")


@pytest.fixture
def gauge_r4() -> PolyTwistedStructure:
    """x1 d1 ^ d2 + d3 ^ d4 on R^4."""
    pi = field(4, [0, 1], coordinate(4, 0)) + field(4, [2, 3])
    return PolyTwistedStructure(pi, PolyForm(4), name="gauge_r4")


@pytest.fixture
def so3_dual() -> PolyTwistedStructure:
    x = [coordinate(3, i) for i in range(3)]
    pi = field(3, [0, 1], x[2]) + field(3, [1, 2], x[0]) + field(3, [2, 0], x[1])
    return PolyTwistedStructure(pi, form(3, [0, 1, 2]), name="so3_dual")


class TestCalculus:
    def test_de_rham_of_a_function(self):
        x1, x2 = coordinate(2, 0), coordinate(2, 1)
        assert de_rham(function(2, x1 * x2)) == form(2, [0], x2) + form(2, [1], x1)

    def test_de_rham_squares_to_zero(self):
        x = [coordinate(3, i) for i in range(3)]
        omega = form(3, [0], x[1] ** 2 * x[2]) + form(3, [1, 2], x[0] * x[1])
        assert not de_rham(de_rham(omega))
        assert not de_rham(de_rham(function(3, x[0] ** 3 * x[2])))

    def test_de_rham_needs_forms(self):
        with pytest.raises(DegreeError):
            de_rham(field(2, [0]))

    def test_lie_bracket_of_vector_fields(self):
        # [x2 d1, d2] = -d1
        assert schouten_fields(field(2, [0], coordinate(2, 1)), field(2, [1])) == -field(2, [0])

    def test_bracket_of_constant_fields_vanishes(self):
        assert not schouten_fields(field(3, [0, 1]), field(3, [1, 2]))

    def test_divergence(self):
        x1, x2 = coordinate(2, 0), coordinate(2, 1)
        v = field(2, [0], x1) + field(2, [1], x2**2)
        assert divergence(v) == 1 + 2 * x2

    def test_apply_vector(self):
        x1, x2 = coordinate(2, 0), coordinate(2, 1)
        assert apply_vector(field(2, [0], x2), x1**2) == 2 * x1 * x2


class TestHamiltonian:
    def test_symplectic_plane(self, symplectic: PolyTwistedStructure):
        x1, x2 = coordinate(2, 0), coordinate(2, 1)
        assert hamiltonian(symplectic.pi, x1) == field(2, [1])
        assert poisson_bracket(symplectic.pi, x1, x2) == 1

    def test_two_hamiltonian_characterizations_agree(self, so3_dual: PolyTwistedStructure):
        x = [coordinate(3, i) for i in range(3)]
        for f in (x[0], x[0] * x[1], x[2] ** 2 + x[0]):
            assert hamiltonian(so3_dual.pi, f) == hamiltonian_by_bracket(so3_dual.pi, f)

    def test_casimir(self, so3_dual: PolyTwistedStructure):
        x = [coordinate(3, i) for i in range(3)]
        casimir = x[0] ** 2 + x[1] ** 2 + x[2] ** 2
        assert not hamiltonian(so3_dual.pi, casimir)

    def test_jacobi_anomaly(self, gauge_r3: PolyTwistedStructure):
        x = [coordinate(3, i) for i in range(3)]
        assert jacobi_anomaly(gauge_r3, x[0], x[1], x[2]).holds

    def test_jacobi_anomaly_on_a_nondegenerate_structure(self):
        x = [coordinate(4, i) for i in range(4)]
        pi = field(4, [0, 1]) + field(4, [2, 3]) + field(4, [0, 2], x[0])
        s = nondegenerate_twist(pi)
        anomaly = jacobi_anomaly(s, x[0], x[1], x[2])
        assert anomaly.holds

    def test_hamiltonian_morphism(self, gauge_r3: PolyTwistedStructure):
        x = [coordinate(3, i) for i in range(3)]
        lhs, rhs = hamiltonian_morphism(gauge_r3, x[1], x[2] + x[0])
        assert lhs == rhs


class TestStructures:
    def test_volume_must_be_constant(self):
        with pytest.raises(DegreeError):
            PolyTwistedStructure(field(2, [0, 1]), PolyForm(2), form(2, [0, 1], coordinate(2, 0)))

    def test_base_dimension_cap(self):
        with pytest.raises(DimensionLimitError):
            check_base_dim(7)

    def test_examples_are_twisted(self, symplectic, linear_rr, gauge_r3, so3_dual):
        for s in (symplectic, linear_rr, gauge_r3, so3_dual):
            assert verify_twisted_fields(s).holds

    def test_untwisted_is_refused(self):
        x1 = coordinate(3, 0)
        # x1 d12 + d13 is not Poisson and psi = 0 does not absorb it
        pi = field(3, [0, 1], x1) + field(3, [0, 2])
        s = PolyTwistedStructure(pi, PolyForm(3))
        assert not s.report.condition
        with pytest.raises(TwistedConditionError):
            modular_vector_field(s)


class TestModular:
    def test_linear(self, linear_rr: PolyTwistedStructure):
        z = modular_vector_field(linear_rr)
        assert linear_rr.x == -field(2, [0])
        assert z == -field(2, [0])
        report = elw_factor_two(linear_rr)
        assert report.u == -field(2, [0], 2)
        assert report.holds

    def test_linear_is_not_unimodular(self, linear_rr: PolyTwistedStructure):
        z = modular_vector_field(linear_rr)
        assert not_globally_hamiltonian(linear_rr.pi, z, default_degree_bound(linear_rr.pi))

    def test_r3(self, gauge_r3: PolyTwistedStructure):
        assert not gauge_r3.y
        assert modular_vector_field(gauge_r3) == -field(3, [1])
        assert elw_factor_two(gauge_r3).holds

    def test_so3_dual(self, so3_dual: PolyTwistedStructure):
        assert not so3_dual.y
        assert not modular_vector_field(so3_dual)
        assert hamiltonian_potential(so3_dual.pi, PolyMultivector(3), 2) == 0

    def test_symplectic(self, symplectic: PolyTwistedStructure):
        assert not modular_vector_field(symplectic)

    def test_divergence_relation(self, gauge_r3: PolyTwistedStructure, linear_rr: PolyTwistedStructure):
        x = [coordinate(3, i) for i in range(3)]
        assert divergence_relation(gauge_r3, x[0] * x[1] + x[2])
        assert divergence_relation(linear_rr, coordinate(2, 0) ** 2)

    def test_potential_of_a_hamiltonian_field(self, symplectic: PolyTwistedStructure):
        x1, x2 = coordinate(2, 0), coordinate(2, 1)
        target = -hamiltonian(symplectic.pi, x1 * x2)
        u = hamiltonian_potential(symplectic.pi, target, 2)
        assert u is not None
        assert -hamiltonian(symplectic.pi, u) == target

    def test_potential_needs_a_vector_field(self, symplectic: PolyTwistedStructure):
        with pytest.raises(DegreeError):
            hamiltonian_potential(symplectic.pi, field(2, [0, 1]), 2)

    def test_degree_bound(self, linear_rr: PolyTwistedStructure, monkeypatch):
        assert default_degree_bound(linear_rr.pi) == 6
        from src.config import settings

        monkeypatch.setattr(settings, "degree_bound", 3)
        assert default_degree_bound(linear_rr.pi) == 3

    def test_nondegenerate_twist_is_unimodular(self):
        x = [coordinate(4, i) for i in range(4)]
        pi = field(4, [0, 1]) + field(4, [2, 3]) + field(4, [0, 2], x[0])
        s = nondegenerate_twist(pi)
        assert verify_twisted_fields(s).holds
        assert not modular_vector_field(s)

    def test_nondegenerate_twist_needs_constant_determinant(self):
        x1 = coordinate(2, 0)
        with pytest.raises(DegreeError):
            nondegenerate_twist(field(2, [0, 1], x1))


class TestGauge:
    def test_constant_gauge_rescales(self, symplectic: PolyTwistedStructure):
        result = gauge_transform(symplectic, form(2, [0, 1], Fraction(1, 2)))
        assert result.det == Fraction(1, 4)
        assert result.structure.pi == field(2, [0, 1], 2)
        assert not result.structure.psi

    def test_non_invertible_gauge(self, symplectic: PolyTwistedStructure):
        with pytest.raises(GaugeNotInvertibleError):
            gauge_transform(symplectic, form(2, [0, 1], coordinate(2, 0)))

    def test_b_must_be_a_two_form(self, symplectic: PolyTwistedStructure):
        with pytest.raises(DegreeError):
            gauge_transform(symplectic, form(2, [0]))

    def test_r3_gauge_removes_the_twist(self, gauge_r3: PolyTwistedStructure):
        b = form(3, [1, 2], coordinate(3, 0))
        result = gauge_transform(gauge_r3, b)
        assert result.det == 1
        assert result.structure.pi == gauge_r3.pi
        assert not result.structure.psi
        assert verify_twisted_fields(result.structure).holds

    def test_modular_correspondence(self, gauge_r3: PolyTwistedStructure):
        report = gauge_modular_correspondence(gauge_r3, form(3, [1, 2], coordinate(3, 0)))
        expected = -field(3, [1])
        assert report.z == expected
        assert report.z_prime == expected
        assert report.predicted == expected
        assert report.alternative == expected
        assert report.correspondence
        assert report.alternative_potential is not None
        assert report.twisted_preserved

    def test_correspondence_with_a_nonzero_correction(self, gauge_r4: PolyTwistedStructure):
        b = form(4, [1, 2])
        result = gauge_transform(gauge_r4, b)
        assert result.det == 1
        assert not result.structure.psi

        report = gauge_modular_correspondence(gauge_r4, b)
        assert report.z == -field(4, [1])
        assert report.z_prime == -field(4, [1]) + field(4, [3])
        assert report.z_prime != report.z
        assert report.predicted == report.z_prime
        assert report.potential == 0
        assert report.correspondence
        assert report.alternative != report.z_prime
        assert report.alternative_potential == -2 * coordinate(4, 2)
        assert report.twisted_preserved
