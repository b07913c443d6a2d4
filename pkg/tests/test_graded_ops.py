import pytest

from src.exceptions import DegreeError, DimensionLimitError
from src.services.exterior import Form, Multivector, interior_by_multivector
from src.services.graded_ops import (
    ORDER_ABOVE_TWO,
    GradedOperator,
    bracket_mismatch,
    generates_bracket,
    graded_commutator,
    is_derivation,
    operator_order,
    phi1,
    phi2,
    skew_symmetry_holds,
)
from src.services.lie_algebra import LieAlgebra, ce_differential, schouten


def interior(v: Multivector) -> GradedOperator:
    degree = v.degree() or 0
    return GradedOperator.from_map(v.dim, -degree, Form, lambda w: interior_by_multivector(v, w))


class TestConstruction:
    def test_from_map_rejects_inhomogeneous_maps(self):
        with pytest.raises(DegreeError):
            GradedOperator.from_map(2, 0, Form, lambda w: w + Form.one(2))

    def test_identity_and_zero(self):
        ident = GradedOperator.identity(3, Form)
        x = Form.basis(3, [0, 2], 5)
        assert ident(x) == x
        assert GradedOperator.zero(3, 1, Form).is_zero()

    def test_left_multiplication(self):
        a = Form.basis(2, [0])
        op = GradedOperator.left_multiplication(a)
        assert op.degree == 1
        assert op(Form.basis(2, [1])) == Form.basis(2, [0, 1])

    def test_left_multiplication_by_zero_takes_the_given_degree(self):
        assert GradedOperator.left_multiplication(Form(3), 2).degree == 2

    def test_block_shape(self):
        op = GradedOperator.left_multiplication(Form.basis(3, [0]))
        block = op.block(1)
        assert len(block) == 3 and len(block[0]) == 3
        # e1 ^ e2 = e12 lands in row 0 of the degree-2 basis
        assert block[0][1] == 1

    def test_dimension_cap(self, monkeypatch):
        from src.config import settings

        monkeypatch.setattr(settings, "max_dim", 2)
        with pytest.raises(DimensionLimitError):
            GradedOperator.zero(3, 0, Form)


class TestAlgebra:
    def test_sum_of_mixed_degrees_raises(self):
        with pytest.raises(DegreeError):
            GradedOperator.identity(2, Form) + GradedOperator.zero(2, 1, Form)

    def test_composition_degree_adds(self):
        a = GradedOperator.left_multiplication(Form.basis(3, [0]))
        i = interior(Multivector.basis(3, [1]))
        assert (a @ i).degree == 0

    def test_commutator_of_interior_and_multiplication(self):
        # [i_{e_k}, l_{e^j}] = delta_kj
        i = interior(Multivector.basis(3, [1]))
        same = graded_commutator(i, GradedOperator.left_multiplication(Form.basis(3, [1])))
        other = graded_commutator(i, GradedOperator.left_multiplication(Form.basis(3, [2])))
        assert same == GradedOperator.identity(3, Form)
        assert other.is_zero()

    def test_interior_operators_anticommute(self):
        a = interior(Multivector.basis(3, [0]))
        b = interior(Multivector.basis(3, [2]))
        assert graded_commutator(a, b).is_zero()

    def test_mismatch_reports_first_differing_column(self):
        ident = GradedOperator.identity(2, Form)
        assert ident.mismatch(ident) is None
        assert ident.mismatch(ident.scaled(2)) == 0


class TestOrder:
    def test_identity_has_order_zero(self):
        assert operator_order(GradedOperator.identity(3, Form)) == 0
        assert phi1(GradedOperator.identity(3, Form)).is_zero()

    def test_interior_by_vector_is_a_derivation(self):
        op = interior(Multivector.basis(3, [0]))
        assert operator_order(op) == 1
        assert is_derivation(op)

    def test_interior_by_bivector_has_order_two(self):
        op = interior(Multivector.basis(3, [0, 1]))
        assert operator_order(op) == 2
        assert not is_derivation(op)
        assert skew_symmetry_holds(op)

    def test_interior_by_trivector_is_above_two(self):
        assert operator_order(interior(Multivector.basis(3, [0, 1, 2]))) == ORDER_ABOVE_TWO

    def test_ce_differential_is_a_derivation(self, aff1_algebra: LieAlgebra):
        d = GradedOperator.from_map(2, 1, Form, lambda w: ce_differential(aff1_algebra, w))
        assert is_derivation(d)

    def test_phi2_of_bivector_interior_is_contraction(self):
        op = interior(Multivector.basis(2, [0, 1]))
        # Phi^2(e^1)(e^2) = i_{e1} i_{e2} e^12 = -1
        assert phi2(op, Form.basis(2, [0]))(Form.basis(2, [1])) == -Form.one(2)


class TestGenerators:
    def test_zero_generates_the_zero_bracket(self):
        op = GradedOperator.zero(3, -1, Form)
        assert generates_bracket(op, lambda a, b: Form(3))

    def test_zero_does_not_generate_a_nonabelian_bracket(self, sl2_algebra: LieAlgebra):
        op = GradedOperator.zero(3, -1, Multivector)
        assert not generates_bracket(op, lambda a, b: schouten(sl2_algebra, a, b))

    def test_derivations_generate_the_zero_bracket(self):
        assert generates_bracket(interior(Multivector.basis(3, [1])), lambda a, b: Form(3))

    def test_generator_degree_checked(self):
        with pytest.raises(DegreeError):
            bracket_mismatch(GradedOperator.identity(2, Form), lambda a, b: Form(2))

    def test_mismatch_reports_the_pair(self):
        # b -> i_{e12}(e^3 ^ b) has degree -1 and order 2
        bivector, third = Multivector.basis(3, [0, 1]), Form.basis(3, [2])
        op = GradedOperator.from_map(3, -1, Form, lambda w: interior_by_multivector(bivector, third ^ w))
        result = bracket_mismatch(op, lambda a, b: Form(3))
        assert result is not None
        a, b, found, expected = result
        assert not found and expected
        assert a.bit_count() + b.bit_count() >= 2
