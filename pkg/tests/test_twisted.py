from fractions import Fraction

import pytest

from src.exceptions import DegreeError, MalformedStructureError, TwistedConditionError
from src.services.exterior import Form, Multivector
from src.services.lie_algebra import LieAlgebra
from src.services.twisted import (
    TwistedStructure,
    bv_generator,
    cartan_3form,
    cartan_contraction_holds,
    chain_map_mismatch,
    character_decomposition,
    check_self_identity,
    coboundary_relation,
    dual_algebra,
    elw_class_of_dual,
    elw_generator_formula,
    generator_report,
    half_class_criterion,
    modular_section,
    nondegenerate_twist,
    raw_modular_section,
    sharp_is_morphism,
    sharp_matrix,
    star_relations,
    twisted_bracket_forms,
    verify_twisted,
    volume_generator_relations,
    x_by_volume,
    y_section,
    y_trace_relation,
)

TWISTED = ["sl2", "example41", "heisenberg", "example5"]


@pytest.fixture(params=TWISTED)
def twisted(request: pytest.FixtureRequest) -> TwistedStructure:
    return request.getfixturevalue(request.param)


class TestConstruction:
    def test_volume_must_be_top_degree(self, aff1_algebra: LieAlgebra):
        with pytest.raises(DegreeError):
            TwistedStructure(aff1_algebra, Multivector(2), Form(2), Form.basis(2, [0]))

    def test_pi_must_be_a_bivector(self, sl2_algebra: LieAlgebra):
        with pytest.raises(DegreeError):
            TwistedStructure(sl2_algebra, Multivector.basis(3, [0]), Form(3), Form.basis(3, [0, 1, 2]))

    def test_pi_must_be_a_multivector(self, aff1_algebra: LieAlgebra):
        with pytest.raises(MalformedStructureError):
            TwistedStructure(aff1_algebra, Form.basis(2, [0, 1]), Form(2), Form.basis(2, [0, 1]))

    def test_rescaling_needs_a_nonzero_constant(self, sl2: TwistedStructure):
        with pytest.raises(DegreeError):
            sl2.rescaled(0)


class TestTwistedCondition:
    def test_examples_are_twisted(self, twisted: TwistedStructure):
        assert verify_twisted(twisted).holds

    def test_untwisted_defect(self, example5_untwisted: TwistedStructure):
        report = verify_twisted(example5_untwisted)
        assert report.closed
        assert not report.condition
        expected = Multivector.basis(6, [0, 4, 5]) - Multivector.basis(6, [3, 4, 5])
        assert report.defect == expected

    def test_modular_section_requires_the_condition(self, example5_untwisted: TwistedStructure):
        with pytest.raises(TwistedConditionError):
            modular_section(example5_untwisted)
        # the raw difference is still available
        raw_modular_section(example5_untwisted)


class TestSections:
    def test_sl2(self, sl2: TwistedStructure):
        assert not y_section(sl2)
        assert sl2.x == Multivector.basis(3, [1], 2)
        assert modular_section(sl2) == Multivector.basis(3, [1], 2)

    def test_example41_is_unimodular(self, example41: TwistedStructure):
        assert not example41.x
        assert not modular_section(example41)

    def test_heisenberg(self, heisenberg: TwistedStructure):
        e3 = Multivector.basis(4, [2], -1)
        assert heisenberg.y == e3
        assert heisenberg.x == e3
        assert not modular_section(heisenberg)

    def test_affine(self, example5: TwistedStructure):
        expected = Multivector.basis(6, [3]) - Multivector.basis(6, [0])
        assert example5.y == expected
        assert example5.x == expected
        assert not modular_section(example5)

    def test_rescaled_volume_keeps_the_section(self, sl2: TwistedStructure):
        assert modular_section(sl2.rescaled(Fraction(3, 2))) == modular_section(sl2)

    def test_x_characterizations_agree(self, twisted: TwistedStructure, example5_untwisted: TwistedStructure):
        assert x_by_volume(twisted) == twisted.x
        assert x_by_volume(example5_untwisted) == example5_untwisted.x

    def test_y_trace_relation(self, twisted: TwistedStructure):
        assert y_trace_relation(twisted)


class TestBrackets:
    def test_twisted_bracket_on_example41(self, example41: TwistedStructure):
        bracket = twisted_bracket_forms(example41, Form.basis(2, [0]), Form.basis(2, [1]))
        assert bracket == -Form.basis(2, [1])

    def test_bracket_takes_one_forms(self, example41: TwistedStructure):
        with pytest.raises(DegreeError):
            twisted_bracket_forms(example41, Form.basis(2, [0, 1]), Form.basis(2, [1]))

    def test_dual_algebra_names(self, example41: TwistedStructure):
        assert dual_algebra(example41).basis == ["e1*", "e2*"]

    def test_sharp_is_morphism(self, twisted: TwistedStructure):
        assert sharp_is_morphism(twisted)

    def test_sharp_matrix(self, example41: TwistedStructure):
        assert sharp_matrix(example41.pi) == [[0, 1], [-1, 0]]


class TestDifferentials:
    def test_chain_map(self, twisted: TwistedStructure):
        assert chain_map_mismatch(twisted) is None

    def test_coboundary_relation(self, twisted: TwistedStructure):
        assert coboundary_relation(twisted)


class TestGenerators:
    def test_generator_report(self, twisted: TwistedStructure):
        report = generator_report(twisted)
        assert report.generates_bracket
        assert report.square_zero
        assert report.cocycle_lemma

    def test_volume_generator(self, twisted: TwistedStructure):
        assert all(volume_generator_relations(twisted).values())

    def test_generator_on_example41(self, example41: TwistedStructure):
        e1 = Form.basis(2, [0])
        assert bv_generator(example41)(e1) == -Form.one(2)
        assert example41.operators.bv_lambda(e1) == -Form.one(2)

    def test_self_identity(self, twisted: TwistedStructure):
        assert check_self_identity(twisted)

    def test_star_relations_hold_without_the_condition(self, example5_untwisted: TwistedStructure):
        assert all(star_relations(example5_untwisted).values())


class TestCharacteristicClasses:
    def test_sl2(self, sl2: TwistedStructure):
        assert elw_class_of_dual(sl2) == Multivector.basis(3, [1], 4)
        assert half_class_criterion(sl2)

    def test_example41(self, example41: TwistedStructure):
        assert elw_class_of_dual(example41) == -Multivector.basis(2, [0])
        assert not half_class_criterion(example41)

    def test_affine(self, example5: TwistedStructure):
        expected = Multivector.basis(6, [0]) - Multivector.basis(6, [3])
        assert elw_class_of_dual(example5) == expected
        assert not half_class_criterion(example5)

    def test_character_decomposition(self, twisted: TwistedStructure):
        assert character_decomposition(twisted)

    def test_generator_formula(self, twisted: TwistedStructure):
        assert elw_generator_formula(twisted)

    def test_dual_class_requires_the_condition(self, example5_untwisted: TwistedStructure):
        with pytest.raises(TwistedConditionError):
            elw_class_of_dual(example5_untwisted)


class TestCartan:
    def test_sl2(self, sl2_algebra: LieAlgebra):
        psi = cartan_3form(sl2_algebra)
        assert psi == Form.basis(3, [0, 1, 2])
        assert cartan_contraction_holds(sl2_algebra, psi)

    def test_so3(self, so3_algebra: LieAlgebra):
        psi = cartan_3form(so3_algebra)
        assert psi == Form.basis(3, [0, 1, 2], Fraction(1, 2))
        assert cartan_contraction_holds(so3_algebra, psi)

    def test_wrong_form_fails_contraction(self, so3_algebra: LieAlgebra):
        assert not cartan_contraction_holds(so3_algebra, Form.basis(3, [0, 1, 2]))

    def test_needs_a_form(self, aff1_algebra: LieAlgebra):
        with pytest.raises(MalformedStructureError):
            cartan_3form(aff1_algebra)


class TestNondegenerate:
    def test_heisenberg(self, heisenberg_algebra: LieAlgebra):
        pi = Multivector.basis(4, [0, 1]) + Multivector.basis(4, [2, 3])
        s = nondegenerate_twist(heisenberg_algebra, pi)
        assert s.psi == Form.basis(4, [0, 1, 3], -1)
        assert verify_twisted(s).holds
        assert not modular_section(s)

    def test_odd_dimension(self, sl2_algebra: LieAlgebra):
        with pytest.raises(DegreeError):
            nondegenerate_twist(sl2_algebra, Multivector.basis(3, [0, 1]))

    def test_degenerate_pi(self, heisenberg_algebra: LieAlgebra):
        with pytest.raises(DegreeError):
            nondegenerate_twist(heisenberg_algebra, Multivector.basis(4, [0, 1]))
