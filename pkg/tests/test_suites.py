import random
from pathlib import Path

import pytest

from src.constants import Command, ReportStatus
from src.exceptions import InputError, TwistedConditionError
from src.services.exterior import Form, Multivector
from src.services.suites import (
    ARBITRARY_CHECKS,
    TWISTED_CHECKS,
    SuiteRunner,
    check_star_z,
    check_x_volume,
    minimize,
    random_algebras,
    random_structure,
)
from src.services.twisted import TwistedStructure
from src.utils.structure_io import LoadedStructure, load_structure


def lie(s: TwistedStructure) -> LoadedStructure:
    return LoadedStructure(name=s.name, path=None, structure=s)


class TestDispatch:
    def test_unknown_command(self, runner: SuiteRunner, example41: TwistedStructure):
        with pytest.raises(InputError, match="unknown command"):
            runner.run("frobnicate", lie(example41))

    def test_poly_needs_a_base(self, runner: SuiteRunner, example41: TwistedStructure):
        with pytest.raises(InputError):
            runner.run(Command.POLY, lie(example41))

    def test_lie_suites_need_an_algebra(self, runner: SuiteRunner, structures_dir: Path):
        loaded = load_structure(structures_dir / "linear_rr.json")
        with pytest.raises(InputError):
            runner.run(Command.MODULAR, loaded)

    def test_gauge_needs_b(self, runner: SuiteRunner, structures_dir: Path):
        loaded = load_structure(structures_dir / "linear_rr.json")
        with pytest.raises(InputError, match="2-form B"):
            runner.run(Command.GAUGE, loaded)

    def test_modular_refuses_untwisted(self, runner: SuiteRunner, example5_untwisted: TwistedStructure):
        with pytest.raises(TwistedConditionError):
            runner.run(Command.MODULAR, lie(example5_untwisted))


class TestReports:
    def test_verify_failure_is_reported(self, runner: SuiteRunner, example5_untwisted: TwistedStructure):
        report = runner.run(Command.VERIFY, lie(example5_untwisted))
        assert report.status == ReportStatus.FAIL
        assert [c.name for c in report.failures] == ["condition"]
        counterexample = report.failures[0].counterexample
        assert counterexample is not None
        assert counterexample.lhs == [
            {"indices": ["e11", "u1", "u2"], "coeff": "1"},
            {"indices": ["e22", "u1", "u2"], "coeff": "-1"},
        ]
        assert report.data["twisted"]["closed"] is True

    def test_modular_data(self, runner: SuiteRunner, sl2: TwistedStructure):
        report = runner.run(Command.MODULAR, lie(sl2))
        assert report.passed
        assert report.data["Z"] == {"Xp": "2"}
        assert report.data["unimodular"] is False

    def test_elw_data(self, runner: SuiteRunner, example41: TwistedStructure):
        report = runner.run(Command.ELW, lie(example41))
        assert report.passed
        assert report.data["elw_dual"] == {"e1": "-1"}
        assert report.data["character"] == {"e2*": "-1"}

    def test_cohomology_without_unimodularity(self, runner: SuiteRunner, sl2: TwistedStructure):
        report = runner.run(Command.COHOMOLOGY, lie(sl2))
        assert report.data["duality"] is None
        assert "duality" not in [c.name for c in report.checks]

    def test_identities(self, runner: SuiteRunner, example41: TwistedStructure):
        report = runner.run(Command.IDENTITIES, lie(example41))
        assert report.passed
        names = [c.name for c in report.checks]
        for name in [*ARBITRARY_CHECKS, *TWISTED_CHECKS]:
            assert name in names
            assert f"random.{name}" in names
        assert {entry["name"] for entry in report.data["operators"]} == {
            "i_pi",
            "delta",
            "del_underline",
            "d_underline",
            "generator",
        }

    def test_i_pi_is_classified_order_two(self, runner: SuiteRunner, example41: TwistedStructure):
        report = runner.run(Command.IDENTITIES, lie(example41))
        i_pi = next(e for e in report.data["operators"] if e["name"] == "i_pi")
        assert i_pi["order"] == 2
        assert report.data["identities"]["i_pi_order"] is True

    def test_zero_pi_has_order_zero(self, runner: SuiteRunner, example41: TwistedStructure):
        flat = TwistedStructure(example41.algebra, Multivector(2), Form(2), example41.volume, "flat")
        report = runner.run(Command.IDENTITIES, lie(flat))
        i_pi = next(e for e in report.data["operators"] if e["name"] == "i_pi")
        assert i_pi["order"] == 0
        assert report.data["identities"]["i_pi_order"] is True

    def test_inconsistent_x_is_reported(
        self, runner: SuiteRunner, example41: TwistedStructure, monkeypatch: pytest.MonkeyPatch
    ):
        import src.services.twisted as twisted

        original = twisted.x_section
        monkeypatch.setattr(twisted, "x_section", lambda s: original(s) + Multivector.basis(s.dim, [0]))
        s = TwistedStructure(example41.algebra, example41.pi, example41.psi, example41.volume, "shifted")
        assert check_x_volume(s) is not None
        report = runner.run(Command.IDENTITIES, lie(s))
        assert "x_volume" in [c.name for c in report.failures]

    def test_identities_skip_twisted_checks_when_untwisted(
        self, runner: SuiteRunner, example5_untwisted: TwistedStructure
    ):
        report = runner.run(Command.IDENTITIES, lie(example5_untwisted))
        names = [c.name for c in report.checks]
        assert "chain_map" not in names
        assert "order" not in names
        assert "star_z" in names

    def test_all_prefixes_check_names(self, runner: SuiteRunner, example41: TwistedStructure):
        report = runner.run(Command.ALL, lie(example41))
        assert report.passed
        prefixes = {c.name.split(".")[0] for c in report.checks}
        assert prefixes == {"verify", "modular", "elw", "cohomology", "identities"}
        assert report.data["modular"]["Z"] == {}
        assert report.data["elw"]["elw_dual"] == {"e1": "-1"}

    def test_all_stops_after_a_failed_verify(self, runner: SuiteRunner, example5_untwisted: TwistedStructure):
        report = runner.run(Command.ALL, lie(example5_untwisted))
        assert not report.passed
        assert {c.name.split(".")[0] for c in report.checks} == {"verify"}

    def test_report_json_is_deterministic(self, runner: SuiteRunner, sl2: TwistedStructure):
        first = runner.run(Command.IDENTITIES, lie(sl2)).to_json()
        second = SuiteRunner(runner.config).run(Command.IDENTITIES, lie(sl2)).to_json()
        assert first == second


class TestRandomTrials:
    def test_random_algebras_satisfy_jacobi(self):
        # construction validates Jacobi
        assert len(random_algebras()) == 4

    def test_random_structure_is_seeded(self):
        _, algebra = random_algebras()[1]
        a = random_structure(random.Random(7), algebra, "a")
        b = random_structure(random.Random(7), algebra, "b")
        assert a.pi == b.pi and a.psi == b.psi and a.volume == b.volume

    def test_arbitrary_identities_on_random_structures(self):
        rng = random.Random(1)
        for label, algebra in random_algebras():
            s = random_structure(rng, algebra, label)
            assert check_star_z(s) is None

    def test_trials_all_pass(self, runner: SuiteRunner):
        results = runner.random_trials()
        assert len(results) == len(ARBITRARY_CHECKS) + len(TWISTED_CHECKS)
        assert all(r.passed for r in results)

    def test_minimize_keeps_a_failing_instance(self, heisenberg: TwistedStructure):
        def fails_while_pi_nonzero(s: TwistedStructure):
            return (False, True, {}) if s.pi else None

        smaller = minimize(heisenberg, fails_while_pi_nonzero)
        assert len(smaller.pi.terms) == 1
        assert not smaller.psi
        assert smaller.volume == heisenberg.volume
