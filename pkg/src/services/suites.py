"""Verification suites run by the command line.

Each suite turns a loaded structure into a ``SuiteReport``: computed values
under ``data`` and one ``CheckResult`` per asserted identity. Identity
failures are recorded, never raised; precondition failures (a structure that
is not twisted where the suite needs one) raise and end the run.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any

from src.config import settings
from src.constants import Command, SuiteLimits
from src.exceptions import InputError, NotAComplexError
from src.models.responses import CheckResult, Counterexample, SuiteReport
from src.services.cohomology import (
    betti_numbers,
    cohomology_complex,
    duality_check,
    homology_complex,
    is_unimodular,
)
from src.services.exterior import (
    ExteriorElement,
    Form,
    Multivector,
    full_mask,
    indices_of,
    monomials,
    sharp,
    star,
)
from src.services.graded_ops import (
    GradedOperator,
    bracket_mismatch,
    graded_commutator,
    is_derivation,
    operator_order,
    skew_symmetry_holds,
)
from src.services.lie_algebra import LieAlgebra, check_jacobi, infinitesimal_character
from src.services.poly_geometry import (
    PolyTwistedStructure,
    default_degree_bound,
    divergence_relation,
    elw_factor_two,
    gauge_modular_correspondence,
    gauge_transform,
    hamiltonian,
    hamiltonian_by_bracket,
    hamiltonian_morphism,
    hamiltonian_potential,
    jacobi_anomaly,
    modular_vector_field,
)
from src.services.polynomial import Poly
from src.services.twisted import (
    TwistedReport,
    TwistedStructure,
    chain_map_mismatch,
    character_decomposition,
    coboundary_relation,
    d_pi_psi,
    dual_algebra,
    elw_class_of_dual,
    elw_generator_formula,
    extended_bracket,
    generator_report,
    half_class_criterion,
    modular_section,
    nondegenerate_twist,
    raw_modular_section,
    require_twisted,
    sharp_is_morphism,
    star_relations,
    volume_generator_relations,
    x_by_volume,
    y_trace_relation,
)
from src.utils.structure_io import LoadedStructure, element_to_json, poly_to_json

logger = logging.getLogger(__name__)

# (lhs, rhs, extra inputs) of a failing identity
Witness = tuple[Any, Any, dict[str, Any]]
IdentityCheck = Callable[[TwistedStructure], Witness | None]


@dataclass(frozen=True)
class SuiteConfig:
    """Per-run knobs; defaults come from settings."""

    trials: int = settings.trials
    seed: int = settings.seed
    degree_bound: int | None = settings.degree_bound
    random_dim: int = settings.random_dim


# Identity witnesses


def _names(s: TwistedStructure) -> list[str]:
    return s.algebra.basis


def _element_witness(s: TwistedStructure, lhs: ExteriorElement, rhs: ExteriorElement) -> Witness | None:
    if lhs == rhs:
        return None
    return element_to_json(lhs, _names(s)), element_to_json(rhs, _names(s)), {}


def _operator_witness(s: TwistedStructure, lhs: GradedOperator, rhs: GradedOperator) -> Witness | None:
    m = lhs.mismatch(rhs)
    if m is None:
        return None
    names = _names(s)
    monomial = [f"{names[i]}*" if lhs.cls is Form else names[i] for i in indices_of(m)]
    return (
        element_to_json(lhs.column(m), names),
        element_to_json(rhs.column(m), names),
        {"monomial": monomial},
    )


def _bool_witness(holds: bool) -> Witness | None:
    return None if holds else (False, True, {})


def check_self(s: TwistedStructure) -> Witness | None:
    ops = s.operators
    return _operator_witness(
        s, graded_commutator(ops.i_pi, ops.delta), ops.del_underline.scaled(2) - ops.i_y
    )


def check_del_underline_volume(s: TwistedStructure) -> Witness | None:
    return _element_witness(s, s.operators.del_underline(s.volume), 2 * star(s.volume, s.y))


def check_star_x(s: TwistedStructure) -> Witness | None:
    return _element_witness(s, s.operators.del_pi(s.volume), -star(s.volume, s.x))


def check_x_volume(s: TwistedStructure) -> Witness | None:
    return _element_witness(s, s.x, x_by_volume(s))


def check_star_z(s: TwistedStructure) -> Witness | None:
    return _element_witness(s, star(s.volume, raw_modular_section(s)), -s.operators.generator(s.volume))


def check_star_z_quasi(s: TwistedStructure) -> Witness | None:
    ops = s.operators
    rhs = -ops.d_quasi(star(s.volume, s.pi)) - 2 * ops.del_underline(s.volume)
    return _element_witness(s, star(s.volume, raw_modular_section(s)), rhs)


def check_y_trace(s: TwistedStructure) -> Witness | None:
    return _bool_witness(y_trace_relation(s))


def check_skew(s: TwistedStructure) -> Witness | None:
    return _bool_witness(skew_symmetry_holds(s.operators.generator))


def check_order(s: TwistedStructure) -> Witness | None:
    order = operator_order(s.operators.generator)
    return None if order <= 2 else (order, "<= 2", {})


def check_chain_map(s: TwistedStructure) -> Witness | None:
    found = chain_map_mismatch(s)
    if found is None:
        return None
    m, lhs, rhs = found
    names = _names(s)
    return (
        element_to_json(lhs, names),
        element_to_json(rhs, names),
        {"monomial": [f"{names[i]}*" for i in indices_of(m)]},
    )


def check_coboundary(s: TwistedStructure) -> Witness | None:
    return _bool_witness(coboundary_relation(s))


def check_generator_square(s: TwistedStructure) -> Witness | None:
    g = s.operators.generator
    return _operator_witness(s, g @ g, GradedOperator.zero(s.dim, -2, Form))


def check_generates_bracket(s: TwistedStructure) -> Witness | None:
    found = bracket_mismatch(s.operators.generator, extended_bracket(s))
    if found is None:
        return None
    a, b, lhs, rhs = found
    names = _names(s)
    return (
        element_to_json(lhs, names),
        element_to_json(rhs, names),
        {"a": [f"{names[i]}*" for i in indices_of(a)], "b": [f"{names[i]}*" for i in indices_of(b)]},
    )


ARBITRARY_CHECKS: dict[str, IdentityCheck] = {
    "self": check_self,
    "del_underline_volume": check_del_underline_volume,
    "star_x": check_star_x,
    "x_volume": check_x_volume,
    "star_z": check_star_z,
    "star_z_quasi": check_star_z_quasi,
    "y_trace": check_y_trace,
    "skew": check_skew,
    "order": check_order,
}

TWISTED_CHECKS: dict[str, IdentityCheck] = {
    "chain_map": check_chain_map,
    "coboundary": check_coboundary,
    "generator_square_zero": check_generator_square,
    "generates_bracket": check_generates_bracket,
}


# Random structures


def _algebra(basis: list[str], brackets: dict[tuple[int, int], dict[int, int]]) -> LieAlgebra:
    return LieAlgebra(basis, {k: {i: Fraction(c) for i, c in v.items()} for k, v in brackets.items()})


def random_algebras() -> list[tuple[str, LieAlgebra]]:
    """Four-dimensional algebras used by the randomized trials."""
    e = ["e1", "e2", "e3", "e4"]
    return [
        ("abelian", LieAlgebra.abelian(e)),
        ("heisenberg+line", _algebra(e, {(0, 1): {2: 1}})),
        ("aff1+aff1", _algebra(e, {(0, 1): {0: 1}, (2, 3): {2: 1}})),
        (
            "gl2",
            _algebra(
                ["e11", "e12", "e21", "e22"],
                {
                    (0, 1): {1: 1},
                    (0, 2): {2: -1},
                    (1, 2): {0: 1, 3: -1},
                    (1, 3): {1: 1},
                    (2, 3): {2: -1},
                },
            ),
        ),
    ]


def random_element(rng: random.Random, cls: type[ExteriorElement], dim: int, degree: int) -> ExteriorElement:
    bound = SuiteLimits.RANDOM_COEFF
    return cls(dim, {m: rng.randint(-bound, bound) for m in monomials(dim, degree)})


def random_structure(rng: random.Random, algebra: LieAlgebra, name: str) -> TwistedStructure:
    """Arbitrary (pi, psi) with a random nonzero multiple of the standard volume."""
    n = algebra.dim
    pi = random_element(rng, Multivector, n, 2)
    psi = random_element(rng, Form, n, 3)
    volume = Form(n, {full_mask(n): rng.randint(1, 3)})
    return TwistedStructure(algebra, pi, psi, volume, name)  # type: ignore[arg-type]


def minimize(s: TwistedStructure, check: IdentityCheck) -> TwistedStructure:
    """Greedy term deletion in pi and psi while the check keeps failing."""
    pi, psi = dict(s.pi.terms), dict(s.psi.terms)
    changed = True
    while changed:
        changed = False
        for terms in (pi, psi):
            for m in sorted(terms):
                value = terms.pop(m)
                candidate = TwistedStructure(
                    s.algebra, Multivector(s.dim, pi), Form(s.dim, psi), s.volume, s.name
                )
                if check(candidate) is not None:
                    changed = True
                else:
                    terms[m] = value
    return TwistedStructure(s.algebra, Multivector(s.dim, pi), Form(s.dim, psi), s.volume, s.name)


def _counterexample(s: TwistedStructure, witness: Witness) -> Counterexample:
    lhs, rhs, extra = witness
    names = _names(s)
    inputs: dict[str, Any] = {
        "algebra": s.name,
        "pi": element_to_json(s.pi, names),
        "psi": element_to_json(s.psi, names),
        "lambda": element_to_json(s.volume, names),
    }
    inputs.update(extra)
    return Counterexample(inputs=inputs, lhs=lhs, rhs=rhs)


def _run_identity(name: str, s: TwistedStructure, check: IdentityCheck, shrink: bool) -> CheckResult:
    witness = check(s)
    if witness is None:
        return CheckResult.ok(name)
    if shrink:
        s = minimize(s, check)
        witness = check(s) or witness
    logger.info("identity %s fails on %s", name, s.name)
    return CheckResult.failed(name, counterexample=_counterexample(s, witness))


# Runner


def _twisted_data(report: TwistedReport, names: list[str] | None) -> dict[str, Any]:
    return {
        "closed": report.closed,
        "condition": report.condition,
        "defect": element_to_json(report.defect, names),
    }


def _operator_summary(name: str, op: GradedOperator) -> dict[str, Any]:
    order = operator_order(op)
    return {
        "name": name,
        "degree": op.degree,
        "order": order,
        "is_derivation": is_derivation(op),
        "squares_to_zero": (op @ op).is_zero(),
    }


class SuiteRunner:
    """Runs the named suites on loaded structures."""

    def __init__(self, config: SuiteConfig | None = None):
        self.config = config or SuiteConfig()

    def run(self, command: str, loaded: LoadedStructure) -> SuiteReport:
        logger.info("running %s on %s", command, loaded.name)
        handlers: dict[str, Callable[[LoadedStructure], SuiteReport]] = {
            Command.VERIFY: self.verify,
            Command.MODULAR: self.modular,
            Command.ELW: self.elw,
            Command.COHOMOLOGY: self.cohomology,
            Command.IDENTITIES: self.identities,
            Command.POLY: self.poly,
            Command.GAUGE: self.gauge,
            Command.ALL: self.all,
        }
        if command not in handlers:
            raise InputError(f"unknown command '{command}'")
        return handlers[command](loaded)

    # Structure accessors

    @staticmethod
    def _lie(loaded: LoadedStructure, command: str) -> TwistedStructure:
        if loaded.structure is None:
            raise InputError(f"'{command}' needs a structure on a Lie algebra")
        return loaded.structure

    @staticmethod
    def _poly(loaded: LoadedStructure, command: str) -> PolyTwistedStructure:
        if loaded.poly is None:
            raise InputError(f"'{command}' needs a structure on R^n (base_dim)")
        return loaded.poly

    def _bound(self, *elements: ExteriorElement) -> int:
        if self.config.degree_bound is not None:
            return self.config.degree_bound
        return default_degree_bound(*elements)

    # Suites

    def verify(self, loaded: LoadedStructure) -> SuiteReport:
        if loaded.poly is not None:
            report, names = loaded.poly.report, None
        else:
            s = self._lie(loaded, Command.VERIFY)
            report, names = s.report, _names(s)
        checks = [
            CheckResult.ok("closed") if report.closed else CheckResult.failed("closed", "d psi != 0"),
            CheckResult.ok("condition")
            if report.condition
            else CheckResult.failed(
                "condition",
                "1/2[pi, pi] != (wedge^3 pi#) psi",
                Counterexample(inputs={}, lhs=element_to_json(report.defect, names)),
            ),
        ]
        return SuiteReport.from_checks(
            Command.VERIFY, loaded.name, checks, {"twisted": _twisted_data(report, names)}
        )

    def modular(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._lie(loaded, Command.MODULAR)
        z = modular_section(s)
        names = _names(s)
        checks = [
            CheckResult(name="z_cocycle", passed=not d_pi_psi(s, z)),
            CheckResult(name="volume_independence", passed=modular_section(s.rescaled(3)) == z),
            CheckResult(name="y_trace", passed=y_trace_relation(s)),
        ]
        checks += [CheckResult(name=k, passed=v) for k, v in star_relations(s).items()]
        data = {
            "Y": element_to_json(s.y, names),
            "X": element_to_json(s.x, names),
            "Z": element_to_json(z, names),
            "unimodular": is_unimodular(s),
        }
        return SuiteReport.from_checks(Command.MODULAR, loaded.name, checks, data)

    def elw(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._lie(loaded, Command.ELW)
        names = _names(s)
        elw = elw_class_of_dual(s)
        chi = infinitesimal_character(s.algebra)
        criterion = half_class_criterion(s)
        checks = [
            CheckResult(name="dual_jacobi", passed=check_jacobi(dual_algebra(s))),
            CheckResult(name="sharp_morphism", passed=sharp_is_morphism(s)),
            CheckResult(name="generator_formula", passed=elw_generator_formula(s)),
            CheckResult(name="character_decomposition", passed=character_decomposition(s)),
            CheckResult(name="half_class_equivalence", passed=criterion == (not sharp(s.pi, chi))),
        ]
        data = {
            "elw_dual": element_to_json(elw, names),
            "character": element_to_json(chi, names),
            "half_class_criterion": criterion,
            "elw_is_twice_z": elw == 2 * modular_section(s),
        }
        return SuiteReport.from_checks(Command.ELW, loaded.name, checks, data)

    def cohomology(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._lie(loaded, Command.COHOMOLOGY)
        require_twisted(s)
        checks: list[CheckResult] = []
        data: dict[str, Any] = {}
        for key, build in (("cohomology", cohomology_complex), ("homology", homology_complex)):
            try:
                data[key] = betti_numbers(build(s))
                checks.append(CheckResult.ok(f"{key}_complex"))
            except NotAComplexError as e:
                data[key] = None
                checks.append(CheckResult.failed(f"{key}_complex", e.message))
        bv = s.operators.bv_lambda
        checks.append(CheckResult(name="bv_lambda_square_zero", passed=(bv @ bv).is_zero()))
        unimodular = is_unimodular(s)
        data["unimodular"] = unimodular
        data["duality"] = None
        if unimodular:
            duality = duality_check(s)
            data["duality"] = {
                "left": duality.left,
                "right": duality.right,
                "isomorphic": duality.isomorphic,
                "conjugate": duality.conjugate,
            }
            checks.append(CheckResult(name="duality", passed=duality.isomorphic))
            checks.append(CheckResult(name="duality_conjugate", passed=duality.conjugate))
        return SuiteReport.from_checks(Command.COHOMOLOGY, loaded.name, checks, data)

    def identities(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._lie(loaded, Command.IDENTITIES)
        twisted = s.report.holds
        checks: list[CheckResult] = []
        for name, check in ARBITRARY_CHECKS.items():
            if name == "order" and s.dim > SuiteLimits.ORDER_CHECK_MAX_DIM:
                continue
            checks.append(_run_identity(name, s, check, shrink=False))
        if twisted:
            for name, check in TWISTED_CHECKS.items():
                checks.append(_run_identity(name, s, check, shrink=False))
            report = generator_report(s)
            checks.append(CheckResult(name="cocycle_lemma", passed=report.cocycle_lemma))
            checks.append(CheckResult(name="sharp_morphism", passed=sharp_is_morphism(s)))
            checks += [
                CheckResult(name=k, passed=v) for k, v in volume_generator_relations(s).items()
            ]
        data: dict[str, Any] = {}
        if s.dim <= SuiteLimits.ORDER_CHECK_MAX_DIM:
            ops = s.operators
            summaries = [
                _operator_summary("i_pi", ops.i_pi),
                _operator_summary("delta", ops.delta),
                _operator_summary("del_underline", ops.del_underline),
                _operator_summary("d_underline", ops.d_underline),
                _operator_summary("generator", ops.generator),
            ]
            data["operators"] = summaries
            by_name = {entry["name"]: entry for entry in summaries}
            checks += [
                CheckResult(
                    name="i_pi_order", passed=by_name["i_pi"]["order"] == (2 if s.pi else 0)
                ),
                CheckResult(name="delta_derivation", passed=by_name["delta"]["is_derivation"]),
                CheckResult(
                    name="d_underline_derivation", passed=by_name["d_underline"]["is_derivation"]
                ),
                CheckResult(
                    name="del_underline_low_degrees",
                    passed=by_name["del_underline"]["order"] <= 2
                    and all(
                        not ops.del_underline.column(m)
                        for p in (0, 1)
                        for m in monomials(s.dim, p)
                    ),
                ),
            ]
        checks += self.random_trials()
        data["identities"] = {c.name: c.passed for c in checks}
        return SuiteReport.from_checks(Command.IDENTITIES, loaded.name, checks, data)

    def random_trials(self) -> list[CheckResult]:
        """Seeded trials: arbitrary (pi, psi) and maximal-rank twisted structures."""
        rng = random.Random(self.config.seed)
        algebras = [a for a in random_algebras() if a[1].dim == self.config.random_dim]
        if not algebras:
            algebras = [(f"abelian{self.config.random_dim}", LieAlgebra.abelian(
                [f"e{i + 1}" for i in range(self.config.random_dim)]
            ))]
        failures: dict[str, CheckResult] = {}
        for trial in range(self.config.trials):
            label, algebra = algebras[trial % len(algebras)]
            s = random_structure(rng, algebra, f"{label} trial {trial}")
            for name, check in ARBITRARY_CHECKS.items():
                key = f"random.{name}"
                if key not in failures and check(s) is not None:
                    failures[key] = _run_identity(key, s, check, shrink=True)
            try:
                t = nondegenerate_twist(algebra, s.pi, f"{label} twist {trial}")  # type: ignore[arg-type]
            except InputError:
                continue
            for name, check in TWISTED_CHECKS.items():
                key = f"random.{name}"
                if key not in failures and check(t) is not None:
                    failures[key] = _run_identity(key, t, check, shrink=False)
        names = [f"random.{n}" for n in [*ARBITRARY_CHECKS, *TWISTED_CHECKS]]
        return [failures.get(n, CheckResult.ok(n, f"{self.config.trials} trials")) for n in names]

    def poly(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._poly(loaded, Command.POLY)
        z = modular_vector_field(s)
        factor = elw_factor_two(s)
        fs = loaded.test_functions
        checks = [
            CheckResult(name="z_cocycle", passed=not s.d_pi_psi(z)),
            CheckResult(name="factor_two", passed=factor.holds),
            CheckResult(
                name="hamiltonian_formulas",
                passed=all(hamiltonian(s.pi, f) == hamiltonian_by_bracket(s.pi, f) for f in fs),
            ),
            CheckResult(name="divergence", passed=all(divergence_relation(s, f) for f in fs)),
            CheckResult(
                name="jacobi_anomaly",
                passed=all(jacobi_anomaly(s, *triple).holds for triple in combinations(fs, 3)),
            ),
            CheckResult(
                name="hamiltonian_morphism",
                passed=all(
                    lhs == rhs for lhs, rhs in (hamiltonian_morphism(s, f, g) for f, g in combinations(fs, 2))
                ),
            ),
        ]
        bound = self._bound(s.pi, s.psi)
        potential: Poly | None = hamiltonian_potential(s.pi, z, bound)
        data = {
            "twisted": _twisted_data(s.report, None),
            "Y": element_to_json(s.y),
            "X": element_to_json(s.x),
            "Z": element_to_json(z),
            "U": element_to_json(factor.u),
            "degree_bound": bound,
            "z_potential": poly_to_json(potential) if potential is not None else None,
        }
        return SuiteReport.from_checks(Command.POLY, loaded.name, checks, data)

    def gauge(self, loaded: LoadedStructure) -> SuiteReport:
        s = self._poly(loaded, Command.GAUGE)
        if loaded.gauge is None:
            raise InputError("'gauge' needs a 2-form B in the structure file")
        result = gauge_transform(s, loaded.gauge)
        bound = self._bound(s.pi, s.psi, loaded.gauge)
        report = gauge_modular_correspondence(s, loaded.gauge, bound)
        checks = [
            CheckResult(name="twisted_preserved", passed=report.twisted_preserved),
            CheckResult(
                name="modular_correspondence",
                passed=report.correspondence,
                detail=None if report.correspondence else f"no potential up to degree {bound}",
            ),
        ]
        data = {
            "det": str(result.det),
            "pi_prime": element_to_json(result.structure.pi),
            "psi_prime": element_to_json(result.structure.psi),
            "Z": element_to_json(report.z),
            "Z_prime": element_to_json(report.z_prime),
            "predicted": element_to_json(report.predicted),
            "alternative": element_to_json(report.alternative),
            "alternative_holds": report.alternative_potential is not None,
            "degree_bound": bound,
        }
        return SuiteReport.from_checks(Command.GAUGE, loaded.name, checks, data)

    def all(self, loaded: LoadedStructure) -> SuiteReport:
        verified = self.verify(loaded)
        reports = [verified]
        if verified.passed:
            if loaded.poly is not None:
                reports.append(self.poly(loaded))
                if loaded.gauge is not None:
                    reports.append(self.gauge(loaded))
            else:
                reports += [self.modular(loaded), self.elw(loaded), self.cohomology(loaded)]
                reports.append(self.identities(loaded))
        checks: list[CheckResult] = []
        data: dict[str, Any] = {}
        for report in reports:
            checks += [c.model_copy(update={"name": f"{report.command}.{c.name}"}) for c in report.checks]
            data[report.command] = report.data
        return SuiteReport.from_checks(Command.ALL, loaded.name, checks, data)

