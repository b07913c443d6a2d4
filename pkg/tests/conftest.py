"""Shared fixtures: small Lie algebras and the structures built on them."""

from fractions import Fraction
from pathlib import Path

import pytest

from src.services.exterior import Form, Multivector
from src.services.lie_algebra import LieAlgebra
from src.services.suites import SuiteConfig, SuiteRunner
from src.services.twisted import TwistedStructure
from src.utils.structure_io import StructureRegistry

STRUCTURES_DIR = Path(__file__).resolve().parents[1] / "structures"


def _constants(raw: dict[tuple[int, int], dict[int, int]]) -> dict[tuple[int, int], dict[int, Fraction]]:
    return {k: {i: Fraction(c) for i, c in v.items()} for k, v in raw.items()}


# Algebras


@pytest.fixture
def sl2_algebra() -> LieAlgebra:
    """Basis H, Xp, Xm with the trace form."""
    return LieAlgebra(
        ["H", "Xp", "Xm"],
        _constants({(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}),
        [[2, 0, 0], [0, 0, 1], [0, 1, 0]],
    )


@pytest.fixture
def aff1_algebra() -> LieAlgebra:
    """[e1, e2] = e1."""
    return LieAlgebra(["e1", "e2"], _constants({(0, 1): {0: 1}}))


@pytest.fixture
def heisenberg_algebra() -> LieAlgebra:
    """[e1, e2] = e3, plus the central line e4."""
    return LieAlgebra(["e1", "e2", "e3", "e4"], _constants({(0, 1): {2: 1}}))


@pytest.fixture
def affine_algebra() -> LieAlgebra:
    """gl(2) acting on the translations u1, u2 of the plane."""
    return LieAlgebra(
        ["e11", "e12", "e21", "e22", "u1", "u2"],
        _constants(
            {
                (0, 1): {1: 1},
                (0, 2): {2: -1},
                (1, 2): {0: 1, 3: -1},
                (1, 3): {1: 1},
                (2, 3): {2: -1},
                (0, 4): {4: 1},
                (1, 5): {4: 1},
                (2, 4): {5: 1},
                (3, 5): {5: 1},
            }
        ),
    )


@pytest.fixture
def so3_algebra() -> LieAlgebra:
    """[e1, e2] = e3 and cyclic, with the identity form."""
    identity = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    return LieAlgebra(
        ["e1", "e2", "e3"], _constants({(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}), identity
    )


# Structures


@pytest.fixture
def sl2(sl2_algebra: LieAlgebra) -> TwistedStructure:
    """r = Xp ^ H, psi = 0, lambda = H* ^ Xp* ^ Xm*."""
    return TwistedStructure(
        sl2_algebra,
        Multivector.basis(3, [1, 0]),
        Form(3),
        Form.basis(3, [0, 1, 2]),
        "sl2",
    )


@pytest.fixture
def example41(aff1_algebra: LieAlgebra) -> TwistedStructure:
    """r = e1 ^ e2 on the nonabelian plane algebra."""
    return TwistedStructure(
        aff1_algebra, Multivector.basis(2, [0, 1]), Form(2), Form.basis(2, [0, 1]), "example41"
    )


@pytest.fixture
def heisenberg(heisenberg_algebra: LieAlgebra) -> TwistedStructure:
    """pi = e12 + e34, psi = -e^124."""
    return TwistedStructure(
        heisenberg_algebra,
        Multivector.basis(4, [0, 1]) + Multivector.basis(4, [2, 3]),
        Form.basis(4, [0, 1, 3], -1),
        Form.basis(4, [0, 1, 2, 3]),
        "heisenberg",
    )


@pytest.fixture
def example5(affine_algebra: LieAlgebra) -> TwistedStructure:
    """r = e11 ^ e22 + u1 ^ u2, psi = -(e11* + e22*) ^ u1* ^ u2*."""
    return TwistedStructure(
        affine_algebra,
        Multivector.basis(6, [0, 3]) + Multivector.basis(6, [4, 5]),
        Form.basis(6, [0, 4, 5], -1) + Form.basis(6, [3, 4, 5], -1),
        Form.basis(6, [3, 0, 1, 2, 5, 4]),
        "example5",
    )


@pytest.fixture
def example5_untwisted(example5: TwistedStructure) -> TwistedStructure:
    return example5.with_psi(Form(6))


# Files and runners


@pytest.fixture
def structures_dir() -> Path:
    return STRUCTURES_DIR


@pytest.fixture
def registry() -> StructureRegistry:
    return StructureRegistry(STRUCTURES_DIR)


@pytest.fixture
def runner() -> SuiteRunner:
    return SuiteRunner(SuiteConfig(trials=4, seed=0, degree_bound=None, random_dim=4))
