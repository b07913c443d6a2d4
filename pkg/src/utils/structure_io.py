"""Structure file loading and element serialization.

Structure files are JSON or YAML. Point structures name their basis in
``algebra.basis``; forms may use either the basis name or ``name*``.
Structures on R^n use the frames ``d1..dn`` for fields and ``dx1..dxn`` for
forms.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ValidationError

from src.constants import FilePath, StructureKey
from src.exceptions import (
    DimensionMismatchError,
    MalformedStructureError,
    UnknownBasisError,
)
from src.models.schemas import (
    AlgebraSchema,
    FieldTermSchema,
    PolySchema,
    PolyStructureSchema,
    StructureSchema,
    TermSchema,
)
from src.services.exterior import ExteriorElement, Form, Multivector, indices_of
from src.services.lie_algebra import LieAlgebra
from src.services.poly_geometry import (
    PolyForm,
    PolyMultivector,
    PolyTwistedStructure,
    check_base_dim,
)
from src.services.polynomial import Poly
from src.services.twisted import TwistedStructure

logger = logging.getLogger(__name__)


def _location(loc: tuple[int | str, ...]) -> str:
    path = ""
    for part in loc:
        path += f"[{part}]" if isinstance(part, int) else (f".{part}" if path else str(part))
    return path or "<root>"


def _validate(schema: type[BaseModel], data: Any, source: str) -> Any:
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = _location(tuple(first["loc"]))
        raise MalformedStructureError(
            f"{source}: {where}: {first['msg']}", path=where, errors=e.error_count()
        ) from None


# Reading


def read_document(path: Path) -> dict[str, Any]:
    """Parse a JSON or YAML document into a mapping."""
    try:
        text = path.read_text()
    except OSError as e:
        raise MalformedStructureError(f"cannot read {path}: {e.strerror}") from None
    try:
        if path.suffix in (".yaml", ".yml"):
            data = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedStructureError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f":{mark.line + 1}:{mark.column + 1}" if mark else ""
        raise MalformedStructureError(f"{path}{where}: invalid YAML") from None
    if not isinstance(data, dict):
        raise MalformedStructureError(f"{path}: top level must be a mapping")
    return data


@dataclass
class LoadedStructure:
    """A parsed structure file."""

    name: str
    path: Path | None
    structure: TwistedStructure | None = None
    poly: PolyTwistedStructure | None = None
    gauge: PolyForm | None = None
    test_functions: list[Poly] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return "poly" if self.poly is not None else "lie"

    @property
    def dim(self) -> int:
        if self.poly is not None:
            return self.poly.dim
        assert self.structure is not None
        return self.structure.dim


# Point structures


def _index(names: list[str], name: str, where: str, forms: bool = False) -> int:
    candidate = name[:-1] if forms and name.endswith("*") else name
    if candidate in names:
        return names.index(candidate)
    raise UnknownBasisError(f"{where}: unknown basis element '{name}'", name=name, path=where)


def build_algebra(schema: AlgebraSchema) -> LieAlgebra:
    names = schema.basis
    constants: dict[tuple[int, int], dict[int, Fraction]] = {}
    for n, bracket in enumerate(schema.brackets):
        where = f"algebra.brackets[{n}]"
        i, j = _index(names, bracket.x, where), _index(names, bracket.y, where)
        if i == j:
            raise MalformedStructureError(f"{where}: [x, x] is always zero")
        sign = 1 if i < j else -1
        key = (min(i, j), max(i, j))
        target = constants.setdefault(key, {})
        for out, coeff in bracket.value.items():
            k = _index(names, out, f"{where}.value")
            target[k] = target.get(k, Fraction(0)) + sign * Fraction(coeff)
    form = None
    if schema.bilinear_form is not None:
        form = [[Fraction(x) for x in row] for row in schema.bilinear_form]
    return LieAlgebra(names, constants, form)


def build_element(
    cls: type[ExteriorElement], names: list[str], terms: list[TermSchema], where: str
) -> ExteriorElement:
    forms = cls.kind == "form"
    result = cls(len(names))
    for n, term in enumerate(terms):
        idx = [_index(names, name, f"{where}[{n}]", forms) for name in term.indices]
        result = result + cls.basis(len(names), idx, Fraction(term.coeff))
    return result


def structure_from_data(data: dict[str, Any], source: str = "<data>") -> TwistedStructure:
    schema: StructureSchema = _validate(StructureSchema, data, source)
    algebra = build_algebra(schema.algebra)
    names = algebra.basis
    pi = build_element(Multivector, names, schema.pi, StructureKey.PI)
    psi = build_element(Form, names, schema.psi, StructureKey.PSI)
    volume = build_element(Form, names, schema.volume, StructureKey.LAMBDA)
    return TwistedStructure(algebra, pi, psi, volume, schema.name or source)  # type: ignore[arg-type]


# Structures on R^n


def frame_names(n: int, forms: bool) -> list[str]:
    prefix = StructureKey.FORM_FRAME if forms else StructureKey.VECTOR_FRAME
    return [f"{prefix}{i + 1}" for i in range(n)]


def build_poly(n: int, terms: PolySchema, where: str) -> Poly:
    result = Poly.zero(n)
    for k, term in enumerate(terms):
        if len(term.monomial) != n:
            raise DimensionMismatchError(
                f"{where}[{k}]: monomial has {len(term.monomial)} exponents, base has {n}"
            )
        result = result + Poly.monomial(term.monomial, Fraction(term.coeff))
    return result


def build_field(
    cls: type[ExteriorElement], n: int, terms: list[FieldTermSchema], where: str
) -> ExteriorElement:
    names = frame_names(n, forms=cls.kind == "form")
    result = cls(n)
    for k, term in enumerate(terms):
        idx = [_index(names, name, f"{where}[{k}]") for name in term.indices]
        if isinstance(term.coeff, str):
            coeff: Poly = Poly.constant(n, Fraction(term.coeff))
        else:
            coeff = build_poly(n, term.coeff, f"{where}[{k}].coeff")
        result = result + cls.basis(n, idx, coeff)
    return result


def poly_structure_from_data(data: dict[str, Any], source: str = "<data>") -> LoadedStructure:
    schema: PolyStructureSchema = _validate(PolyStructureSchema, data, source)
    n = schema.base_dim
    check_base_dim(n)
    pi = build_field(PolyMultivector, n, schema.pi, StructureKey.PI)
    psi = build_field(PolyForm, n, schema.psi, StructureKey.PSI)
    volume = None
    if schema.volume is not None:
        volume = build_field(PolyForm, n, schema.volume, StructureKey.LAMBDA)
    name = schema.name or source
    structure = PolyTwistedStructure(pi, psi, volume, name)  # type: ignore[arg-type]
    gauge = None
    if schema.gauge is not None:
        gauge = build_field(PolyForm, n, schema.gauge, StructureKey.GAUGE)
    functions = [
        build_poly(n, f, f"{StructureKey.TEST_FUNCTIONS}[{k}]")
        for k, f in enumerate(schema.test_functions)
    ]
    return LoadedStructure(
        name=name,
        path=None,
        poly=structure,
        gauge=gauge,  # type: ignore[arg-type]
        test_functions=functions,
    )


def load_structure(path: str | Path) -> LoadedStructure:
    """Load a point or polynomial structure file, dispatching on ``base_dim``."""
    path = Path(path)
    data = read_document(path)
    source = path.stem
    logger.debug("loading %s", path)
    if StructureKey.BASE_DIM in data:
        loaded = poly_structure_from_data(data, source)
        loaded.path = path
        return loaded
    structure = structure_from_data(data, source)
    return LoadedStructure(name=structure.name, path=path, structure=structure)


class StructureRegistry:
    """Bundled structure files and their expected reports."""

    def __init__(self, base_path: str | Path | None = None):
        if base_path is None:
            base_path = Path(__file__).resolve().parents[2] / FilePath.STRUCTURES_DIR
        self.base_path = Path(base_path).resolve()

    def files(self) -> list[Path]:
        if not self.base_path.is_dir():
            return []
        return sorted(
            p
            for p in self.base_path.iterdir()
            if p.suffix in (".json", ".yaml", ".yml") and not p.name.endswith(FilePath.EXPECTED_SUFFIX)
        )

    def expected_for(self, path: Path) -> dict[str, Any] | None:
        expected = path.with_name(path.stem + FilePath.EXPECTED_SUFFIX)
        if not expected.exists():
            return None
        return json.loads(expected.read_text())

    def list_structures(self) -> list[dict[str, Any]]:
        """Summaries of every readable structure file."""
        entries = []
        for path in self.files():
            try:
                data = read_document(path)
            except MalformedStructureError as e:
                logger.warning("skipping %s: %s", path.name, e.message)
                continue
            poly = StructureKey.BASE_DIM in data
            if poly:
                dim = data.get(StructureKey.BASE_DIM)
            else:
                dim = len(data.get(StructureKey.ALGEBRA, {}).get(StructureKey.BASIS, []))
            entries.append(
                {
                    "name": data.get("name", path.stem),
                    "file": path.name,
                    "kind": "poly" if poly else "lie",
                    "dim": dim,
                    "description": data.get("description", ""),
                }
            )
        return entries


# Serialization


def rational(value: Fraction | int) -> str:
    return str(Fraction(value))


def poly_to_json(p: Poly) -> list[dict[str, Any]]:
    return [{"monomial": list(powers), "coeff": rational(c)} for powers, c in p.items()]


def coefficient_to_json(c: Any) -> Any:
    if isinstance(c, Poly):
        if c.is_constant():
            return rational(c.as_constant())
        return poly_to_json(c)
    return rational(c)


def element_names(element: ExteriorElement, basis: list[str] | None) -> list[str]:
    """Names of the degree-1 generators for an element."""
    forms = element.kind == "form"
    if basis is None:
        return frame_names(element.dim, forms)
    return [f"{b}*" for b in basis] if forms else list(basis)


def element_to_json(element: ExteriorElement, basis: list[str] | None = None) -> Any:
    """Degree-1 elements as {name: coeff}; anything else as a term list."""
    names = element_names(element, basis)
    degrees = element.degrees()
    if degrees <= {1}:
        return {names[indices_of(m)[0]]: coefficient_to_json(c) for m, c in element.items()}
    return [
        {"indices": [names[i] for i in indices_of(m)], "coeff": coefficient_to_json(c)}
        for m, c in element.items()
    ]
