"""Structure file schemas.

Rationals are written as strings "p/q" (integers are accepted too) and are
checked here; turning names into basis indices happens in the loader, which
knows the basis.
"""

from fractions import Fraction
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator


def _rational(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValueError("rationals are written as integers or 'p/q' strings")
    try:
        Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e
    return str(value).strip()


Rational = Annotated[str, BeforeValidator(_rational)]


class TermSchema(BaseModel):
    """coeff times the wedge of the named basis elements."""

    model_config = ConfigDict(extra="forbid")

    indices: list[str] = Field(default_factory=list)
    coeff: Rational = "1"


class BracketSchema(BaseModel):
    """[x, y] = sum value[name] * name."""

    model_config = ConfigDict(extra="forbid")

    x: str
    y: str
    value: dict[str, Rational]


class AlgebraSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    basis: list[str] = Field(min_length=1)
    brackets: list[BracketSchema] = Field(default_factory=list)
    bilinear_form: list[list[Rational]] | None = None


class StructureSchema(BaseModel):
    """Twisted structure on a Lie algebra."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str | None = None
    description: str | None = None
    algebra: AlgebraSchema
    pi: list[TermSchema] = Field(default_factory=list)
    psi: list[TermSchema] = Field(default_factory=list)
    volume: list[TermSchema] = Field(alias="lambda", min_length=1)


# Polynomial structures on R^n


class PolyTermSchema(BaseModel):
    """coeff * x^monomial."""

    model_config = ConfigDict(extra="forbid")

    monomial: list[int]
    coeff: Rational = "1"

    @model_validator(mode="after")
    def _nonnegative(self) -> "PolyTermSchema":
        if any(k < 0 for k in self.monomial):
            raise ValueError("exponents must be nonnegative")
        return self


PolySchema = list[PolyTermSchema]


class FieldTermSchema(BaseModel):
    """Polynomial (or constant) coefficient times a frame monomial d_I or dx_I."""

    model_config = ConfigDict(extra="forbid")

    indices: list[str] = Field(default_factory=list)
    coeff: Rational | PolySchema = "1"


class PolyStructureSchema(BaseModel):
    """Twisted structure on R^n with a volume c dx1^...^dxn."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    name: str | None = None
    description: str | None = None
    base_dim: int = Field(ge=1)
    pi: list[FieldTermSchema] = Field(default_factory=list)
    psi: list[FieldTermSchema] = Field(default_factory=list)
    volume: list[FieldTermSchema] | None = Field(default=None, alias="lambda")
    gauge: list[FieldTermSchema] | None = Field(default=None, alias="B")
    test_functions: list[PolySchema] = Field(default_factory=list)
