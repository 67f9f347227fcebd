"""Lattice file model: a Gram matrix with integer or "p/q" entries."""
import json
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_serializer, field_validator

from ..exceptions import FixtureError
from ..services.lattice import Lattice


def parse_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Parse an int, an integral string or a "p/q" string.

    Raises:
        ValueError: On anything else (floats included)
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not Gram entries")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            num, _, den = text.partition("/")
            return Fraction(int(num), int(den) if den else 1)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational entry: {value!r}") from exc
    raise ValueError(f"unsupported Gram entry {value!r}")


def render_rational(x: Fraction) -> Union[int, str]:
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class LatticeFile(BaseModel):
    """JSON lattice file ``{"gram": [[...]], "name": ...}``."""

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        json_schema_extra={"example": {"gram": [[2, -1], [-1, 2]], "name": "A2"}},
    )

    gram: List[List[Fraction]] = Field(..., description="Symmetric Gram matrix, ints or 'p/q' strings")
    name: Optional[str] = Field(None, description="Display name")

    @field_validator("gram", mode="before")
    @classmethod
    def _parse_gram(cls, value):
        if not isinstance(value, list) or not value:
            raise ValueError("gram must be a non-empty list of rows")
        rows = [[parse_rational(x) for x in row] for row in value]
        if any(len(row) != len(rows) for row in rows):
            raise ValueError("gram must be square")
        return rows

    @field_serializer("gram")
    def _render_gram(self, gram: List[List[Fraction]]):
        return [[render_rational(x) for x in row] for row in gram]

    def to_lattice(self) -> Lattice:
        return Lattice.from_rows(self.gram, self.name)

    @classmethod
    def from_lattice(cls, lattice: Lattice) -> "LatticeFile":
        return cls(gram=[[Fraction(x) for x in row] for row in lattice.gram], name=lattice.name)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "LatticeFile":
        """Read and validate a lattice file.

        Raises:
            FixtureError: If the file is missing, not JSON, or malformed
        """
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls.model_validate(data)
        except (OSError, json.JSONDecodeError, ValidationError) as exc:
            raise FixtureError(f"cannot read lattice file {path}: {exc}") from exc
