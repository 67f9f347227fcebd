"""Fixture specs for the Enriques setups and their built form."""
import json
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..exceptions import FixtureError


class QType(str, Enum):
    """Root type of Q(-1/2), the orthogonal complement of S_Y(2) in S_X."""

    A6 = "A6"
    E6 = "E6"
    A8 = "A8"


class FixtureExpected(BaseModel):
    """Values a built fixture and its Borcherds run are checked against."""

    model_config = ConfigDict(populate_by_name=True)

    root_type: str = Field(..., description="ADE type of the roots of P, e.g. '8A1+2D4'")
    oq_order: int = Field(..., alias="OQ_order", description="|O(Q)|")
    wall_count: Optional[int] = Field(None, description="Walls of the initial chamber")
    r_count: Optional[int] = Field(None, alias="R_count", description="Chamber classes found by the BFS")
    stabilizer_order: Optional[int] = Field(None, description="|aut_s(Y, D0)|")
    outer_walls: Optional[int] = Field(None, description="Outer walls of D0")
    wall_orbits: Optional[List[int]] = Field(None, description="Orbit sizes of walls(D0), sorted descending")
    type_counts: Optional[Dict[str, int]] = Field(
        None, description="Chamber classes per (stabilizer order, outer walls) type"
    )
    mod2_order: Optional[int] = Field(None, description="Order of the image in O(S_Y tensor F_2)")
    symmetric_degree: Optional[int] = Field(None, description="n with image isomorphic to S_n")


class FixtureSpec(BaseModel):
    """Input of the fixture builder."""

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "name": "f7",
                "q_type": "A6",
                "transcendental_genus": "II_(2,4)2^4 7^-1",
                "expected": {"root_type": "8A1+2D4", "OQ_order": 10080, "R_count": 2},
            }
        }
    )

    name: str = Field(..., min_length=1)
    q_type: QType
    transcendental_genus: str = Field(..., description="Genus of T_X; S_X is its complement in the K3 lattice")
    expected: FixtureExpected


class BuiltFixture(BaseModel):
    """Embeddings S_Y(2) -> S_X -> L26 plus the data of the initial chamber."""

    model_config = ConfigDict(populate_by_name=True)

    name: str
    l26: List[List[int]] = Field(..., alias="L26", description="Gram of the even unimodular lattice of signature (1,25)")
    sx_in_l26: List[List[int]] = Field(..., alias="SX_in_L26", description="Basis of S_X in L26 coordinates")
    sy2_in_sx: List[List[int]] = Field(..., alias="SY2_in_SX", description="Basis of S_Y(2) in S_X coordinates")
    alpha: List[int] = Field(..., description="Ample class of Y in S_Y coordinates")
    weyl: List[int] = Field(..., description="Weyl vector of the Conway chamber containing alpha")
    walls: Optional[List[List[int]]] = Field(None, description="Cached walls of D0 in S_Y coordinates")
    expected: FixtureExpected

    def save(self, path: Union[str, Path]) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(by_alias=True, indent=1), encoding="utf-8")


def _load(model, path: Union[str, Path]):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return model.model_validate(data)
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise FixtureError(f"cannot read fixture {path}: {exc}") from exc


def load_fixture_spec(path: Union[str, Path]) -> FixtureSpec:
    """Read a fixture spec.

    Raises:
        FixtureError: If the file is missing or malformed
    """
    return _load(FixtureSpec, path)


def load_built_fixture(path: Union[str, Path]) -> BuiltFixture:
    """Read a built fixture.

    Raises:
        FixtureError: If the file is missing or malformed
    """
    return _load(BuiltFixture, path)


class ExternalFact(BaseModel):
    """A statement taken from the literature rather than recomputed."""

    statement: str
    citation: str


class ExternalFacts(BaseModel):
    """Trusted inputs of the claim verifier and the order filter."""

    inherited_bound: List[int] = Field(..., description="Every order divides one of these")
    max_factor_degree: int = Field(8, description="Degree bound for cyclotomic factors of p_N")
    realized_orders: List[int] = Field(default_factory=list, description="Orders known to occur")
    facts: Dict[str, ExternalFact] = Field(default_factory=dict)

    def fact(self, key: str) -> ExternalFact:
        """Look up a fact.

        Raises:
            FixtureError: If the key is unknown
        """
        if key not in self.facts:
            raise FixtureError(f"external fact '{key}' is not recorded")
        return self.facts[key]


def load_external_facts(path: Union[str, Path]) -> ExternalFacts:
    """Read the external facts file.

    Raises:
        FixtureError: If the file is missing or malformed
    """
    return _load(ExternalFacts, path)
