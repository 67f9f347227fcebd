"""Report models for claim verification and Borcherds runs."""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class ClaimStatus(str, Enum):
    """Outcome of a claim or a single trace row."""

    VERIFIED = "verified"
    REFUTED = "refuted"
    EXTERNAL_FACT = "external-fact"


class TraceRow(BaseModel):
    """One step of a verification: what was computed against what was expected."""

    step: str
    computed: str
    expected: str
    status: ClaimStatus
    citation: Optional[str] = Field(None, description="Reference for external-fact rows")


class VerificationReport(BaseModel):
    """Machine-checked replay of one claim."""

    claim_id: str
    status: ClaimStatus
    trace: List[TraceRow] = Field(default_factory=list)

    class Config:
        json_schema_extra = {
            "example": {
                "claim_id": "f7",
                "status": "verified",
                "trace": [
                    {
                        "step": "index [N : N7 + N1]",
                        "computed": "7",
                        "expected": "7",
                        "status": "verified",
                    }
                ],
            }
        }

    @property
    def mismatches(self) -> List[TraceRow]:
        return [row for row in self.trace if row.status == ClaimStatus.REFUTED]

    @property
    def external_facts(self) -> List[TraceRow]:
        return [row for row in self.trace if row.status == ClaimStatus.EXTERNAL_FACT]

    def render_text(self) -> str:
        """Plain-text mirror of the trace."""
        width = max([len(r.step) for r in self.trace] + [4])
        lines = [f"claim {self.claim_id}: {self.status.value}", ""]
        for row in self.trace:
            mark = {"verified": "ok", "refuted": "FAIL", "external-fact": "ext"}[row.status.value]
            line = f"  [{mark:>4}] {row.step.ljust(width)}  {row.computed}"
            if row.status != ClaimStatus.EXTERNAL_FACT and row.computed != row.expected:
                line += f"  (expected {row.expected})"
            if row.citation:
                line += f"  [{row.citation}]"
            lines.append(line)
        return "\n".join(lines)


class WallOrbit(BaseModel):
    """Orbit of walls of a chamber under its semi-symplectic stabilizer."""

    size: int
    outer: bool
    representative: List[int]


class ChamberRecord(BaseModel):
    """A chamber class representative found by the BFS."""

    index: int
    tau: List[List[int]]
    stabilizer_order: int
    orbits: List[WallOrbit] = Field(default_factory=list)

    @property
    def outer_walls(self) -> int:
        return sum(o.size for o in self.orbits if o.outer)

    @property
    def inner_walls(self) -> int:
        return sum(o.size for o in self.orbits if not o.outer)

    @property
    def type_key(self) -> str:
        """Stabilizer order and outer wall count, e.g. '|G|=2,outer=6'."""
        return f"|G|={self.stabilizer_order},outer={self.outer_walls}"


class BorcherdsReport(BaseModel):
    """Output of the chamber BFS."""

    fixture: str
    chambers: List[ChamberRecord] = Field(default_factory=list)
    generators: List[List[List[int]]] = Field(default_factory=list)
    mod2_order: Optional[int] = None
    symmetric_degree: Optional[int] = None
    complete: bool = True
    extra: Dict[str, Any] = Field(default_factory=dict)

    @property
    def r_count(self) -> int:
        return len(self.chambers)

    def type_counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for c in self.chambers:
            out[c.type_key] = out.get(c.type_key, 0) + 1
        return dict(sorted(out.items()))

    def render_text(self) -> str:
        """Table of chamber types, one row per (stabilizer, outer, inner) pattern."""
        lines = [
            f"fixture {self.fixture}: |R| = {self.r_count}, |G| = {len(self.generators)} generators"
            + ("" if self.complete else " (partial)"),
            f"mod-2 image order: {self.mod2_order if self.mod2_order is not None else '-'}",
            "",
            f"{'|aut_s(Y,D)|':>13}  {'outer walls':<24}{'inner walls':<24}{'number':>6}",
        ]
        rows: Dict[tuple, int] = {}
        for c in self.chambers:
            outer = _orbit_pattern([o.size for o in c.orbits if o.outer])
            inner = _orbit_pattern([o.size for o in c.orbits if not o.outer])
            key = (c.stabilizer_order, outer, inner)
            rows[key] = rows.get(key, 0) + 1
        for (order, outer, inner), count in sorted(rows.items()):
            lines.append(f"{order:>13}  {outer:<24}{inner:<24}{count:>6}")
        return "\n".join(lines)


def _orbit_pattern(sizes: List[int]) -> str:
    """Orbit sizes as '1x2 + 2x6' (size x multiplicity)."""
    counts: Dict[int, int] = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1
    return " + ".join(f"{s}x{m}" for s, m in sorted(counts.items())) or "-"
