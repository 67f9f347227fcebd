"""Data models for the application."""
from .fixtures import BuiltFixture, ExternalFacts, FixtureExpected, FixtureSpec, QType
from .lattice_file import LatticeFile
from .reports import (
    BorcherdsReport,
    ChamberRecord,
    ClaimStatus,
    TraceRow,
    VerificationReport,
    WallOrbit,
)

__all__ = [
    "BuiltFixture",
    "ExternalFacts",
    "FixtureExpected",
    "FixtureSpec",
    "QType",
    "LatticeFile",
    "BorcherdsReport",
    "ChamberRecord",
    "ClaimStatus",
    "TraceRow",
    "VerificationReport",
    "WallOrbit",
]
