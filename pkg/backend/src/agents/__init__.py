"""Agents for the application."""
from .borcherds_engine import BorcherdsEngine, main_borcherds
from .verifier import ClaimVerifier

__all__ = [
    "BorcherdsEngine",
    "main_borcherds",
    "ClaimVerifier",
]
