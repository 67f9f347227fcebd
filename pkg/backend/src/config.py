"""Application configuration management."""
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class OutputFormat(str, Enum):
    """How CLI results are rendered."""

    JSON = "json"
    TEXT = "text"


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Storage Configuration
    fixture_dir: str = "./fixtures"  # Fixture specs, lattice files, built setups
    output_dir: str = "./reports"  # Where CLI reports are written
    output_format: OutputFormat = OutputFormat.TEXT

    # Borcherds Configuration
    chamber_budget: int = 500  # Max chambers registered by the BFS
    thread_count: int = 1  # Workers for wall classification fan-out

    # Randomness (Schreier-Sims, neighbor walks, fixture search)
    seed: int = 20240601

    # Enumeration Configuration
    lll_delta: float = 0.99
    neighbor_prime: Optional[int] = None  # Defaults to the smallest odd prime not dividing det
    twist_coefficient_bound: int = 3  # Coordinate box for twist elements
    fixture_max_neighbor_steps: int = 4000
    embedding_attempts: int = 200  # Candidate Q embeddings tried per fixture

    # Logging
    log_level: str = "INFO"

    # Model Configuration
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ENRIQUES_",
        case_sensitive=False,
    )

    @field_validator("chamber_budget", "thread_count")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("must be positive")
        return value

    @property
    def fixture_path(self) -> Path:
        """Get the resolved fixture directory."""
        return Path(self.fixture_dir).expanduser().resolve()

    @property
    def output_path(self) -> Path:
        """Get the resolved report directory."""
        return Path(self.output_dir).expanduser().resolve()


# Global settings instance
settings = Settings()
