from __future__ import annotations

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Strongly typed environment-backed settings for relaycast.

    Values are read from `RELAYCAST_`-prefixed environment variables and (by
    default) from a local `.env` file in the project root. Explicit CLI flags
    always win over these values.

    Simulation:
        - RELAYCAST_TRIALS
        - RELAYCAST_SEED
        - RELAYCAST_WORKERS

    Validation / sweeps:
        - RELAYCAST_SIGMAS
        - RELAYCAST_ROW_CAP
        - RELAYCAST_MAX_TRANSMISSIONS

    Fields:
        - RELAYCAST_FIELD_MAX_ORDER

    Misc:
        - RELAYCAST_LOG_LEVEL
    """

    model_config = SettingsConfigDict(
        env_prefix="RELAYCAST_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    TRIALS: int = Field(default=50000, ge=1)
    SEED: int = Field(default=2024, ge=0)
    WORKERS: int = Field(default=1, ge=1, le=256)

    SIGMAS: float = Field(default=3.0, gt=0)
    ROW_CAP: int = Field(default=100000, ge=1)

    # Upper end of the linear scan in min_transmissions.
    MAX_TRANSMISSIONS: int = Field(default=2000, ge=1)

    # Full q x q tables are built per field; keep this small.
    FIELD_MAX_ORDER: int = Field(default=256, ge=2, le=256)

    LOG_LEVEL: str = "WARNING"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
