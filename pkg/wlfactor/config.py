from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import ValidationError

from wlfactor.schemas.config import RunConfig
from wlfactor.services.errors import ConfigInvalid


PROJECT_ROOT = Path(__file__).resolve().parent.parent
ENV_FILE = PROJECT_ROOT / ".env"
load_dotenv(ENV_FILE, override=False)

LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}


def _as_bool(value: str | None, *, default: bool = False) -> bool:
    if value is None:
        return default
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _as_int(
    value: str | None,
    *,
    default: int | None,
    min_value: int | None = None,
    max_value: int | None = None,
) -> int | None:
    if value is None or not value.strip():
        parsed = default
    else:
        try:
            parsed = int(value.strip())
        except ValueError as exc:
            raise ValueError(f"Expected integer value, got: {value!r}") from exc

    if parsed is None:
        return None
    if min_value is not None and parsed < min_value:
        raise ValueError(f"Integer value {parsed} is less than allowed minimum {min_value}.")
    if max_value is not None and parsed > max_value:
        raise ValueError(f"Integer value {parsed} exceeds allowed maximum {max_value}.")
    return parsed


def _first_non_empty(*values: str | None) -> str:
    for item in values:
        if item and item.strip():
            return item.strip()
    return ""


@dataclass(frozen=True)
class Settings:
    app_name: str
    environment: str
    debug: bool
    log_level: str
    oracle_bound_override: int | None
    config_path: Path | None


def _validate_for_production(settings: Settings) -> None:
    if settings.environment != "production":
        return
    if settings.debug:
        raise RuntimeError("DEBUG must be off when APP_ENV is production.")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    environment = (os.getenv("APP_ENV") or "development").strip().lower()
    debug = _as_bool(os.getenv("DEBUG"), default=False)
    log_level = _first_non_empty(os.getenv("LOG_LEVEL"), "DEBUG" if debug else "INFO").upper()
    if log_level not in LOG_LEVELS:
        raise ValueError(f"LOG_LEVEL must be one of {sorted(LOG_LEVELS)}, got: {log_level!r}")
    config_path = _first_non_empty(os.getenv("WLFACTOR_CONFIG"))
    settings = Settings(
        app_name=(os.getenv("APP_NAME") or "wlfactor").strip(),
        environment=environment,
        debug=debug,
        log_level=log_level,
        oracle_bound_override=_as_int(os.getenv("WLFACTOR_ORACLE_BOUND"), default=None, min_value=2),
        config_path=Path(config_path) if config_path else None,
    )

    _validate_for_production(settings)
    return settings


def load_run_config(path: str | Path | None = None, *, settings: Settings | None = None) -> RunConfig:
    """RunConfig from a JSON file (or defaults), with the oracle bound override applied."""
    settings = settings or get_settings()
    path = path or settings.config_path
    try:
        if path is None:
            config = RunConfig()
        else:
            config = RunConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ConfigInvalid(f"Invalid run configuration in {path}: {exc.error_count()} error(s).\n{exc}") from exc
    except OSError as exc:
        raise ConfigInvalid(f"Cannot read run configuration {path}: {exc}") from exc

    if settings.oracle_bound_override is not None:
        config = config.model_copy(update={"oracle_bound": settings.oracle_bound_override})
    return config
