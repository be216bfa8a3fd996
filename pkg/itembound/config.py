"""Environment-driven settings and logging setup."""

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from .errors import ConfigurationError

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be a number, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Runtime settings, read from the environment (and a .env file)."""
    threads: int = 1
    log_level: str = "INFO"
    log_file: Optional[str] = None
    maxent_tol: float = 1e-9
    maxent_max_iter: int = 10_000
    data_dir: str = "data"

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        threads = _env_int("ITEMBOUND_THREADS", os.cpu_count() or 1)
        if threads < 1:
            raise ConfigurationError(
                f"ITEMBOUND_THREADS must be at least 1, got {threads}")
        tol = _env_float("ITEMBOUND_MAXENT_TOL", cls.maxent_tol)
        if tol <= 0:
            raise ConfigurationError(
                f"ITEMBOUND_MAXENT_TOL must be positive, got {tol}")
        return cls(
            threads=threads,
            log_level=os.getenv("ITEMBOUND_LOG_LEVEL", cls.log_level).upper(),
            log_file=os.getenv("ITEMBOUND_LOG_FILE") or None,
            maxent_tol=tol,
            maxent_max_iter=_env_int("ITEMBOUND_MAXENT_MAX_ITER",
                                     cls.maxent_max_iter),
            data_dir=os.getenv("ITEMBOUND_DATA_DIR", cls.data_dir),
        )


def configure_logging(settings: Settings) -> None:
    """Configure root logging the same way for every entry point."""
    handlers = [logging.StreamHandler()]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file))
    level = getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers)

    # Suppress noisy third-party logs
    logging.getLogger("httpx").setLevel(logging.WARNING)
    logging.getLogger("httpcore").setLevel(logging.WARNING)
    logging.getLogger("mcp").setLevel(logging.WARNING)
