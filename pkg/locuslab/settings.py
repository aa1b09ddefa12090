"""Environment-driven defaults"""

import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240901
DEFAULT_PRECISION = 256
MODES = ("exact", "probabilistic")


def _truthy(value: Optional[str]) -> bool:
    return (value or "").strip().lower() in ("1", "true", "yes", "on")


@dataclass
class Settings:
    """Runtime defaults read from the environment (and a .env file)"""

    seed: int = DEFAULT_SEED
    seed_from_env: bool = False
    mode: str = "exact"
    jobs: int = 1
    precision: int = DEFAULT_PRECISION
    debug: bool = False

    @classmethod
    def from_env(cls) -> "Settings":
        load_dotenv()
        raw_seed = os.getenv("LOCUSLAB_SEED")
        mode = os.getenv("LOCUSLAB_MODE", "exact")
        if mode not in MODES:
            logger.warning(f"Ignoring LOCUSLAB_MODE={mode!r}; expected one of {MODES}")
            mode = "exact"
        return cls(
            seed=int(raw_seed) if raw_seed else DEFAULT_SEED,
            seed_from_env=bool(raw_seed),
            mode=mode,
            jobs=int(os.getenv("LOCUSLAB_JOBS", "1")),
            precision=int(os.getenv("LOCUSLAB_PRECISION", str(DEFAULT_PRECISION))),
            debug=_truthy(os.getenv("LOCUSLAB_DEBUG")),
        )

    def resolve_seed(self, flag: Optional[int]) -> int:
        """LOCUSLAB_SEED wins over --seed"""
        if self.seed_from_env or flag is None:
            return self.seed
        return flag


def configure_logging(settings: Settings) -> None:
    logging.basicConfig(level=logging.DEBUG if settings.debug else logging.INFO)
