import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv


@dataclass(frozen=True)
class Settings:
    root_dir: Path
    config_dir: Path
    data_dir: Path
    log_level: str
    seed_override: Optional[int]
    jobs: int


def _int_or_none(raw: Optional[str]) -> Optional[int]:
    if raw is None or not raw.strip():
        return None
    return int(raw.strip())


def load_settings() -> Settings:
    # Explicit local .env loading keeps CLI and test behavior consistent.
    dotenv_path = Path(os.getenv("DYAD_DOTENV_PATH", ".env"))
    load_dotenv(dotenv_path=dotenv_path, override=False)

    root_dir = Path(os.getenv("DYAD_ROOT_DIR", Path(__file__).resolve().parents[1]))
    config_dir = Path(os.getenv("DYAD_CONFIG_DIR", root_dir / "config"))
    data_dir = Path(os.getenv("DYAD_DATA_DIR", root_dir / "data"))
    return Settings(
        root_dir=root_dir,
        config_dir=config_dir,
        data_dir=data_dir,
        log_level=os.getenv("DYAD_LOG_LEVEL", "INFO"),
        seed_override=_int_or_none(os.getenv("DYAD_SEED")),
        jobs=_int_or_none(os.getenv("DYAD_JOBS")) or 1,
    )
