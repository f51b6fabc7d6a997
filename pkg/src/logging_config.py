"""Project loggers and the JSON run log every CLI stage leaves in ``<out>/run_logs``."""

import json
import logging
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from errors import ValidationError

RUN_LOG_DIR = "run_logs"
LOG_FORMAT = "%(levelname)s %(name)s %(message)s"


def get_logger(name: str = "dyad") -> logging.Logger:
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
        logger.propagate = True  # caplog
    return logger


def set_level(level: str) -> None:
    """Apply a level name (e.g. DEBUG) to every logger created through get_logger."""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        numeric = logging.INFO
    for name in list(logging.root.manager.loggerDict):
        logger = logging.getLogger(name)
        if logger.handlers:
            logger.setLevel(numeric)


@dataclass(frozen=True)
class StageCounts:
    """Items a stage took in, passed on and dropped, in the stage's own unit."""

    consumed: int
    produced: int
    dropped: int
    unit: str = "sessions"

    def __post_init__(self):
        for name in ("consumed", "produced", "dropped"):
            if getattr(self, name) < 0:
                raise ValidationError(f"run log count {name} is negative: {getattr(self, name)}")


def build_run_log(
    stage: str,
    counts: StageCounts,
    seed: int,
    input_hashes: Mapping[str, str],
    flags: Optional[Mapping[str, Any]] = None,
    metadata: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    return {
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "stage": stage,
        "seed": seed,
        "counts": asdict(counts),
        "inputs": dict(sorted(input_hashes.items())),
        "flags": dict(flags or {}),
        "metadata": metadata or {},
    }


def write_run_log(out_dir: Path, log: Mapping[str, Any]) -> Path:
    path = Path(out_dir) / RUN_LOG_DIR / f"{log['stage']}.json"
    write_json_atomic(path, dict(log))
    counts = log["counts"]
    get_logger("run_log").debug(
        "%s: %d %s in, %d out, %d dropped",
        log["stage"],
        counts["consumed"],
        counts["unit"],
        counts["produced"],
        counts["dropped"],
    )
    return path


def write_json_atomic(path: Path, payload: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True), encoding="utf-8")
    tmp.replace(path)
