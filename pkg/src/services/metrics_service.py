import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator

from logging_config import get_logger

logger = get_logger("metrics_service")

STAGES = ("select", "preprocess", "extract", "evaluate")


@dataclass
class StageTiming:
    total_seconds: float = 0.0
    count: int = 0

    def add(self, seconds: float) -> None:
        self.total_seconds += seconds
        self.count += 1

    def avg_ms(self) -> float:
        return (self.total_seconds / self.count * 1000) if self.count > 0 else 0.0


@dataclass
class MetricsCollector:
    """Collects structured timing and count metrics from the sensing pipeline."""

    stages: Dict[str, StageTiming] = field(default_factory=lambda: {name: StageTiming() for name in STAGES})

    sessions_seen: int = 0
    retained: int = 0
    rejected: int = 0
    unusable: int = 0
    samples_evaluated: int = 0

    def record(self, stage: str, seconds: float) -> None:
        self.stages.setdefault(stage, StageTiming()).add(seconds)

    @contextmanager
    def timed(self, stage: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.record(stage, elapsed)
            logger.debug("stage %s took %.3fs", stage, elapsed)

    def as_dict(self) -> Dict[str, Any]:
        timing: Dict[str, Any] = {}
        for name, stage in self.stages.items():
            timing[f"{name}_s"] = round(stage.total_seconds, 4)
            timing[f"{name}_avg_ms"] = round(stage.avg_ms(), 2)
            timing[f"{name}_count"] = stage.count
        timing["total_s"] = round(sum(s.total_seconds for s in self.stages.values()), 4)
        return {
            "sessions_seen": self.sessions_seen,
            "retained": self.retained,
            "rejected": self.rejected,
            "unusable": self.unusable,
            "samples_evaluated": self.samples_evaluated,
            "timing": timing,
        }
