from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any


class ArtifactParser(ABC):
    """Interface for parsing one per-session corpus artifact file."""

    @abstractmethod
    def parse(self, file_path: Path) -> Any:
        """Parse an artifact file and return its domain object."""
        pass
