from pathlib import Path
from typing import Dict, Tuple

import numpy as np
import pandas as pd

from domain.models import TimeSeries
from errors import ParseError
from infrastructure.parsers.base_parser import ArtifactParser

SERIES_COLUMNS: Dict[str, Tuple[str, ...]] = {
    "hr": ("t", "bpm"),
    "accel": ("t", "x", "y", "z"),
    "gyro": ("t", "x", "y", "z"),
    "light": ("t", "lux"),
    "wear": ("t", "confidence"),
}


class SeriesParser(ArtifactParser):
    """Parser for one sensor CSV (timestamp column ``t`` plus the value columns of the series)."""

    def __init__(self, name: str):
        if name not in SERIES_COLUMNS:
            raise ParseError(f"unknown sensor series {name!r}")
        self.name = name

    def parse(self, file_path: Path) -> TimeSeries:
        columns = SERIES_COLUMNS[self.name]
        try:
            df = pd.read_csv(file_path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
            raise ParseError(f"{file_path}: unreadable {self.name} series ({exc})") from exc
        df.columns = [str(c).strip().lower() for c in df.columns]
        missing = [c for c in columns if c not in df.columns]
        if missing:
            raise ParseError(f"{file_path}: missing columns {missing}")
        try:
            t = df["t"].to_numpy(dtype=np.float64)
            values = df[list(columns[1:])].to_numpy(dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"{file_path}: non-numeric {self.name} values ({exc})") from exc
        if len(columns) == 2:
            values = values[:, 0]
        if self.name == "wear":
            values = values.astype(np.int64)
        return TimeSeries(t, values)
