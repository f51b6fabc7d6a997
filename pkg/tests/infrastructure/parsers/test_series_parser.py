import numpy as np
import pytest

from errors import ParseError
from infrastructure.parsers.series_parser import SeriesParser


def test_hr_series_is_one_dimensional(tmp_path):
    path = tmp_path / "hr.csv"
    path.write_text("t,bpm\n0.0,70\n1.0,71.5\n", encoding="utf-8")
    series = SeriesParser("hr").parse(path)
    assert series.t.tolist() == [0.0, 1.0]
    assert series.values.tolist() == [70.0, 71.5]


def test_accel_series_has_three_columns(tmp_path):
    path = tmp_path / "accel.csv"
    path.write_text(" T , X , Y , Z \n0,1,2,3\n0.02,4,5,6\n", encoding="utf-8")
    series = SeriesParser("accel").parse(path)
    assert series.values.shape == (2, 3)


def test_wear_series_is_integer(tmp_path):
    path = tmp_path / "wear.csv"
    path.write_text("t,confidence\n0,3\n1,2\n", encoding="utf-8")
    assert SeriesParser("wear").parse(path).values.dtype == np.int64


def test_missing_column_raises(tmp_path):
    path = tmp_path / "gyro.csv"
    path.write_text("t,x,y\n0,1,2\n", encoding="utf-8")
    with pytest.raises(ParseError, match="missing columns"):
        SeriesParser("gyro").parse(path)


def test_non_numeric_value_raises(tmp_path):
    path = tmp_path / "light.csv"
    path.write_text("t,lux\n0,bright\n", encoding="utf-8")
    with pytest.raises(ParseError, match="non-numeric"):
        SeriesParser("light").parse(path)


def test_empty_file_raises(tmp_path):
    path = tmp_path / "hr.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ParseError):
        SeriesParser("hr").parse(path)


def test_unknown_series_name():
    with pytest.raises(ParseError):
        SeriesParser("temperature")
