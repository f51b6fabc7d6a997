from typing import Optional

import numpy as np
from scipy import stats as sps

from domain.models import FeatureVector, Modality, TimeSeries
from errors import ValidationError

STAT10_NAMES = ("mean", "median", "max", "min", "p25", "p75", "std", "range", "skewness", "kurtosis")


def stat10(series: np.ndarray) -> np.ndarray:
    """mean, median, max, min, p25, p75, population std, range, skewness, excess kurtosis."""
    x = np.asarray(series, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValidationError("stat10 of an empty series")
    mean = x.mean()
    sd = x.std()
    p25, median, p75 = np.percentile(x, [25, 50, 75])
    lo, hi = x.min(), x.max()
    # Zero-variance series have undefined shape statistics; report them as 0.
    if sd <= 1e-12 * max(1.0, abs(mean)):
        sd, skew, kurt = 0.0, 0.0, 0.0
    else:
        skew = float(sps.skew(x, bias=True))
        kurt = float(sps.kurtosis(x, fisher=True, bias=True))
    return np.array([mean, median, hi, lo, p25, p75, sd, hi - lo, skew, kurt], dtype=np.float64)


def magnitude(xyz: np.ndarray) -> np.ndarray:
    arr = np.asarray(xyz, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return np.sqrt(np.sum(arr * arr, axis=1))


def physio_features(hr: Optional[TimeSeries]) -> FeatureVector:
    if hr is None or hr.is_empty:
        raise ValidationError("physio: heart rate series empty after filtering")
    return FeatureVector(Modality.PHYSIO, stat10(hr.values))


def movement_features(accel: Optional[TimeSeries], gyro: Optional[TimeSeries]) -> FeatureVector:
    """stat10 of accelerometer magnitude followed by stat10 of gyroscope magnitude.

    Series may be raw xyz triples or already reduced to magnitude.
    """
    if accel is None or accel.is_empty:
        raise ValidationError("movement: accelerometer series missing")
    if gyro is None or gyro.is_empty:
        raise ValidationError("movement: gyroscope series missing")
    parts = []
    for series in (accel, gyro):
        values = series.values
        parts.append(stat10(magnitude(values) if values.ndim == 2 else values))
    return FeatureVector(Modality.MOVEMENT, np.concatenate(parts))
