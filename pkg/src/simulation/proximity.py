"""Log-distance path loss between the two watches."""

import math
from typing import Optional

import numpy as np

from domain.config_models import PathLossParams
from errors import DomainError


def rssi_from_distance(
    d_m: float,
    params: PathLossParams = PathLossParams(),
    rng: Optional[np.random.Generator] = None,
) -> float:
    """RSSI in dBm at ``d_m`` metres; Gaussian shadowing only when ``rng`` is given."""
    if d_m <= 0:
        raise DomainError(f"distance must be positive, got {d_m}")
    rssi = params.rssi_at_1m_dbm - 10.0 * params.exponent * math.log10(d_m)
    if rng is not None and params.noise_sd_db > 0:
        rssi += float(rng.normal(0.0, params.noise_sd_db))
    return rssi


def distance_from_rssi(rssi_dbm: float, params: PathLossParams = PathLossParams()) -> float:
    return 10.0 ** ((params.rssi_at_1m_dbm - rssi_dbm) / (10.0 * params.exponent))


def in_range(rssi_dbm: float, threshold_dbm: float) -> bool:
    return rssi_dbm >= threshold_dbm
