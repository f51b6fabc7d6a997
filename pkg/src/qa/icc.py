"""Intraclass correlation for observer ratings (items x raters)."""

import numpy as np

from errors import DomainError, ValidationError

ICC_VARIANTS = ("ICC(1,1)", "ICC(2,1)", "ICC(3,1)")
DEFAULT_VARIANT = "ICC(2,1)"


def mean_squares(ratings: np.ndarray) -> dict:
    """Two-way ANOVA decomposition: rows (items), columns (raters), residual, within-item."""
    x = np.asarray(ratings, dtype=np.float64)
    if x.ndim != 2:
        raise ValidationError(f"ratings must be a 2-D items x raters matrix, got ndim={x.ndim}")
    n, k = x.shape
    if n < 2 or k < 2:
        raise ValidationError(f"ratings need at least 2 items and 2 raters, got {n}x{k}")
    if not np.isfinite(x).all():
        raise ValidationError("ratings contain non-finite values")
    grand = x.mean()
    row_means = x.mean(axis=1)
    col_means = x.mean(axis=0)
    ss_rows = k * np.sum((row_means - grand) ** 2)
    ss_cols = n * np.sum((col_means - grand) ** 2)
    ss_total = np.sum((x - grand) ** 2)
    ss_error = ss_total - ss_rows - ss_cols
    return {
        "n": n,
        "k": k,
        "msr": ss_rows / (n - 1),
        "msc": ss_cols / (k - 1),
        "mse": max(ss_error, 0.0) / ((n - 1) * (k - 1)),
        "msw": max(ss_total - ss_rows, 0.0) / (n * (k - 1)),
    }


def icc(ratings: np.ndarray, variant: str = DEFAULT_VARIANT) -> float:
    if variant not in ICC_VARIANTS:
        raise DomainError(f"unknown ICC variant {variant!r}; choose one of {', '.join(ICC_VARIANTS)}")
    ms = mean_squares(ratings)
    n, k = ms["n"], ms["k"]
    msr, msc, mse, msw = ms["msr"], ms["msc"], ms["mse"], ms["msw"]
    if msr <= 1e-12:
        return 0.0
    if variant == "ICC(1,1)":
        num, den = msr - msw, msr + (k - 1) * msw
    elif variant == "ICC(2,1)":
        num, den = msr - mse, msr + (k - 1) * mse + k * (msc - mse) / n
    else:
        num, den = msr - mse, msr + (k - 1) * mse
    if den <= 0:
        return 0.0
    return float(num / den)
