"""Truncated q-series, Bailey pairs and a verification catalogue."""

from .series import (
    DivergentProduct,
    NotInvertible,
    OrderExceeded,
    QMonomial,
    QSeries,
    SeriesError,
    euler_product,
    invert,
    monomial,
    pochhammer,
)
from .report import VerificationReport, Mismatch, TruncationFailure

__all__ = [
    "DivergentProduct",
    "Mismatch",
    "NotInvertible",
    "OrderExceeded",
    "QMonomial",
    "QSeries",
    "SeriesError",
    "TruncationFailure",
    "VerificationReport",
    "euler_product",
    "invert",
    "monomial",
    "pochhammer",
]
