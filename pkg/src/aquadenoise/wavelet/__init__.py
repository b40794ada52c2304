"""Periodic filter-bank wavelet transforms."""

from aquadenoise.wavelet._backend import BACKEND
from aquadenoise.wavelet.filters import (
    SUPPORTED_BASES,
    FilterBankError,
    WaveletFilterBank,
    check_filter_bank,
    get_filter_bank,
)
from aquadenoise.wavelet.transform import (
    ORIENTATIONS,
    TransformError,
    WaveletPyramid,
    dwt1d,
    dwt2d,
    idwt1d,
    idwt2d,
    reconstruct,
)

__all__ = [
    "BACKEND",
    "SUPPORTED_BASES",
    "FilterBankError",
    "WaveletFilterBank",
    "check_filter_bank",
    "get_filter_bank",
    "ORIENTATIONS",
    "TransformError",
    "WaveletPyramid",
    "dwt1d",
    "dwt2d",
    "idwt1d",
    "idwt2d",
    "reconstruct",
]
