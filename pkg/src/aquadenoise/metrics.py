"""Full-reference image quality measures (8-bit peak of 255)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from aquadenoise.image import as_array

__all__ = [
    "PEAK",
    "QualityScore",
    "mse",
    "mae",
    "psnr",
    "psnr_from_mse",
    "nmse",
    "quality_band",
    "score",
]

PEAK = 255.0


def _pair(ref, test):
    a = as_array(ref)
    b = as_array(test)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def mse(ref, test) -> float:
    """Mean squared error over raw (unclamped) samples."""
    a, b = _pair(ref, test)
    diff = a - b
    return float(np.mean(diff * diff))


def mae(ref, test) -> float:
    a, b = _pair(ref, test)
    return float(np.mean(np.abs(a - b)))


def psnr_from_mse(value: float) -> float:
    """``10 log10(255**2 / mse)``; ``inf`` when ``mse == 0``."""
    if value < 0:
        raise ValueError("MSE must be non-negative")
    if value == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / value)


def psnr(ref, test) -> float:
    """Peak signal-to-noise ratio in dB, ``inf`` for identical images."""
    return psnr_from_mse(mse(ref, test))


def nmse(ref, test) -> float:
    """``sum((ref - test)**2) / sum(ref**2)``."""
    a, b = _pair(ref, test)
    energy = float(np.sum(a * a))
    if energy == 0:
        raise ValueError("NMSE undefined for an all-zero reference")
    diff = a - b
    return float(np.sum(diff * diff)) / energy


def quality_band(psnr_db: float) -> str:
    """Coarse label for a PSNR value.

    Above 40 dB is "excellent", 30-40 "good", 20-30 "poor", below 20
    "unacceptable". Boundary values fall in the lower band (40 dB is "good").
    """
    if psnr_db > 40:
        return "excellent"
    if psnr_db >= 30:
        return "good"
    if psnr_db >= 20:
        return "poor"
    return "unacceptable"


@dataclass(frozen=True)
class QualityScore:
    mse: float
    psnr_db: float
    nmse: float
    mae: float

    @property
    def band(self) -> str:
        return quality_band(self.psnr_db)


def score(ref, test) -> QualityScore:
    value = mse(ref, test)
    try:
        normalized = nmse(ref, test)
    except ValueError:
        normalized = math.nan
    return QualityScore(mse=value, psnr_db=psnr_from_mse(value), nmse=normalized, mae=mae(ref, test))
