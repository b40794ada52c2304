"""Autoregressive noise models and pre-whitening filters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "WhiteningError",
    "ArModel",
    "autocorrelation",
    "levinson_durbin",
    "fit_ar",
    "whiten",
    "unwhiten",
]


class WhiteningError(ValueError):
    pass


@dataclass(frozen=True)
class ArModel:
    """``A(z) = 1 + a[1] z^-1 + ... + a[p] z^-p`` with reflection coefficients."""

    coefficients: np.ndarray
    reflection: np.ndarray
    error_power: float

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1


def autocorrelation(x, max_lag: int) -> np.ndarray:
    """Biased autocorrelation estimate ``r[k] = sum_t x[t] x[t+k] / n``, k = 0..max_lag."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    nfft = 1 << int(np.ceil(np.log2(2 * n - 1)))
    spec = np.fft.rfft(x, nfft)
    r = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    return r / n


def levinson_durbin(r, order: int):
    """Solve the Yule-Walker equations for ``A(z)`` by the Levinson-Durbin recursion.

    Parameters
    ----------
    r : array_like
        Autocorrelation sequence, at least ``order + 1`` values.
    order : int

    Returns
    -------
    a : ndarray
        ``[1, a_1, ..., a_order]``.
    k : ndarray
        Reflection coefficients, ``k[i-1]`` from stage ``i``.
    err : float
        Final prediction-error power.
    """
    r = np.asarray(r, dtype=np.float64)
    if order < 1:
        raise ValueError("order must be >= 1")
    if r.size < order + 1:
        raise ValueError(f"need {order + 1} autocorrelation lags, got {r.size}")
    if r[0] <= 0:
        raise WhiteningError("zero-power calibration sequence")
    a = np.zeros(order + 1)
    a[0] = 1.0
    k = np.zeros(order)
    err = r[0]
    for i in range(1, order + 1):
        acc = r[i] + np.dot(a[1:i], r[i - 1 : 0 : -1])
        ki = -acc / err
        k[i - 1] = ki
        a[1 : i + 1] = a[1 : i + 1] + ki * a[i - 1 :: -1][:i]
        err *= 1.0 - ki * ki
    return a, k, float(err)


def fit_ar(noise, order: int = 10) -> ArModel:
    """Fit an AR(``order``) model to a noise-only sequence (autocorrelation method).

    Raises
    ------
    WhiteningError
        If the sequence is shorter than ``10 * order`` or any reflection
        coefficient has magnitude >= 1 (the inverse filter would be unstable).
    """
    x = np.asarray(noise, dtype=np.float64).ravel()
    if order < 1:
        raise ValueError("order must be >= 1")
    if x.size < 10 * order:
        raise WhiteningError(
            f"calibration sequence of {x.size} samples is shorter than 10 x order ({10 * order})"
        )
    x = x - x.mean()
    a, k, err = levinson_durbin(autocorrelation(x, order), order)
    if np.any(np.abs(k) >= 1.0) or not np.all(np.isfinite(a)):
        raise WhiteningError("whitening filter unstable")
    return ArModel(coefficients=a, reflection=k, error_power=err)


def whiten(x, model: ArModel) -> np.ndarray:
    """FIR prediction-error filter ``A(z)`` applied along a 1D sequence."""
    return lfilter(model.coefficients, [1.0], np.asarray(x, dtype=np.float64))


def unwhiten(e, model: ArModel) -> np.ndarray:
    """All-pole inverse ``1 / A(z)``; exact inverse of :func:`whiten`."""
    return lfilter([1.0], model.coefficients, np.asarray(e, dtype=np.float64))
