"""Pure-numpy periodic filter-bank kernels (fallback for ``_ckernels``)."""

import functools

import numpy as np


@functools.lru_cache(maxsize=256)
def _tap_indices(n: int, taps: int) -> tuple:
    k2 = 2 * np.arange(n // 2)
    return tuple((k2 + t) % n for t in range(taps))


def analysis(x, lo, hi):
    x = np.asarray(x, dtype=np.float64)
    rows, n = x.shape
    approx = np.zeros((rows, n // 2))
    detail = np.zeros((rows, n // 2))
    for t, idx in enumerate(_tap_indices(n, len(lo))):
        v = x[:, idx]
        approx += lo[t] * v
        detail += hi[t] * v
    return approx, detail


def synthesis(approx, detail, lo, hi):
    approx = np.asarray(approx, dtype=np.float64)
    detail = np.asarray(detail, dtype=np.float64)
    rows, half = approx.shape
    out = np.zeros((rows, 2 * half))
    # For a fixed tap the indices are distinct, so fancy-index += is safe.
    for t, idx in enumerate(_tap_indices(2 * half, len(lo))):
        out[:, idx] += lo[t] * approx + hi[t] * detail
    return out
