"""Periodic discrete wavelet transform, 1D and separable 2D.

Conventions
-----------
* Boundaries are periodic: index ``j`` means ``j mod n``.
* Analysis keeps the even phase::

      approx[k] = sum_t analysis_lo[L-1-t] * x[2k + t]
      detail[k] = sum_t analysis_hi[L-1-t] * x[2k + t]

  so Haar gives ``approx[k] = (x[2k] + x[2k+1]) / sqrt(2)`` and
  ``detail[k] = (x[2k] - x[2k+1]) / sqrt(2)``.
* Synthesis upsamples and convolves::

      x[2k + t] += synthesis_lo[t] * approx[k] + synthesis_hi[t] * detail[k]

* 2D transforms filter rows first, then columns. Subband names give the row
  filter first: ``LH`` is low-pass along rows and high-pass along columns
  (horizontal edges), ``HL`` the converse, ``HH`` both high-pass.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from aquadenoise.image import Image, as_array
from aquadenoise.wavelet import _backend
from aquadenoise.wavelet.filters import WaveletFilterBank, get_filter_bank

__all__ = [
    "ORIENTATIONS",
    "WaveletPyramid",
    "TransformError",
    "dwt1d",
    "idwt1d",
    "dwt2d",
    "idwt2d",
    "reconstruct",
]

ORIENTATIONS = ("LH", "HL", "HH")


class TransformError(ValueError):
    """Raised for inputs outside the transform's domain."""


@functools.lru_cache(maxsize=None)
def _taps(bank: WaveletFilterBank):
    # Kernels correlate, so analysis filters are passed time-reversed.
    lo, hi, slo, shi = bank.arrays()
    return (
        np.ascontiguousarray(lo[::-1]),
        np.ascontiguousarray(hi[::-1]),
        np.ascontiguousarray(slo),
        np.ascontiguousarray(shi),
    )


def _analysis_rows(x: np.ndarray, bank: WaveletFilterBank, kernels):
    lo, hi, _, _ = _taps(bank)
    return kernels.analysis(np.ascontiguousarray(x, dtype=np.float64), lo, hi)


def _synthesis_rows(a: np.ndarray, d: np.ndarray, bank: WaveletFilterBank, kernels):
    _, _, slo, shi = _taps(bank)
    return kernels.synthesis(
        np.ascontiguousarray(a, dtype=np.float64),
        np.ascontiguousarray(d, dtype=np.float64),
        slo,
        shi,
    )


def dwt1d(signal, bank, *, kernels=None) -> tuple[np.ndarray, np.ndarray]:
    """One level of the periodic 1D DWT.

    Parameters
    ----------
    signal : array_like
        Real sequence of even length.
    bank : WaveletFilterBank or str
        Filter bank or basis name.

    Returns
    -------
    approx, detail : ndarray
        Each of length ``len(signal) // 2``.
    """
    bank = get_filter_bank(bank)
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise TransformError("dwt1d expects a 1D sequence")
    if x.size < 2 or x.size % 2:
        raise TransformError(f"dwt1d needs an even length >= 2, got {x.size}")
    a, d = _analysis_rows(x[None, :], bank, kernels or _backend.kernels)
    return a[0], d[0]


def idwt1d(approx, detail, bank, *, kernels=None) -> np.ndarray:
    """Inverse of :func:`dwt1d`; returns a sequence of twice the input length."""
    bank = get_filter_bank(bank)
    a = np.asarray(approx, dtype=np.float64)
    d = np.asarray(detail, dtype=np.float64)
    if a.ndim != 1 or d.ndim != 1:
        raise TransformError("idwt1d expects 1D sequences")
    if a.shape != d.shape:
        raise TransformError(f"approx/detail length mismatch: {a.size} vs {d.size}")
    if a.size < 1:
        raise TransformError("idwt1d needs at least one coefficient")
    return _synthesis_rows(a[None, :], d[None, :], bank, kernels or _backend.kernels)[0]


@dataclass(eq=False)
class WaveletPyramid:
    """Multi-level 2D decomposition.

    ``details[k - 1]`` holds the ``(LH, HL, HH)`` blocks of level ``k``;
    level 1 is the finest. ``approx`` is the LL block of the deepest level.
    """

    approx: np.ndarray
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    basis: str
    original_dims: tuple[int, int]
    kernels: object = field(default=None, repr=False)

    @property
    def levels(self) -> int:
        return len(self.details)

    @property
    def size(self) -> int:
        return self.approx.size + sum(b.size for lvl in self.details for b in lvl)

    def subbands(self):
        """Yield ``(level, orientation, block)`` for every detail block."""
        for k, blocks in enumerate(self.details, start=1):
            for name, block in zip(ORIENTATIONS, blocks):
                yield k, name, block

    def replace(self, approx=None, details=None) -> "WaveletPyramid":
        """Copy with the given blocks swapped in (no arrays are shared-mutated)."""
        return WaveletPyramid(
            approx=self.approx if approx is None else approx,
            details=list(self.details) if details is None else details,
            basis=self.basis,
            original_dims=self.original_dims,
            kernels=self.kernels,
        )

    def validate(self) -> None:
        h, w = self.original_dims
        if self.levels < 1:
            raise TransformError("pyramid has no detail levels")
        for k, blocks in enumerate(self.details, start=1):
            want = (h >> k, w >> k)
            if len(blocks) != 3:
                raise TransformError(f"level {k} needs 3 detail blocks, got {len(blocks)}")
            for name, block in zip(ORIENTATIONS, blocks):
                if np.shape(block) != want:
                    raise TransformError(
                        f"level {k} {name} block is {np.shape(block)}, expected {want}"
                    )
        want = (h >> self.levels, w >> self.levels)
        if np.shape(self.approx) != want:
            raise TransformError(f"approx block is {np.shape(self.approx)}, expected {want}")


def _check_levels(shape, levels: int):
    if levels < 1:
        raise TransformError("levels must be >= 1")
    m = 1 << levels
    h, w = shape
    if h % m or w % m:
        raise TransformError(
            f"{levels} levels need dimensions divisible by {m}; got {h}x{w} "
            f"(pad with image.pad_symmetric(img, {m}))"
        )


def dwt2d(img, bank, levels: int, *, kernels=None) -> WaveletPyramid:
    """Multi-level separable 2D DWT (rows, then columns, recursing on LL)."""
    bank = get_filter_bank(bank)
    kernels = kernels or _backend.kernels
    x = as_array(img)
    if x.ndim != 2:
        raise TransformError("dwt2d expects a 2D image")
    _check_levels(x.shape, levels)
    details = []
    ll = x
    for _ in range(levels):
        a_r, d_r = _analysis_rows(ll, bank, kernels)
        half_w = a_r.shape[1]
        cols = np.concatenate([a_r, d_r], axis=1).T
        lo, hi = _analysis_rows(cols, bank, kernels)
        ll = lo[:half_w].T
        details.append((hi[:half_w].T.copy(), lo[half_w:].T.copy(), hi[half_w:].T.copy()))
        ll = ll.copy()
    return WaveletPyramid(
        approx=ll,
        details=details,
        basis=bank.name,
        original_dims=tuple(x.shape),
        kernels=kernels,
    )


def reconstruct(pyr: WaveletPyramid, *, kernels=None) -> np.ndarray:
    """Inverse transform as a raw array (no Image validation)."""
    pyr.validate()
    bank = get_filter_bank(pyr.basis)
    kernels = kernels or pyr.kernels or _backend.kernels
    ll = np.asarray(pyr.approx, dtype=np.float64)
    for lh, hl, hh in reversed(pyr.details):
        # Undo the column pass for the row-low and row-high halves together.
        lo = np.concatenate([ll, hl], axis=1).T
        hi = np.concatenate([lh, hh], axis=1).T
        cols = _synthesis_rows(lo, hi, bank, kernels).T
        half_w = ll.shape[1]
        ll = _synthesis_rows(cols[:, :half_w], cols[:, half_w:], bank, kernels)
    return ll


def idwt2d(pyr: WaveletPyramid, *, kernels=None) -> Image:
    """Inverse of :func:`dwt2d`."""
    return Image(reconstruct(pyr, kernels=kernels))
