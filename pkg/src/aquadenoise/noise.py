"""Underwater ambient-noise spectra and colored-noise synthesis.

Ambient noise is modeled as the sum of four components, each given in dB as
a function of frequency ``f`` in kHz (``log`` is base 10)::

    turbulence  17 - 30 log f
    shipping    40 + 20 (s - 5) + 26 log f - 60 log(f + 0.03)
    wind        50 + 7.5 sqrt(w) + 20 log f - 40 log(f + 0.4)
    thermal    -15 + 20 log f

with shipping activity ``s`` and wind speed ``w`` (m/s).

Noise sequences are produced by spectral shaping: white Gaussian samples are
transformed with a real FFT, each bin is scaled by the square root of the
target PSD, and the inverse FFT is normalised to an exact sample variance of
``10 ** (power_db / 10)`` (8-bit intensity units squared).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from aquadenoise.image import Image, as_array

__all__ = [
    "COMPONENTS",
    "PSD_MODES",
    "NOISE_MODELS",
    "RNG_ALGORITHM",
    "DEFAULT_SEED",
    "AmbientParams",
    "NoiseSpec",
    "PsdCurve",
    "component_psd",
    "total_psd",
    "psd_curve",
    "write_psd_csv",
    "shaping_gain",
    "generate_colored_noise",
    "corrupt_image",
]

COMPONENTS = ("turbulence", "shipping", "wind", "thermal")
PSD_MODES = ("linear_sum", "db_sum")
NOISE_MODELS = ("ambient", "powerlaw", "white")
RNG_ALGORITHM = "PCG64"
DEFAULT_SEED = 42


@dataclass(frozen=True)
class AmbientParams:
    """Parameters of the ambient-noise model.

    Attributes
    ----------
    shipping : float
        Shipping activity factor ``s`` in [0, 9]; 5 leaves the shipping term
        at its nominal level.
    wind : float
        Wind speed in m/s, >= 0.
    sample_rate : float
        Sampling rate in Hz used to map FFT bins to frequencies.
    """

    shipping: float = 5.0
    wind: float = 5.0
    sample_rate: float = 200e3

    def __post_init__(self):
        if not 0.0 <= self.shipping <= 9.0:
            raise ValueError(f"shipping factor must be in [0, 9], got {self.shipping}")
        if not self.wind >= 0.0:
            raise ValueError(f"wind speed must be >= 0 m/s, got {self.wind}")
        if not self.sample_rate > 0.0:
            raise ValueError(f"sample rate must be > 0 Hz, got {self.sample_rate}")


def _check_freq(f_khz):
    f = np.asarray(f_khz, dtype=np.float64)
    if np.any(~(f > 0)):
        raise ValueError("frequency must be positive")
    return f


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def component_psd(component: str, f_khz, params: AmbientParams = AmbientParams()):
    """Level in dB of one ambient-noise component at ``f_khz`` (kHz).

    Accepts scalars or arrays.
    """
    f = _check_freq(f_khz)
    lg = np.log10
    if component == "turbulence":
        level = 17.0 - 30.0 * lg(f)
    elif component == "shipping":
        s = params.shipping
        level = 40.0 + 20.0 * (s - 5.0) + 26.0 * lg(f) - 60.0 * lg(f + 0.03)
    elif component == "wind":
        w = params.wind
        level = 50.0 + 7.5 * math.sqrt(w) + 20.0 * lg(f) - 40.0 * lg(f + 0.4)
    elif component == "thermal":
        level = -15.0 + 20.0 * lg(f)
    else:
        raise ValueError(f"unknown noise component {component!r}; expected one of {COMPONENTS}")
    return _scalar(level)


def total_psd(f_khz, params: AmbientParams = AmbientParams(), mode: str = "linear_sum"):
    """Total ambient-noise level in dB.

    ``linear_sum`` adds the component powers, ``10 log10(sum 10**(N_i/10))``.
    ``db_sum`` adds the dB values themselves, which is how the four-term sum
    is sometimes written but has no physical meaning; it is kept for
    comparison.
    """
    levels = [np.asarray(component_psd(c, f_khz, params)) for c in COMPONENTS]
    if mode == "linear_sum":
        # log-sum-exp form keeps 10**(L/10) from overflowing for large L.
        stacked = np.stack(levels) / 10.0
        peak = stacked.max(axis=0)
        total = 10.0 * (peak + np.log10(np.sum(10.0 ** (stacked - peak), axis=0)))
    elif mode == "db_sum":
        total = sum(levels)
    else:
        raise ValueError(f"unknown PSD mode {mode!r}; expected one of {PSD_MODES}")
    return _scalar(total)


@dataclass(frozen=True)
class PsdCurve:
    frequencies: np.ndarray  # Hz, strictly increasing
    levels: np.ndarray  # dB
    components: Optional[dict] = None  # name -> dB array

    def __post_init__(self):
        if len(self.frequencies) != len(self.levels):
            raise ValueError("frequencies and levels must have equal lengths")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")

    def dominant(self) -> list[str]:
        """Name of the largest component at each frequency."""
        if self.components is None:
            raise ValueError("curve was built without component levels")
        table = np.stack([self.components[c] for c in COMPONENTS])
        return [COMPONENTS[i] for i in np.argmax(table, axis=0)]


def psd_curve(
    params: AmbientParams = AmbientParams(),
    mode: str = "linear_sum",
    n_points: int = 512,
    f_lo: float = 200.0,
    f_hi: Optional[float] = None,
) -> PsdCurve:
    """Evaluate the total PSD on a log-spaced grid from ``f_lo`` to ``f_hi`` Hz.

    ``f_hi`` defaults to the Nyquist frequency. Per-component levels are
    included in the result.
    """
    nyquist = params.sample_rate / 2.0
    if f_hi is None:
        f_hi = nyquist
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if not 0.0 < f_lo < f_hi:
        raise ValueError(f"need 0 < f_lo < f_hi, got f_lo={f_lo}, f_hi={f_hi}")
    if f_hi > nyquist * (1 + 1e-12):
        raise ValueError(f"f_hi={f_hi} Hz exceeds the Nyquist frequency {nyquist} Hz")
    freqs = np.geomspace(f_lo, f_hi, n_points)
    freqs[0], freqs[-1] = f_lo, f_hi
    f_khz = freqs / 1000.0
    comps = {c: np.asarray(component_psd(c, f_khz, params)) for c in COMPONENTS}
    levels = np.asarray(total_psd(f_khz, params, mode))
    return PsdCurve(freqs, levels, comps)


def write_psd_csv(curve: PsdCurve, fh, components: bool = False) -> None:
    """Write ``frequency_hz,level_db`` rows (plus component columns if asked)."""
    writer = csv.writer(fh, lineterminator="\n")
    header = ["frequency_hz", "level_db"]
    if components:
        header += [f"{c}_db" for c in COMPONENTS]
    writer.writerow(header)
    for i, (f, lvl) in enumerate(zip(curve.frequencies, curve.levels)):
        row = [repr(float(f)), repr(float(lvl))]
        if components:
            row += [repr(float(curve.components[c][i])) for c in COMPONENTS]
        writer.writerow(row)


@dataclass(frozen=True)
class NoiseSpec:
    """What noise to synthesise.

    ``model`` is ``"ambient"`` (spectrum from :class:`AmbientParams`),
    ``"powerlaw"`` (PSD ``1 / f**beta``) or ``"white"``. ``power_db`` sets the
    sample variance to ``10 ** (power_db / 10)``.
    """

    model: str = "ambient"
    power_db: float = 0.0
    seed: int = DEFAULT_SEED
    beta: float = 1.0
    ambient: AmbientParams = field(default_factory=AmbientParams)
    psd_mode: str = "linear_sum"

    def __post_init__(self):
        if self.model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.model!r}; expected one of {NOISE_MODELS}")
        if self.model == "powerlaw" and not self.beta > 0:
            raise ValueError(f"power-law exponent beta must be > 0, got {self.beta}")
        if not math.isfinite(self.power_db):
            raise ValueError("power_db must be finite (use a very low value for near-zero noise)")
        if self.psd_mode not in PSD_MODES:
            raise ValueError(f"unknown PSD mode {self.psd_mode!r}")

    @property
    def variance(self) -> float:
        return 10.0 ** (self.power_db / 10.0)


def shaping_gain(spec: NoiseSpec, n: int) -> np.ndarray:
    """Amplitude gain ``sqrt(S(f_k))`` for each of the ``n // 2 + 1`` rfft bins.

    The DC bin reuses the first positive-frequency gain so that ``1/f``-type
    spectra stay finite.
    """
    freqs = np.fft.rfftfreq(n, d=1.0 / spec.ambient.sample_rate)
    gain = np.ones_like(freqs)
    if spec.model == "white":
        return gain
    pos = freqs[1:]
    if spec.model == "ambient":
        level_db = np.asarray(total_psd(pos / 1000.0, spec.ambient, spec.psd_mode))
        # Relative gains only matter; subtract the peak to keep powers in range.
        gain[1:] = 10.0 ** ((level_db - level_db.max()) / 20.0)
    else:
        gain[1:] = (pos / pos[0]) ** (-spec.beta / 2.0)
    gain[0] = gain[1]
    return gain


def generate_colored_noise(spec: NoiseSpec, n: int) -> np.ndarray:
    """Draw ``n`` noise samples for ``spec``.

    Deterministic for a given ``spec.seed`` (numpy ``PCG64`` bit generator).
    The result has zero mean and sample variance ``spec.variance`` to
    rounding error.
    """
    n = int(n)
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    z = rng.standard_normal(n)
    if spec.model != "white":
        z = np.fft.irfft(np.fft.rfft(z) * shaping_gain(spec, n), n)
    z = z - z.mean()
    z /= math.sqrt(np.mean(z * z))
    return z * math.sqrt(spec.variance)


def corrupt_image(img, spec: NoiseSpec) -> tuple[Image, np.ndarray]:
    """Add raster-scanned noise to ``img`` (no clamping).

    One 1D sequence of ``width * height`` samples is generated and laid out
    row by row, the way a time series corrupts a transmitted raster.

    Returns
    -------
    noisy : Image
    noise : ndarray
        The raw 1D noise sequence.
    """
    data = as_array(img)
    noise = generate_colored_noise(spec, data.size)
    return Image(data + noise.reshape(data.shape)), noise
