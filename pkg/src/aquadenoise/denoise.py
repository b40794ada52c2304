"""Level-dependent wavelet shrinkage (MUTE) and the comparison baselines.

Pipeline: 2D DWT -> per-subband noise estimate -> threshold
``lambda = c * sigma * sqrt(2 ln N)`` -> soft/hard shrinkage -> inverse DWT.

``sigma`` is the median absolute deviation estimate ``median(|X|) / 0.6745``
computed per detail subband (or pooled per level). ``N`` is the pixel count
of the transformed image. The approximation block is never thresholded.

The factor ``c`` is fixed, or chosen against a clean reference image:

``sweep``
    one ``c`` for every level from ``{step, 2 step, ..., 1}``.
``sweep_per_level``
    an independent ``c`` per level from the same grid, found by coordinate
    descent on the reconstruction error. For orthogonal bases the error
    separates across levels, so this is the exact joint optimum.

Sweeps need the clean image and are a benchmarking tool, not a blind
denoiser; ``fixed`` is the blind path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union

import numpy as np

from aquadenoise import metrics
from aquadenoise.image import Image, as_array
from aquadenoise.wavelet import ORIENTATIONS, WaveletPyramid, dwt2d, get_filter_bank, reconstruct
from aquadenoise.whitening import ArModel, fit_ar, unwhiten, whiten

__all__ = [
    "MAD_SCALE",
    "THRESHOLD_MODES",
    "C_MODES",
    "SIGMA_SCOPES",
    "BASELINES",
    "DenoiseConfig",
    "ThresholdSet",
    "DenoiseReport",
    "estimate_sigma",
    "universal_scale",
    "compute_thresholds",
    "global_thresholds",
    "soft_threshold",
    "hard_threshold",
    "apply_threshold",
    "denoise_image",
    "denoise_baseline_global",
    "denoise_baseline_prewhiten",
]

MAD_SCALE = 0.6745
THRESHOLD_MODES = ("soft", "hard")
C_MODES = ("fixed", "sweep", "sweep_per_level")
SIGMA_SCOPES = ("per_subband", "per_level_pooled")
BASELINES = ("none", "global_single_level", "prewhiten")

Factor = Union[float, Mapping[int, float]]


@dataclass(frozen=True)
class DenoiseConfig:
    basis: str = "sym4"
    levels: int = 4
    thresholding: str = "soft"
    c_mode: str = "sweep"
    c: float = 1.0
    c_step: float = 0.1
    sigma_scope: str = "per_subband"
    baseline: str = "none"
    prewhiten_order: int = 10

    def __post_init__(self):
        get_filter_bank(self.basis)
        if self.levels < 1:
            raise ValueError("levels must be >= 1")
        if self.thresholding not in THRESHOLD_MODES:
            raise ValueError(f"thresholding must be one of {THRESHOLD_MODES}")
        if self.c_mode not in C_MODES:
            raise ValueError(f"c_mode must be one of {C_MODES}")
        if self.c_mode == "fixed" and not 0 < self.c <= 1:
            raise ValueError(f"fixed c must be in (0, 1], got {self.c}")
        if not 0 < self.c_step < 1:
            raise ValueError(f"sweep step must be in (0, 1), got {self.c_step}")
        if self.sigma_scope not in SIGMA_SCOPES:
            raise ValueError(f"sigma_scope must be one of {SIGMA_SCOPES}")
        if self.baseline not in BASELINES:
            raise ValueError(f"baseline must be one of {BASELINES}")
        if self.prewhiten_order < 1:
            raise ValueError("prewhiten order must be >= 1")

    @property
    def sweeps(self) -> bool:
        return self.c_mode != "fixed"

    def candidates(self) -> list[float]:
        """Sweep grid ``step, 2 step, ...`` up to and including 1."""
        steps = int(math.floor(1.0 / self.c_step + 1e-9))
        grid = [round(k * self.c_step, 10) for k in range(1, steps + 1)]
        if grid[-1] < 1.0:
            grid.append(1.0)
        return grid


def estimate_sigma(coeffs) -> float:
    """Robust noise level ``median(|coeffs|) / 0.6745``."""
    x = np.asarray(coeffs, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot estimate sigma of an empty block")
    return float(np.median(np.abs(x))) / MAD_SCALE


def universal_scale(n: int) -> float:
    """``sqrt(2 ln n)``."""
    return math.sqrt(2.0 * math.log(n))


@dataclass(frozen=True)
class ThresholdSet:
    """Thresholds and noise estimates keyed by ``(level, orientation)``."""

    thresholds: dict
    sigmas: dict
    factors: dict  # level -> c
    n: int

    @property
    def c(self) -> float:
        """The common factor, or the mean over levels when they differ."""
        vals = [self.factors[k] for k in sorted(self.factors)]
        if all(v == vals[0] for v in vals):
            return vals[0]
        return float(np.mean(vals))

    def keys(self):
        return self.thresholds.keys()

    def __getitem__(self, key) -> float:
        return self.thresholds[key]

    def scaled(self, factors: Mapping[int, float]) -> "ThresholdSet":
        """Same sigmas with new per-level factors."""
        return _make_thresholds(self.sigmas, factors, self.n)


def _factor_map(c: Factor, levels) -> dict:
    if isinstance(c, Mapping):
        factors = {k: float(c[k]) for k in levels}
    else:
        factors = {k: float(c) for k in levels}
    for k, v in factors.items():
        if not 0 < v <= 1:
            raise ValueError(f"threshold factor c must be in (0, 1], got {v} at level {k}")
    return factors


def _make_thresholds(sigmas: dict, c: Factor, n: int) -> ThresholdSet:
    levels = sorted({k for k, _ in sigmas})
    factors = _factor_map(c, levels)
    scale = universal_scale(n)
    thresholds = {key: factors[key[0]] * s * scale for key, s in sigmas.items()}
    return ThresholdSet(thresholds=thresholds, sigmas=dict(sigmas), factors=factors, n=n)


def compute_thresholds(pyr: WaveletPyramid, c: Factor, scope: str = "per_subband") -> ThresholdSet:
    """Level-dependent thresholds for every detail subband of ``pyr``.

    ``c`` may be a single factor or a ``{level: factor}`` mapping.
    """
    if scope not in SIGMA_SCOPES:
        raise ValueError(f"scope must be one of {SIGMA_SCOPES}")
    sigmas = {}
    for k, blocks in enumerate(pyr.details, start=1):
        if scope == "per_subband":
            for name, block in zip(ORIENTATIONS, blocks):
                sigmas[(k, name)] = estimate_sigma(block)
        else:
            pooled = estimate_sigma(np.concatenate([b.ravel() for b in blocks]))
            for name in ORIENTATIONS:
                sigmas[(k, name)] = pooled
    n = pyr.original_dims[0] * pyr.original_dims[1]
    return _make_thresholds(sigmas, c, n)


def global_thresholds(pyr: WaveletPyramid, c: float) -> ThresholdSet:
    """One threshold for all subbands, from the finest HH block's sigma."""
    sigma = estimate_sigma(pyr.details[0][2])
    sigmas = {(k, name): sigma for k, name, _ in pyr.subbands()}
    n = pyr.original_dims[0] * pyr.original_dims[1]
    return _make_thresholds(sigmas, c, n)


def soft_threshold(x, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - lam, 0.0)


def hard_threshold(x, lam: float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) > lam, x, 0.0)


_SHRINK = {"soft": soft_threshold, "hard": hard_threshold}


def apply_threshold(pyr: WaveletPyramid, thr: ThresholdSet, mode: str = "soft") -> WaveletPyramid:
    """Shrink every detail block; returns a new pyramid, ``pyr`` is untouched."""
    try:
        shrink = _SHRINK[mode]
    except KeyError:
        raise ValueError(f"thresholding mode must be one of {THRESHOLD_MODES}") from None
    details = []
    for k, blocks in enumerate(pyr.details, start=1):
        out = []
        for name, block in zip(ORIENTATIONS, blocks):
            if (k, name) not in thr.thresholds:
                raise KeyError(f"no threshold for level {k} {name}")
            out.append(shrink(block, thr.thresholds[(k, name)]))
        details.append(tuple(out))
    return pyr.replace(approx=pyr.approx.copy(), details=details)


@dataclass
class DenoiseReport:
    method: str
    basis: str
    levels: int
    thresholding: str
    c_mode: str
    c_used: float
    c_by_level: dict
    thresholds: ThresholdSet
    psnr_noisy: Optional[float] = None
    psnr_denoised: Optional[float] = None
    candidates: list = field(default_factory=list)  # (c or per-level tuple, psnr)
    notes: list = field(default_factory=list)
    ar_model: Optional[ArModel] = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "basis": self.basis,
            "levels": self.levels,
            "thresholding": self.thresholding,
            "c_mode": self.c_mode,
            "c_used": self.c_used,
            "c_by_level": {str(k): v for k, v in self.c_by_level.items()},
            "sigmas": {f"{k}{o}": s for (k, o), s in self.thresholds.sigmas.items()},
            "thresholds": {f"{k}{o}": t for (k, o), t in self.thresholds.thresholds.items()},
            "psnr_noisy_db": self.psnr_noisy,
            "psnr_denoised_db": self.psnr_denoised,
            "candidates": [[c, p] for c, p in self.candidates],
            "notes": list(self.notes),
            "ar_coefficients": None if self.ar_model is None else self.ar_model.coefficients.tolist(),
        }


ThresholdRule = Callable[[WaveletPyramid, Factor], ThresholdSet]


def _sse(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(np.vdot(d, d))


def _shrink_and_reconstruct(pyr, rule, c, mode, post):
    thr = rule(pyr, c)
    out = reconstruct(apply_threshold(pyr, thr, mode))
    return post(out), thr


def _sweep_global(pyr, rule, cfg, ref, post):
    best = None
    tried = []
    for c in cfg.candidates():
        out, thr = _shrink_and_reconstruct(pyr, rule, c, cfg.thresholding, post)
        value = metrics.psnr(ref, out)
        tried.append((c, value))
        # Strict comparison keeps the smallest c on ties.
        if best is None or value > best[0]:
            best = (value, c, out, thr)
    return best[1], best[2], best[3], tried


def _sweep_per_level(pyr, rule, cfg, ref, post):
    """Coordinate descent over one factor per level.

    The reconstruction is linear in the thresholded subbands, so it is the
    sum of an approximation-only part and one part per level. Each part is
    precomputed for every candidate, and the search only adds arrays.
    """
    grid = cfg.candidates()
    levels = list(range(1, pyr.levels + 1))
    zero = [tuple(np.zeros_like(b) for b in blocks) for blocks in pyr.details]
    base = post(reconstruct(pyr.replace(approx=pyr.approx, details=list(zero))))
    target = as_array(ref) - base
    unit = rule(pyr, 1.0)
    parts = {}
    for c in grid:
        shrunk = apply_threshold(pyr, unit.scaled({j: c for j in levels}), cfg.thresholding)
        for k in levels:
            details = list(zero)
            details[k - 1] = shrunk.details[k - 1]
            parts[k, c] = post(reconstruct(pyr.replace(approx=np.zeros_like(pyr.approx), details=details)))

    def total(choice):
        acc = np.zeros_like(target)
        for k in levels:
            acc += parts[k, choice[k]]
        return acc

    # Start from the best common factor.
    start = min(grid, key=lambda c: (_sse(target, total({k: c for k in levels})), c))
    choice = {k: start for k in levels}
    for _ in range(50):
        changed = False
        for k in levels:
            rest = target - (total(choice) - parts[k, choice[k]])
            best_c = choice[k]
            best_err = _sse(rest, parts[k, best_c])
            for c in grid:
                err = _sse(rest, parts[k, c])
                if err < best_err or (err == best_err and c < best_c):
                    best_c, best_err = c, err
            if best_c != choice[k]:
                choice[k] = best_c
                changed = True
        if not changed:
            break
    out, thr = _shrink_and_reconstruct(pyr, lambda p, _: unit.scaled(choice), None, cfg.thresholding, post)
    tried = [(tuple(choice[k] for k in levels), metrics.psnr(ref, out))]
    return choice, out, thr, tried


def _run(noisy, cfg, clean_ref, rule, method, *, per_level_ok=True, post=None, pre=None, notes=()):
    x = as_array(noisy)
    post = post or (lambda a: a)
    notes = list(notes)
    if cfg.sweeps and clean_ref is None:
        raise ValueError("sweep requires reference image")
    if clean_ref is not None and as_array(clean_ref).shape != x.shape:
        raise ValueError("reference image dimensions differ from the noisy image")
    work = pre(x) if pre is not None else x
    pyr = dwt2d(work, cfg.basis, cfg.levels)
    c_mode = cfg.c_mode
    if c_mode == "sweep_per_level" and not per_level_ok:
        notes.append("one threshold for all subbands: per-level sweep reduced to a common-c sweep")
        c_mode = "sweep"
    tried = []
    if c_mode == "fixed":
        out, thr = _shrink_and_reconstruct(pyr, rule, cfg.c, cfg.thresholding, post)
    elif c_mode == "sweep":
        _, out, thr, tried = _sweep_global(pyr, rule, cfg, clean_ref, post)
    else:
        _, out, thr, tried = _sweep_per_level(pyr, rule, cfg, clean_ref, post)
    report = DenoiseReport(
        method=method,
        basis=get_filter_bank(cfg.basis).name,
        levels=cfg.levels,
        thresholding=cfg.thresholding,
        c_mode=c_mode,
        c_used=thr.c,
        c_by_level=dict(thr.factors),
        thresholds=thr,
        candidates=tried,
        notes=notes,
    )
    if clean_ref is not None:
        report.psnr_noisy = metrics.psnr(clean_ref, x)
        report.psnr_denoised = metrics.psnr(clean_ref, out)
    return Image(out), report


def denoise_image(noisy, cfg: DenoiseConfig = DenoiseConfig(), clean_ref=None, *, noise_cal=None):
    """Denoise with level-dependent MUTE thresholds.

    Parameters
    ----------
    noisy : Image
        Dimensions must be divisible by ``2 ** cfg.levels``.
    cfg : DenoiseConfig
        ``cfg.baseline`` other than ``"none"`` dispatches to the matching
        baseline (``noise_cal`` is then required for ``"prewhiten"``).
    clean_ref : Image, optional
        Required when ``cfg.c_mode`` is a sweep.

    Returns
    -------
    denoised : Image
        Raw reconstruction, not clamped.
    report : DenoiseReport
    """
    if cfg.baseline == "global_single_level":
        return denoise_baseline_global(noisy, cfg, clean_ref)
    if cfg.baseline == "prewhiten":
        if noise_cal is None:
            raise ValueError("prewhiten baseline needs a noise calibration sequence")
        return denoise_baseline_prewhiten(noisy, noise_cal, cfg, clean_ref)
    rule = lambda pyr, c: compute_thresholds(pyr, c, cfg.sigma_scope)  # noqa: E731
    return _run(noisy, cfg, clean_ref, rule, "mute_per_level")


def denoise_baseline_global(noisy, cfg: DenoiseConfig = DenoiseConfig(), clean_ref=None):
    """Single-level baseline: one sigma (finest HH) and one threshold everywhere."""
    return _run(noisy, cfg, clean_ref, global_thresholds, "global", per_level_ok=False)


def denoise_baseline_prewhiten(noisy, noise_cal, cfg: DenoiseConfig = DenoiseConfig(), clean_ref=None):
    """Pre-whitening baseline.

    An AR(``cfg.prewhiten_order``) model is fitted to the noise-only
    calibration sequence. The raster-scanned noisy image is filtered with
    ``A(z)``, denoised with the global single-level rule, and filtered back
    with ``1 / A(z)``.
    """
    x = as_array(noisy)
    model = fit_ar(noise_cal, cfg.prewhiten_order)
    shape = x.shape
    pre = lambda a: whiten(a.ravel(), model).reshape(shape)  # noqa: E731
    post = lambda a: unwhiten(a.ravel(), model).reshape(shape)  # noqa: E731
    note = "AR whitening filter fitted on a noise-only calibration sequence (idealised: the noise is known)"
    img, report = _run(
        noisy,
        cfg,
        clean_ref,
        global_thresholds,
        "prewhiten",
        per_level_ok=False,
        pre=pre,
        post=post,
        notes=[note],
    )
    report.ar_model = model
    return img, report
