"""Corrupt / denoise / measure trials and their CSV and table reports."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Iterable, Optional

import numpy as np

from aquadenoise import metrics
from aquadenoise.denoise import DenoiseConfig, DenoiseReport, denoise_image
from aquadenoise.image import Image, as_array, crop, pad_symmetric
from aquadenoise.noise import DEFAULT_SEED, NoiseSpec, corrupt_image

__all__ = [
    "CSV_FIELDS",
    "METHODS",
    "TrialRecord",
    "TrialResult",
    "RunConfig",
    "SummaryRow",
    "run_trial",
    "run_bench",
    "summarize",
    "write_records_csv",
    "read_records_csv",
    "write_summary_csv",
    "format_summary",
]

CSV_FIELDS = (
    "method",
    "basis",
    "thresholding",
    "levels",
    "noise_power_db",
    "seed",
    "c_used",
    "psnr_noisy_db",
    "psnr_denoised_db",
    "mse_denoised",
    "nmse_denoised",
    "elapsed_ms",
)

# CLI/record method name -> DenoiseConfig.baseline
METHODS = {
    "mute_per_level": "none",
    "global": "global_single_level",
    "prewhiten": "prewhiten",
}


@dataclass(frozen=True)
class TrialRecord:
    method: str
    basis: str
    thresholding: str
    levels: int
    noise_power_db: float
    seed: int
    c_used: float
    psnr_noisy_db: float
    psnr_denoised_db: float
    mse_denoised: float
    nmse_denoised: float
    elapsed_ms: float

    def sort_key(self):
        return (self.method, self.basis, self.noise_power_db, self.seed)

    def row(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(repr(float(v)) if isinstance(v, float) else str(v))
        return out


@dataclass
class TrialResult:
    record: TrialRecord
    clean: Image
    noisy: Image
    denoised: Image
    report: DenoiseReport


@dataclass(frozen=True)
class RunConfig:
    """One experiment: every basis x noise power x trial for each method."""

    image: Optional[str] = None  # None: bundled test scene
    bases: tuple = ("db5", "sym4", "bior1.3")
    noise_powers: tuple = (0.0, 3.0, 5.0, 10.0, 15.0)
    trials: int = 20
    seed_base: int = DEFAULT_SEED
    methods: tuple = ("mute_per_level",)
    denoise: DenoiseConfig = field(default_factory=lambda: DenoiseConfig(c_mode="sweep_per_level"))
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    out_dir: str = "aqua_out"
    timing: bool = False
    jobs: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.bases or not self.noise_powers or not self.methods:
            raise ValueError("bases, noise powers and methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; expected one of {tuple(METHODS)}")

    def trial_specs(self):
        for method in self.methods:
            for basis in self.bases:
                for power in self.noise_powers:
                    for t in range(self.trials):
                        yield method, basis, float(power), self.seed_base + t


def run_trial(
    clean,
    method: str,
    basis: str,
    noise_power_db: float,
    seed: int,
    denoise_cfg: DenoiseConfig = DenoiseConfig(),
    noise: NoiseSpec = NoiseSpec(),
    timing: bool = False,
) -> TrialResult:
    """Pad, corrupt, denoise, crop and score one image.

    The noise is generated at the padded size; scores use the original
    region only. ``elapsed_ms`` is 0 unless ``timing`` is set, which keeps
    the CSV output reproducible byte for byte.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {tuple(METHODS)}")
    cfg = replace(denoise_cfg, basis=basis, baseline=METHODS[method])
    clean_img = clean if isinstance(clean, Image) else Image(as_array(clean))
    padded, dims = pad_symmetric(clean_img, 1 << cfg.levels)
    spec = replace(noise, power_db=float(noise_power_db), seed=int(seed))
    noisy_pad, noise_seq = corrupt_image(padded, spec)
    start = time.perf_counter()
    denoised_pad, report = denoise_image(
        noisy_pad, cfg, padded if cfg.sweeps else None, noise_cal=noise_seq
    )
    elapsed = (time.perf_counter() - start) * 1e3 if timing else 0.0
    noisy = crop(noisy_pad, dims)
    denoised = crop(denoised_pad, dims)
    err = metrics.mse(clean_img, denoised)
    try:
        normalized = metrics.nmse(clean_img, denoised)
    except ValueError:
        normalized = math.nan
    record = TrialRecord(
        method=method,
        basis=report.basis,
        thresholding=cfg.thresholding,
        levels=cfg.levels,
        noise_power_db=float(noise_power_db),
        seed=int(seed),
        c_used=float(report.c_used),
        psnr_noisy_db=metrics.psnr(clean_img, noisy),
        psnr_denoised_db=metrics.psnr_from_mse(err),
        mse_denoised=err,
        nmse_denoised=normalized,
        elapsed_ms=elapsed,
    )
    return TrialResult(record, clean_img, noisy, denoised, report)


def _trial_worker(args):
    clean, spec, cfg, noise, timing = args
    method, basis, power, seed = spec
    return run_trial(clean, method, basis, power, seed, cfg, noise, timing).record


def run_bench(cfg: RunConfig, clean, on_record=None) -> list[TrialRecord]:
    """Run every trial of ``cfg`` on ``clean``; records come back sorted.

    ``on_record`` is called with each finished record (used to flush partial
    results when a later trial fails).
    """
    clean = clean if isinstance(clean, Image) else Image(as_array(clean))
    jobs = [(clean, spec, cfg.denoise, cfg.noise, cfg.timing) for spec in cfg.trial_specs()]
    records = []
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for rec in pool.map(_trial_worker, jobs, chunksize=4):
                records.append(rec)
                if on_record:
                    on_record(rec)
    else:
        for job in jobs:
            rec = _trial_worker(job)
            records.append(rec)
            if on_record:
                on_record(rec)
    return sorted(records, key=TrialRecord.sort_key)


def write_records_csv(records: Iterable[TrialRecord], path) -> None:
    records = sorted(records, key=TrialRecord.sort_key)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for rec in records:
            writer.writerow(rec.row())


def read_records_csv(path) -> list[TrialRecord]:
    types = {f.name: f.type for f in fields(TrialRecord)}
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        for row in reader:
            kwargs = {}
            for name, value in row.items():
                t = types[name]
                kwargs[name] = int(value) if t in (int, "int") else float(value) if t in (float, "float") else value
            out.append(TrialRecord(**kwargs))
    return out


@dataclass(frozen=True)
class SummaryRow:
    noise_power_db: float
    trials: int
    psnr_noisy_mean: float
    psnr_denoised_mean: float
    psnr_denoised_std: float
    mse_mean: float
    mse_std: float
    c_mean: float


def summarize(records: Iterable[TrialRecord]) -> dict:
    """Group by ``(method, basis)`` into rows per noise power (mean and std)."""
    groups: dict = {}
    for rec in records:
        groups.setdefault((rec.method, rec.basis), {}).setdefault(rec.noise_power_db, []).append(rec)
    summary = {}
    for key in sorted(groups):
        rows = []
        for power in sorted(groups[key]):
            recs = groups[key][power]
            psnr = np.array([r.psnr_denoised_db for r in recs])
            mse = np.array([r.mse_denoised for r in recs])
            rows.append(
                SummaryRow(
                    noise_power_db=power,
                    trials=len(recs),
                    psnr_noisy_mean=float(np.mean([r.psnr_noisy_db for r in recs])),
                    psnr_denoised_mean=float(psnr.mean()),
                    psnr_denoised_std=float(psnr.std()),
                    mse_mean=float(mse.mean()),
                    mse_std=float(mse.std()),
                    c_mean=float(np.mean([r.c_used for r in recs])),
                )
            )
        summary[key] = rows
    return summary


def write_summary_csv(rows: list[SummaryRow], path) -> None:
    names = [f.name for f in fields(SummaryRow)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            d = asdict(row)
            writer.writerow([repr(d[n]) if isinstance(d[n], float) else d[n] for n in names])


def format_summary(summary: dict) -> str:
    """Aligned text tables, one per (method, basis): noise power vs PSNR and MSE."""
    blocks = []
    for (method, basis), rows in summary.items():
        lines = [
            f"{method} / {basis}",
            f"{'noise (dB)':>10}  {'noisy PSNR':>10}  {'PSNR (dB)':>16}  {'MSE':>18}  {'c':>5}  {'n':>3}",
        ]
        for r in rows:
            lines.append(
                f"{r.noise_power_db:>10g}  {r.psnr_noisy_mean:>10.2f}  "
                f"{r.psnr_denoised_mean:>8.2f} ± {r.psnr_denoised_std:<5.2f}  "
                f"{r.mse_mean:>9.4f} ± {r.mse_std:<6.4f}  {r.c_mean:>5.2f}  {r.trials:>3d}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
