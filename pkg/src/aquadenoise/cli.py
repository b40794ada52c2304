"""``aquadenoise`` command line: run, bench, psd, metrics and noisegen.

Exit codes: 0 success, 1 runtime failure (the message names the stage),
2 usage error. Options may also come from a JSON file given with
``--config``; keys are the long option names with dashes replaced by
underscores, and explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from aquadenoise import metrics
from aquadenoise.data import test_image
from aquadenoise.denoise import DenoiseConfig
from aquadenoise.experiment import (
    METHODS,
    RunConfig,
    TrialRecord,
    format_summary,
    run_bench,
    run_trial,
    summarize,
    write_records_csv,
    write_summary_csv,
)
from aquadenoise.image import load_image, save_image
from aquadenoise.noise import (
    DEFAULT_SEED,
    NOISE_MODELS,
    PSD_MODES,
    AmbientParams,
    NoiseSpec,
    generate_colored_noise,
    psd_curve,
    write_psd_csv,
)

__all__ = ["main", "build_parser", "StageError"]

SEED_ENV = "AQUA_SEED"

_DEFAULTS = {
    "image": None,
    "basis": "sym4",
    "bases": "db5,sym4,bior1.3",
    "levels": 4,
    "thresholding": "soft",
    "c": "sweep-level",
    "c_step": 0.1,
    "sigma_scope": "per_subband",
    "method": "mute_per_level",
    "methods": "mute_per_level",
    "order": 10,
    "noise_model": "ambient",
    "noise_power": 10.0,
    "powers": "0,3,5,10,15",
    "trials": 20,
    "beta": 1.0,
    "wind": 5.0,
    "shipping": 5.0,
    "fs": 200e3,
    "psd_mode": "linear_sum",
    "out_dir": "aqua_out",
    "csv": "run.csv",
    "jobs": 1,
    "timing": False,
    "samples": 65536,
}

_C_MODES = {"sweep": "sweep", "sweep-level": "sweep_per_level", "sweep_per_level": "sweep_per_level"}


class StageError(RuntimeError):
    def __init__(self, stage: str, err: Exception):
        super().__init__(f"{stage}: {err}")
        self.stage = stage


class _UsageError(Exception):
    pass


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, OSError, KeyError, RuntimeError) as err:
        raise StageError(name, err) from err


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _settings(args) -> dict:
    """Merge defaults < config file < flags."""
    merged = dict(_DEFAULTS)
    merged["seed"] = _default_seed()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise _UsageError(f"cannot read config {args.config}: {err}")
        if not isinstance(data, dict):
            raise _UsageError("config file must hold a JSON object")
        unknown = set(data) - set(merged) - {"seed_base"}
        if unknown:
            raise _UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "seed_base" in data:
            data["seed"] = data.pop("seed_base")
        merged.update(data)
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "config", "func"):
            merged[key] = value
    return merged


def _split(value, cast=str) -> tuple:
    items = value if isinstance(value, (list, tuple)) else str(value).split(",")
    try:
        out = tuple(cast(str(v).strip()) for v in items if str(v).strip())
    except ValueError as err:
        raise _UsageError(str(err))
    if not out:
        raise _UsageError("empty list")
    return out


def _denoise_config(s: dict, basis: str) -> DenoiseConfig:
    c = s["c"]
    if isinstance(c, str) and c in _C_MODES:
        c_mode, c_value = _C_MODES[c], 1.0
    else:
        try:
            c_mode, c_value = "fixed", float(c)
        except ValueError:
            raise _UsageError(f"--c must be sweep, sweep-level or a number in (0, 1], got {c!r}")
    return _stage(
        "config",
        DenoiseConfig,
        basis=basis,
        levels=int(s["levels"]),
        thresholding=s["thresholding"],
        c_mode=c_mode,
        c=c_value,
        c_step=float(s["c_step"]),
        sigma_scope=s["sigma_scope"],
        prewhiten_order=int(s["order"]),
    )


def _noise_spec(s: dict, power: float = 0.0, seed: int = DEFAULT_SEED) -> NoiseSpec:
    ambient = _stage(
        "config", AmbientParams, shipping=float(s["shipping"]), wind=float(s["wind"]), sample_rate=float(s["fs"])
    )
    return _stage(
        "config",
        NoiseSpec,
        model=s["noise_model"],
        power_db=float(power),
        seed=int(seed),
        beta=float(s["beta"]),
        ambient=ambient,
        psd_mode=s["psd_mode"],
    )


def _out_path(out_dir: Path, name: str) -> Path:
    """Resolve ``name`` inside ``out_dir``; anything escaping it is a usage error."""
    path = (out_dir / name).resolve()
    if out_dir.resolve() not in path.parents:
        raise _UsageError(f"output name {name!r} escapes the output directory")
    return path


def _record_table(records) -> str:
    cols = ("method", "basis", "noise_power_db", "seed", "c_used", "psnr_noisy_db", "psnr_denoised_db", "mse_denoised")
    lines = ["  ".join(f"{c:>16}" for c in cols)]
    for r in records:
        cells = []
        for c in cols:
            v = getattr(r, c)
            cells.append(f"{v:>16.4f}" if isinstance(v, float) else f"{v!s:>16}")
        lines.append("  ".join(cells))
    return "\n".join(lines)


def cmd_run(args) -> int:
    s = _settings(args)
    if not s["image"]:
        raise _UsageError("run requires --image")
    if s["method"] not in METHODS:
        raise _UsageError(f"--method must be one of {', '.join(METHODS)}")
    out_dir = Path(s["out_dir"])
    csv_path = _out_path(out_dir, s["csv"]) if s["csv"] else None
    clean = _stage("load", load_image, s["image"])
    cfg = _denoise_config(s, s["basis"])
    noise = _noise_spec(s)
    result = _stage(
        "denoise",
        run_trial,
        clean,
        s["method"],
        cfg.basis,
        float(s["noise_power"]),
        int(s["seed"]),
        cfg,
        noise,
        bool(s["timing"]),
    )
    _stage("save", out_dir.mkdir, parents=True, exist_ok=True)
    noisy_path = _out_path(out_dir, "noisy.pgm")
    denoised_path = _out_path(out_dir, "denoised.pgm")
    _stage("save", save_image, result.noisy, noisy_path)
    _stage("save", save_image, result.denoised, denoised_path)
    if csv_path is not None:
        _stage("save", write_records_csv, [result.record], csv_path)
    print(_record_table([result.record]))
    # What the 8-bit files actually deliver, after rounding and clipping.
    saved = _stage("metrics", metrics.score, clean, load_image(denoised_path))
    print(f"saved denoised.pgm: psnr_db={saved.psnr_db:.4f} mse={saved.mse:.4f} band={saved.band}")
    for note in result.report.notes:
        print(f"note: {note}")
    return 0


def cmd_bench(args) -> int:
    s = _settings(args)
    out_dir = Path(s["out_dir"])
    bases = _split(s["bases"])
    methods = _split(s["methods"])
    powers = _split(s["powers"], float)
    trials_path = _out_path(out_dir, "trials.csv")
    clean = _stage("load", load_image, s["image"]) if s["image"] else test_image()
    cfg = _stage(
        "config",
        RunConfig,
        image=s["image"],
        bases=bases,
        noise_powers=powers,
        trials=int(s["trials"]),
        seed_base=int(s["seed"]),
        methods=methods,
        denoise=_denoise_config(s, bases[0]),
        noise=_noise_spec(s),
        out_dir=str(out_dir),
        timing=bool(s["timing"]),
        jobs=int(s["jobs"]),
    )
    for basis in bases:
        _denoise_config(s, basis)
    _stage("save", out_dir.mkdir, parents=True, exist_ok=True)
    done: list[TrialRecord] = []
    try:
        records = run_bench(cfg, clean, on_record=done.append)
    except Exception as err:
        if done:
            write_records_csv(done, _out_path(out_dir, "trials.partial.csv"))
            print(f"wrote {len(done)} completed trials to trials.partial.csv", file=sys.stderr)
        raise StageError("denoise", err) from err
    _stage("save", write_records_csv, records, trials_path)
    summary = summarize(records)
    for (method, basis), rows in summary.items():
        _stage("save", write_summary_csv, rows, _out_path(out_dir, f"summary_{method}_{basis}.csv"))
    text = format_summary(summary)
    _stage("save", _out_path(out_dir, "summary.txt").write_text, text)
    print(text, end="")
    print(f"{len(records)} trials written to {trials_path}")
    return 0


def cmd_psd(args) -> int:
    s = _settings(args)
    params = _stage("config", AmbientParams, shipping=float(s["shipping"]), wind=float(s["wind"]), sample_rate=float(s["fs"]))
    f_hi = args.fhi if args.fhi is not None else params.sample_rate / 2
    if not 0 < args.flo < f_hi:
        raise _UsageError(f"need 0 < --flo < --fhi, got {args.flo} and {f_hi}")
    if f_hi > params.sample_rate / 2:
        raise _UsageError(f"--fhi {f_hi} exceeds the Nyquist frequency {params.sample_rate / 2}")
    if args.points < 2:
        raise _UsageError("--points must be >= 2")
    curve = _stage("psd", psd_curve, params, s["psd_mode"], args.points, args.flo, f_hi)
    if args.out:
        with _stage("save", open, args.out, "w", newline="") as fh:
            write_psd_csv(curve, fh, components=args.components)
    else:
        write_psd_csv(curve, sys.stdout, components=args.components)
    return 0


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else repr(x)


def cmd_metrics(args) -> int:
    ref = _stage("load", load_image, args.ref)
    test = _stage("load", load_image, args.test)
    q = _stage("metrics", metrics.score, ref, test)
    print(f"mse {_fmt(q.mse)}")
    print(f"psnr_db {_fmt(q.psnr_db)}")
    print(f"nmse {_fmt(q.nmse)}")
    print(f"mae {_fmt(q.mae)}")
    print(f"band {q.band}")
    return 0


def cmd_noisegen(args) -> int:
    s = _settings(args)
    spec = _noise_spec(s, float(s["noise_power"]), int(s["seed"]))
    seq = _stage("noise", generate_colored_noise, spec, int(s["samples"]))
    fh = _stage("save", open, args.out, "w") if args.out else sys.stdout
    try:
        fh.write("index,value\n")
        for i, v in enumerate(seq):
            fh.write(f"{i},{float(v)!r}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def _add_denoise_flags(p, multi: bool):
    if multi:
        p.add_argument("--bases", help="comma-separated wavelet bases (default db5,sym4,bior1.3)")
        p.add_argument("--methods", help=f"comma-separated methods from {', '.join(METHODS)}")
    else:
        p.add_argument("--basis", help="wavelet basis (default sym4)")
        p.add_argument("--method", help=f"one of {', '.join(METHODS)} (default mute_per_level)")
    p.add_argument("--levels", type=int, help="decomposition levels (default 4)")
    p.add_argument("--thresholding", choices=("soft", "hard"))
    p.add_argument("--c", help="sweep, sweep-level (default) or a fixed factor in (0, 1]")
    p.add_argument("--c-step", type=float, help="sweep grid step (default 0.1)")
    p.add_argument("--sigma-scope", choices=("per_subband", "per_level_pooled"))
    p.add_argument("--order", type=int, help="AR order of the pre-whitening baseline (default 10)")


def _add_noise_flags(p, power: bool = True, seed: bool = True):
    p.add_argument("--noise-model", choices=NOISE_MODELS)
    p.add_argument("--beta", type=float, help="power-law exponent (powerlaw model)")
    _add_ambient_flags(p)
    if power:
        p.add_argument("--noise-power", type=float, help="noise power in dB (default 10)")
    if seed:
        p.add_argument("--seed", type=int, help=f"RNG seed (default {SEED_ENV} or {DEFAULT_SEED})")


def _add_ambient_flags(p):
    p.add_argument("--wind", type=float, help="wind speed in m/s (default 5)")
    p.add_argument("--shipping", type=float, help="shipping factor 0-9 (default 5)")
    p.add_argument("--fs", type=float, help="sample rate in Hz (default 200000)")
    p.add_argument("--psd-mode", choices=PSD_MODES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aquadenoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="corrupt and denoise one image")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--image", help="input PGM or PNG")
    _add_denoise_flags(p, multi=False)
    _add_noise_flags(p)
    p.add_argument("--out-dir", help="output directory (default aqua_out)")
    p.add_argument("--csv", help="CSV file name inside the output directory (default run.csv)")
    p.add_argument("--timing", action="store_true", default=None, help="record elapsed_ms")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="full basis x noise power x seed sweep")
    p.add_argument("--config", help="JSON file of option defaults")
    p.add_argument("--image", help="input image (default: bundled test scene)")
    _add_denoise_flags(p, multi=True)
    _add_noise_flags(p, power=False, seed=False)
    p.add_argument("--powers", help="comma-separated noise powers in dB (default 0,3,5,10,15)")
    p.add_argument("--trials", type=int, help="seeds per condition (default 20)")
    p.add_argument("--seed-base", dest="seed", type=int, help="first seed; trial i uses seed_base + i")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--out-dir", help="output directory (default aqua_out)")
    p.add_argument("--timing", action="store_true", default=None, help="record elapsed_ms")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("psd", help="write the ambient-noise PSD curve as CSV")
    _add_ambient_flags(p)
    p.add_argument("--flo", type=float, default=200.0, help="lowest frequency in Hz (default 200)")
    p.add_argument("--fhi", type=float, help="highest frequency in Hz (default Nyquist)")
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--mode", dest="psd_mode", choices=PSD_MODES)
    p.add_argument("--components", action="store_true", help="add per-component columns")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_psd)

    p = sub.add_parser("metrics", help="compare two images")
    p.add_argument("ref")
    p.add_argument("test")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("noisegen", help="dump a noise sequence as CSV")
    _add_noise_flags(p)
    p.add_argument("--samples", type=int, help="sequence length (default 65536)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_noisegen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as err:
        parser.exit(2, f"aquadenoise {args.command}: error: {err}\n")
    except StageError as err:
        print(f"aquadenoise {args.command}: {err.stage} failed: {err.__cause__}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
