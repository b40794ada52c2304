import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from aquadenoise import cli, data, experiment
from aquadenoise.experiment import CSV_FIELDS, read_records_csv
from aquadenoise.image import Image, save_image
from aquadenoise.noise import AmbientParams, component_psd

SMALL_BENCH = ["bench", "--bases", "haar", "--powers", "0,15", "--c", "sweep"]


@pytest.fixture
def small_image(tmp_path, rng):
    path = tmp_path / "in.pgm"
    save_image(Image(rng.integers(40, 200, size=(40, 36)).astype(float)), path)
    return path


def test_run_writes_three_artifacts(tmp_path, small_image, capsys):
    out = tmp_path / "out"
    code = cli.main(
        ["run", "--image", str(small_image), "--basis", "sym4", "--levels", "2", "--noise-power", "10", "--seed", "42", "--c", "sweep", "--out-dir", str(out)]
    )
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == ["denoised.pgm", "noisy.pgm", "run.csv"]
    rows = list(csv.reader(open(out / "run.csv")))
    assert tuple(rows[0]) == CSV_FIELDS and len(rows) == 2
    assert rows[1][:6] == ["mute_per_level", "sym4", "soft", "2", "10.0", "42"]
    assert "saved denoised.pgm" in capsys.readouterr().out


def test_run_missing_image_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--basis", "sym4"])
    assert exc.value.code == 2
    assert "--image" in capsys.readouterr().err


def test_run_unknown_basis(tmp_path, small_image, capsys):
    assert cli.main(["run", "--image", str(small_image), "--basis", "bior9.9", "--out-dir", str(tmp_path)]) == 1
    assert "unknown basis 'bior9.9'" in capsys.readouterr().err


def test_run_missing_file_names_stage(tmp_path, capsys):
    assert cli.main(["run", "--image", str(tmp_path / "nope.pgm"), "--out-dir", str(tmp_path)]) == 1
    assert "load failed" in capsys.readouterr().err


def test_run_refuses_to_escape_out_dir(tmp_path, small_image):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--image", str(small_image), "--out-dir", str(tmp_path / "o"), "--csv", "../x.csv"])
    assert exc.value.code == 2
    assert not (tmp_path / "x.csv").exists()


def test_bad_c_value(small_image):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--image", str(small_image), "--c", "lots"])
    assert exc.value.code == 2


def test_bench_outputs_and_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert cli.main(SMALL_BENCH + ["--trials", "1", "--out-dir", "a"]) == 0
    assert cli.main(SMALL_BENCH + ["--trials", "1", "--out-dir", "b"]) == 0
    # Nothing lands outside the output directories.
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a", "b"]
    assert sorted(p.name for p in (tmp_path / "a").iterdir()) == ["summary.txt", "summary_mute_per_level_haar.csv", "trials.csv"]
    for name in ("trials.csv", "summary_mute_per_level_haar.csv", "summary.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert "mute_per_level / haar" in capsys.readouterr().out


def test_bench_seed_addressed(tmp_path):
    cli.main(SMALL_BENCH + ["--trials", "2", "--out-dir", str(tmp_path / "both")])
    cli.main(SMALL_BENCH + ["--trials", "1", "--seed-base", "42", "--out-dir", str(tmp_path / "first")])
    cli.main(SMALL_BENCH + ["--trials", "1", "--seed-base", "43", "--out-dir", str(tmp_path / "second")])
    both = read_records_csv(tmp_path / "both" / "trials.csv")
    halves = read_records_csv(tmp_path / "first" / "trials.csv") + read_records_csv(tmp_path / "second" / "trials.csv")
    assert sorted(both, key=lambda r: r.sort_key()) == sorted(halves, key=lambda r: r.sort_key())


def test_bench_parallel_matches_serial(tmp_path):
    cli.main(SMALL_BENCH + ["--trials", "2", "--out-dir", str(tmp_path / "s")])
    cli.main(SMALL_BENCH + ["--trials", "2", "--jobs", "2", "--out-dir", str(tmp_path / "p")])
    assert (tmp_path / "s" / "trials.csv").read_bytes() == (tmp_path / "p" / "trials.csv").read_bytes()


def test_bench_config_file_and_overrides(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"bases": ["haar", "db2"], "powers": [5], "trials": 1, "methods": "mute_per_level,global", "c": 0.5}))
    cli.main(["bench", "--config", str(config), "--bases", "db2", "--out-dir", str(tmp_path / "o")])
    records = read_records_csv(tmp_path / "o" / "trials.csv")
    assert {(r.method, r.basis, r.noise_power_db, r.c_used) for r in records} == {
        ("global", "db2", 5.0, 0.5),
        ("mute_per_level", "db2", 5.0, 0.5),
    }


def test_bench_unknown_config_key(tmp_path):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(SystemExit) as exc:
        cli.main(["bench", "--config", str(config)])
    assert exc.value.code == 2


def test_seed_env_overrides_default(tmp_path, monkeypatch):
    monkeypatch.setenv("AQUA_SEED", "7")
    cli.main(SMALL_BENCH + ["--trials", "1", "--out-dir", str(tmp_path / "env")])
    assert {r.seed for r in read_records_csv(tmp_path / "env" / "trials.csv")} == {7}
    cli.main(SMALL_BENCH + ["--trials", "1", "--seed-base", "3", "--out-dir", str(tmp_path / "flag")])
    assert {r.seed for r in read_records_csv(tmp_path / "flag" / "trials.csv")} == {3}


def test_bench_flushes_partial_results(tmp_path, monkeypatch, capsys):
    real = experiment._trial_worker
    calls = []

    def flaky(job):
        calls.append(job)
        if len(calls) == 2:
            raise ValueError("boom")
        return real(job)

    monkeypatch.setattr(experiment, "_trial_worker", flaky)
    assert cli.main(SMALL_BENCH + ["--trials", "1", "--out-dir", str(tmp_path)]) == 1
    assert len(read_records_csv(tmp_path / "trials.partial.csv")) == 1
    assert not (tmp_path / "trials.csv").exists()
    assert "denoise failed: boom" in capsys.readouterr().err


def test_csv_rows_satisfy_psnr_mse_tie(tmp_path):
    cli.main(SMALL_BENCH + ["--trials", "2", "--methods", "mute_per_level,global,prewhiten", "--out-dir", str(tmp_path)])
    for row in csv.DictReader(open(tmp_path / "trials.csv")):
        mse = float(row["mse_denoised"])
        assert abs(float(row["psnr_denoised_db"]) - 10 * math.log10(255**2 / mse)) <= 1e-9
        assert 0 < float(row["c_used"]) <= 1


def test_psd_rows(tmp_path):
    out = tmp_path / "psd.csv"
    assert cli.main(["psd", "--wind", "5", "--shipping", "5", "--flo", "200", "--fhi", "100000", "--points", "512", "--out", str(out)]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["frequency_hz", "level_db"] and len(rows) == 513


def test_psd_components_match_model(tmp_path):
    out = tmp_path / "psd.csv"
    cli.main(["psd", "--wind", "0", "--flo", "1000", "--fhi", "5000", "--points", "2", "--components", "--out", str(out)])
    row = next(csv.DictReader(open(out)))
    assert float(row["frequency_hz"]) == 1000.0
    calm = AmbientParams(wind=0.0)
    for name in ("turbulence", "shipping", "wind", "thermal"):
        assert float(row[f"{name}_db"]) == pytest.approx(component_psd(name, 1.0, calm), abs=1e-12)
    assert float(row["wind_db"]) == pytest.approx(44.155, abs=1e-3)


@pytest.mark.parametrize("argv", [["--flo", "2000", "--fhi", "1000"], ["--flo", "1000", "--fhi", "1000"], ["--fhi", "150000"], ["--points", "1"]])
def test_psd_bad_range(argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(["psd"] + argv)
    assert exc.value.code == 2


def test_metrics_identity(capsys):
    path = str(data.test_image_path())
    assert cli.main(["metrics", path, path]) == 0
    out = capsys.readouterr().out
    assert "psnr_db inf" in out and "band excellent" in out


def test_metrics_fixture_pair(tmp_path, capsys):
    ref = np.full((100, 100), 100.0)
    test = ref.copy()
    test.flat[:756] += 1  # MSE = 756 / 10000 = 0.0756
    save_image(Image(ref), tmp_path / "a.pgm")
    save_image(Image(test), tmp_path / "b.pgm")
    cli.main(["metrics", str(tmp_path / "a.pgm"), str(tmp_path / "b.pgm")])
    lines = dict(line.split(" ", 1) for line in capsys.readouterr().out.splitlines())
    assert float(lines["mse"]) == pytest.approx(0.0756)
    assert float(lines["psnr_db"]) == pytest.approx(59.35, abs=0.01)


def test_metrics_dimension_mismatch(tmp_path, capsys):
    save_image(Image(np.zeros((16, 16))), tmp_path / "a.pgm")
    save_image(Image(np.zeros((32, 32))), tmp_path / "b.pgm")
    assert cli.main(["metrics", str(tmp_path / "a.pgm"), str(tmp_path / "b.pgm")]) == 1
    assert "dimensions differ" in capsys.readouterr().err


def test_noisegen(tmp_path):
    out = tmp_path / "n.csv"
    cli.main(["noisegen", "--samples", "1000", "--noise-power", "6", "--seed", "1", "--out", str(out)])
    values = np.array([float(r["value"]) for r in csv.DictReader(open(out))])
    assert values.size == 1000
    assert np.mean(values**2) == pytest.approx(10**0.6, rel=1e-9)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aquadenoise", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "bench" in proc.stdout
