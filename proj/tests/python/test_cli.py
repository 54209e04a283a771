import csv
import io
import json
import os
import subprocess

import pytest

BENCH = os.environ.get("TILEFUSE_BENCH_BIN", "")

pytestmark = pytest.mark.skipif(
    not BENCH or not os.path.exists(BENCH),
    reason="TILEFUSE_BENCH_BIN not set",
)

CSV_HEADER = (
    "matrix,n,nnz,op,variant,precision,bcol,ccol,workers,runs,"
    "median_seconds,gflops,fused_ratio,scheduler_seconds,"
    "runs_to_amortize,replicated_rows,binding"
)


def bench(*args, env=None):
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(
        [BENCH, *args], capture_output=True, text=True, env=full_env
    )


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_emits_csv():
    r = bench(
        "run", "--gen", "banded:64:2", "--runs", "2", "--warmup", "0",
        "--threads", "2", "--bcol", "4", "--ccol", "4",
    )
    assert r.returncode == 0, r.stderr
    assert r.stdout.splitlines()[0] == CSV_HEADER
    rows = parse_csv(r.stdout)
    assert [row["variant"] for row in rows] == [
        "fused", "unfused", "atomic", "overlapped",
    ]
    for row in rows:
        assert row["matrix"] == "banded:64:2"
        assert row["n"] == "64"
        assert row["workers"] == "2"
        assert float(row["median_seconds"]) > 0.0
        assert float(row["gflops"]) > 0.0
    fused = rows[0]
    assert 0.0 <= float(fused["fused_ratio"]) <= 1.0
    assert float(fused["scheduler_seconds"]) >= 0.0
    assert rows[3]["replicated_rows"] != ""
    assert rows[1]["fused_ratio"] == ""


def test_run_json_format():
    r = bench(
        "run", "--gen", "random:50:0.1", "--runs", "1", "--warmup", "0",
        "--threads", "1", "--bcol", "4", "--ccol", "4",
        "--variants", "fused,unfused", "--format", "json",
    )
    assert r.returncode == 0, r.stderr
    rows = json.loads(r.stdout)
    assert [row["variant"] for row in rows] == ["fused", "unfused"]
    assert rows[0]["op"] == "gemm-spmm"
    assert rows[0]["fused_ratio"] is not None


def test_run_writes_out_file(tmp_path):
    out = tmp_path / "rows.csv"
    r = bench(
        "run", "--gen", "banded:32:1", "--runs", "1", "--warmup", "0",
        "--threads", "1", "--bcol", "2", "--ccol", "2", "--out", str(out),
    )
    assert r.returncode == 0, r.stderr
    assert out.read_text().splitlines()[0] == CSV_HEADER


def test_run_reads_matrix_market(tmp_path):
    path = tmp_path / "diag.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "3 3 3\n1 1 1.0\n2 2 2.0\n3 3 3.0\n"
    )
    r = bench(
        "run", "--matrix", str(path), "--runs", "1", "--warmup", "0",
        "--threads", "1", "--bcol", "2", "--ccol", "2",
    )
    assert r.returncode == 0, r.stderr
    rows = parse_csv(r.stdout)
    assert rows[0]["matrix"] == "diag.mtx"
    assert rows[0]["nnz"] == "3"


def test_run_rejects_nonsquare_and_bad_flags(tmp_path):
    path = tmp_path / "rect.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 3 1\n1 1 1.0\n"
    )
    r = bench("run", "--matrix", str(path), "--runs", "1")
    assert r.returncode == 2
    assert "square" in r.stderr

    r = bench("run", "--gen", "banded:64:2", "--variants", "bogus")
    assert r.returncode == 2

    r = bench("run", "--gen", "nonsense:1:2")
    assert r.returncode == 2

    r = bench("run")  # no input
    assert r.returncode == 2


def test_ratio_sweep_monotone_ladder():
    r = bench(
        "ratio-sweep", "--gen", "banded:64:1", "--gen", "random:50:0.2",
        "--t-min", "1", "--t-max", "64",
    )
    assert r.returncode == 0, r.stderr
    rows = parse_csv(r.stdout)
    assert rows and set(row["matrix"] for row in rows) == {
        "banded:64:1", "random:50:0.2", "mean",
    }
    for name in ("banded:64:1", "random:50:0.2", "mean"):
        ladder = [
            (int(row["tile_size"]), float(row["fused_ratio"]))
            for row in rows
            if row["matrix"] == name
        ]
        assert [t for t, _ in ladder] == [1, 2, 4, 8, 16, 32, 64]
        ratios = [v for _, v in ladder]
        assert ratios == sorted(ratios)
        assert all(0.0 <= v <= 0.5 for v in ratios)


def test_schedule_dump_document():
    r = bench(
        "schedule-dump", "--gen", "banded:16:1", "--ctsize", "4",
        "--threads", "2",
    )
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    assert doc["n"] == 16
    assert doc["tile_size_t"] == 4
    assert len(doc["wavefronts"]) == 2
    assert doc["fused_ratio"] == 0.3125


def test_verify_battery_passes():
    r = bench("verify", "--threads", "2", "--bcol", "8", "--ccol", "8")
    assert r.returncode == 0, r.stdout + r.stderr
    assert r.stdout.strip().splitlines()[-1] == "VERIFY: PASS"
    assert " dp " in r.stdout and " sp " in r.stdout


def test_verify_catches_injected_fault():
    r = bench(
        "verify", "--threads", "2", "--bcol", "8", "--ccol", "8",
        env={"TILEFUSE_INJECT_FAULT": "1"},
    )
    assert r.returncode == 1
    assert r.stdout.strip().splitlines()[-1] == "VERIFY: FAIL"
