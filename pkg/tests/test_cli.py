import json
import subprocess
import sys

import pytest

from asptk.cli import EXIT_INVALID, EXIT_OK, RunConfig, ValidationError, bench_sizes, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_zeros(capsys):
    code, out, _ = run(capsys, "zeros", "--model", "c2", "--n", "3")
    d = json.loads(out)
    assert code == EXIT_OK and d["count"] == 6 and len(d["points"]) == 6


def test_matrix_to_file(tmp_path, capsys):
    path = tmp_path / "F.json"
    code, _, _ = run(capsys, "matrix", "--model", "a2", "--n", "2", "--out", str(path))
    d = json.loads(path.read_text())
    assert code == EXIT_OK and d["shape"] == [4, 4]


@pytest.mark.parametrize(
    "args",
    [
        ("--model", "dft", "--n", "4", "--method", "bottom-up"),
        ("--model", "c2", "--n", "4", "--method", "top-down"),
        ("--model", "hex", "--n", "4", "--method", "bottom-up"),
        ("--model", "a2", "--n", "8", "--method", "recursive"),
    ],
)
def test_factor(capsys, args):
    code, out, _ = run(capsys, "factor", *args)
    d = json.loads(out)
    assert code == EXIT_OK and d["ok"] and d["rel_error"] < 1e-9


def test_factor_writes_plan(tmp_path, capsys):
    path = tmp_path / "plan.json"
    run(capsys, "factor", "--model", "dft", "--n", "4", "--out", str(path))
    d = json.loads(path.read_text())
    assert d["report"]["max_abs_error"] == 0.0
    assert [f["role"] for f in d["factors"]] == ["routing_scaled", "block_diag_fourier", "permutation"]


def test_c2_block_sizes_reported(capsys):
    code, out, _ = run(capsys, "factor", "--model", "c2", "--n", "4", "--method", "top-down")
    assert code == EXIT_OK and json.loads(out)["block_dims"] == [3, 3, 4]


def test_ortho(capsys):
    code, out, _ = run(capsys, "ortho", "--model", "c2", "--n", "4")
    assert code == EXIT_OK and json.loads(out)["residual"] < 1e-9
    code, out, _ = run(capsys, "ortho", "--model", "c2", "--n", "1")
    assert json.loads(out)["residual"] == 0.0


@pytest.mark.parametrize(
    "args",
    [
        ("ortho", "--model", "a2", "--n", "4"),
        ("factor", "--model", "hex", "--n", "6"),
        ("factor", "--model", "c2", "--n", "4", "--method", "bottom-up"),
        ("factor", "--model", "dft", "--n", "6", "--method", "recursive"),
        ("zeros", "--model", "c2", "--n", "0"),
        ("zeros", "--model", "b2", "--n", "3"),
        ("launch", "--model", "c2", "--n", "3"),
        ("factor", "--model", "dct3", "--n", "4"),
    ],
)
def test_invalid_input(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_INVALID


def test_unsupported_message(capsys):
    _, _, err = run(capsys, "ortho", "--model", "a2", "--n", "4")
    assert "unsupported" in err


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--model", "dft", "--n", "64")
    rows = json.loads(out)["rows"]
    assert code == EXIT_OK and [r["n"] for r in rows] == [8, 16, 32, 64]
    code, out, _ = run(capsys, "bench", "--model", "dft", "--n", "1")
    assert json.loads(out)["rows"][0]["nnz_ratio"] == 1.0


def test_bench_sizes():
    assert bench_sizes("dft", 1024) == [8, 16, 32, 64, 128, 256, 512, 1024]
    assert bench_sizes("a2", 16) == [1, 2, 4, 8, 16]


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("ASPTK_THREADS", "lots")
    code, _, _ = run(capsys, "bench", "--model", "c2", "--n", "4")
    assert code == EXIT_INVALID
    monkeypatch.setenv("ASPTK_THREADS", "3")
    code, _, _ = run(capsys, "bench", "--model", "c2", "--n", "4")
    assert code == EXIT_OK


def test_config_validation():
    with pytest.raises(ValidationError):
        RunConfig("factor", "c2", 4, tol=0)
    assert RunConfig("zeros", "c2", 4).tol == 1e-9


def test_output_is_byte_stable():
    cmd = [sys.executable, "-m", "asptk", "factor", "--model", "a2", "--n", "4", "--method", "top-down"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a.endswith(b"\n")
