"""Command-line interface: CSV schemas, ordering, exit codes, determinism."""

import csv
import io
import json
import math
import os
import struct
import subprocess
import sys
import zlib
from pathlib import Path

import pytest

from spzeros.branches import HypothesisReport
from spzeros.cli import main

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = ROOT / "problems"
CHEB = str(PROBLEMS / "chebyshev2.json")
GOLD = str(PROBLEMS / "golden.json")
CUBIC = str(PROBLEMS / "cubic6.json")


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_zeros_depth_three_chebyshev(capsys):
    code, out, _ = run_cli(["zeros", CHEB, "--max-support", "3"], capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["sigma", "re", "im", "terms_used", "tail_estimate"]
    assert len(rows) == 8
    sigmas = [r[0] for r in rows]
    assert sigmas == sorted(sigmas)
    empty = next(r for r in rows if r[0] == "")
    assert abs(float(empty[1]) - (-math.pi**2 / 8)) <= 1e-9
    assert float(empty[2]) == 0.0
    assert int(empty[3]) > 0
    assert 0 <= float(empty[4]) < 1e-11


def test_zeros_depth_zero_single_row(capsys):
    code, out, _ = run_cli(["zeros", CHEB, "--max-support", "0"], capsys)
    assert code == 0
    _, rows = read_csv(out)
    assert len(rows) == 1
    assert rows[0][0] == ""


def test_zeros_floats_round_trip(capsys):
    _, out, _ = run_cli(["zeros", GOLD, "--max-support", "4"], capsys)
    _, rows = read_csv(out)
    for r in rows:
        for field in (r[1], r[2], r[4]):
            v = float(field)
            assert format(v, ".17g") == field


def test_invert_at_zero_matches_zeros(capsys):
    code, zeros_out, _ = run_cli(["zeros", GOLD, "--max-support", "3"], capsys)
    assert code == 0
    code, inv_out, _ = run_cli(
        ["invert", GOLD, "--max-support", "3", "--w", "0,0", "--verify"],
        capsys)
    assert code == 0
    _, zrows = read_csv(zeros_out)
    header, irows = read_csv(inv_out)
    assert header == ["sigma", "w_re", "w_im", "re", "im", "terms_used",
                      "tail_estimate", "prefactor_exponent"]
    assert [(r[0], r[1], r[2]) for r in zrows] == \
        [(r[0], r[3], r[4]) for r in irows]
    assert all(r[7] == "" for r in irows)


def test_invert_at_fixed_point_ladder(capsys):
    phi = (1 + math.sqrt(5)) / 2
    code, out, _ = run_cli(
        ["invert", GOLD, "--max-support", "3", "--w", f"{phi!r},0",
         "--verify"], capsys)
    assert code == 0
    _, rows = read_csv(out)
    assert len(rows) == 8
    by_sigma = {r[0]: r for r in rows}
    # the zero address solves f(0) = b exactly and carries no exponent
    assert complex(float(by_sigma[""][3]), float(by_sigma[""][4])) == 0
    assert by_sigma[""][7] == ""
    # ladder exponents count the leading zeros plus one
    assert by_sigma["1"][7] == "1"
    assert by_sigma["01"][7] == "2"
    assert by_sigma["001"][7] == "3"
    # gaining a leading zero multiplies the value by a = 2 phi
    v01 = complex(float(by_sigma["01"][3]), float(by_sigma["01"][4]))
    v001 = complex(float(by_sigma["001"][3]), float(by_sigma["001"][4]))
    assert abs(v001 - 2 * phi * v01) <= 1e-9 * abs(v001)


def test_invert_circle_row_count(capsys):
    code, out, _ = run_cli(
        ["invert", GOLD, "--max-support", "2", "--circle", "8,5", "--verify"],
        capsys)
    assert code == 0
    _, rows = read_csv(out)
    assert len(rows) == 5 * 4
    # anchors appear in sweep order, grouped
    anchors = [(r[1], r[2]) for r in rows]
    assert anchors == sorted(anchors, key=lambda t: anchors.index(t))
    assert len(set(anchors)) == 5


def test_invert_verify_full_depth_cubic(capsys):
    # Deep degree-3 solutions reach |g| ~ 1e9, where the requested product
    # tolerance propagates to round-trip errors far above any fixed absolute
    # bar; the verifier must budget against each row's own tail estimate.
    code, _, err = run_cli(
        ["invert", CUBIC, "--w=-2,0.5", "--verify"], capsys)
    assert code == 0
    assert err == ""


def test_invert_verify_flags_broken_roundtrip(capsys, monkeypatch):
    from spzeros import cli
    real = cli.eval_f_batch

    def shifted(sys_, values, **kwargs):
        return real(sys_, values, **kwargs) + 1e-3

    monkeypatch.setattr(cli, "eval_f_batch", shifted)
    code, _, err = run_cli(
        ["invert", GOLD, "--max-support", "2", "--w", "0,0", "--verify"],
        capsys)
    assert code == 2
    assert "exceeds its error budget" in err


def test_moments_table_and_convergence(capsys):
    code, out, _ = run_cli(
        ["moments", GOLD, "--m", "1,2", "--max-support", "10"], capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["m", "shell", "partial_re", "partial_im", "closed_re",
                      "closed_im", "abs_error", "tail_bound"]
    m1 = [r for r in rows if r[0] == "1"]
    m2 = [r for r in rows if r[0] == "2"]
    assert [int(r[1]) for r in m1] == list(range(11))
    # errors shrink and the last is within the tail bound plus slack
    last = m2[-1]
    assert float(last[6]) <= float(last[7]) + 1e-8
    assert abs(float(last[4]) - (1 - 1 / math.sqrt(5))) <= 1e-12


def test_moments_divergent_order_refused(tmp_path, capsys):
    problem = {
        "coefficients": [[1, 0], [-1, 0], [0, 0], [1, 0]],
        "fixed_point_hint": [1, 0],
        "max_support": 4,
        "product_tolerance": 1e-12,
        "n_cap": 200,
        "root_tolerance": 1e-13,
    }
    path = tmp_path / "steep.json"
    path.write_text(json.dumps(problem))
    code, _, err = run_cli(["moments", str(path), "--m", "1"], capsys)
    assert code == 2
    assert "diverges" in err


def test_wh_three_routes(capsys):
    code, out, _ = run_cli(
        ["wh", GOLD, "--max-support", "10", "--z", "1.5,0", "--z=-2,0.5"],
        capsys)
    assert code == 0
    header, rows = read_csv(out)
    assert header[:4] == ["z_re", "z_im", "limit_re", "limit_im"]
    assert len(rows) == 2
    for r in rows:
        assert float(r[8]) <= 1e-6 + float(r[9])


def test_check_reports_all_invariants(capsys):
    code, out, _ = run_cli(["check", GOLD, "--max-support", "8"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    names = [ln.split(":")[0] for ln in lines]
    assert names == ["hypothesis1", "three_routes", "roundtrip",
                     "functional_equation", "taylor_d2"]
    assert all(ln.endswith("PASS") for ln in lines)


def test_check_all_shipped_problems(capsys):
    for path in (CHEB, GOLD, CUBIC):
        code, out, _ = run_cli(["check", path, "--max-support", "8"], capsys)
        assert code == 0, out


def test_parse_failure_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"coefficients": [[1, 0]')
    code, _, err = run_cli(["zeros", str(bad)], capsys)
    assert code == 1
    assert "line" in err

    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({
        "coefficients": [[-1, 0], [0, 0], [2, 0]],
        "fixed_point_hint": [1, 0],
        "max_support": 3,
        "product_tolerance": 1e-12,
        "n_cap": 200,
        "root_tolerance": 1e-13,
        "extra": 1,
    }))
    code, _, err = run_cli(["zeros", str(unknown)], capsys)
    assert code == 1
    assert "unknown key" in err


def test_missing_file_exit_code(capsys):
    code, _, err = run_cli(["zeros", "no-such-file.json"], capsys)
    assert code == 1
    assert err


def test_oversized_override_refused(capsys):
    code, _, err = run_cli(["zeros", CUBIC, "--max-support", "19"], capsys)
    assert code == 1
    assert "2^30" in err


def test_hypothesis_gate_exit_code(monkeypatch, capsys):
    import spzeros.cli as cli

    def failing_probe(sys_, radius, count, root_tolerance):
        return HypothesisReport(sampled_points=count, converged_points=0,
                                max_orbit_length=0, worst_point=1j,
                                passed=False)

    monkeypatch.setattr(cli, "check_hypothesis1", failing_probe)
    code, _, err = run_cli(
        ["zeros", CHEB, "--max-support", "2", "--check-hypothesis"], capsys)
    assert code == 3
    assert "hypothesis" in err.lower()


def test_zeros_png_output(tmp_path, capsys):
    png = tmp_path / "zeros.png"
    code, _, _ = run_cli(
        ["zeros", GOLD, "--max-support", "5", "--png", "96x64",
         "--png-path", str(png)], capsys)
    assert code == 0
    data = png.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    width, height = struct.unpack(">II", data[16:24])
    assert (width, height) == (96, 64)
    bit_depth, color_type = data[24], data[25]
    assert (bit_depth, color_type) == (8, 0)
    # IDAT decompresses to height * (1 + width) filter-prefixed scanlines
    idat = data.find(b"IDAT")
    length = struct.unpack(">I", data[idat - 4:idat])[0]
    raw = zlib.decompress(data[idat + 4:idat + 4 + length])
    assert len(raw) == 64 * (1 + 96)
    # some pixels are dark (points actually got rastered)
    assert min(raw) == 0


def test_output_file_writing(tmp_path, capsys):
    out_path = tmp_path / "rows.csv"
    code, out, _ = run_cli(
        ["zeros", CHEB, "--max-support", "2", "-o", str(out_path)], capsys)
    assert code == 0
    assert out == ""
    text = out_path.read_text()
    header, rows = read_csv(text)
    assert len(rows) == 4
    assert text.count("\r") == 0  # unix line endings regardless of platform


def _run_subprocess(args, threads):
    env = dict(os.environ, SPZEROS_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "spzeros", *args],
                          capture_output=True, env=env, cwd=str(ROOT))


def test_zeros_bytes_identical_across_thread_counts():
    runs = [_run_subprocess(["zeros", GOLD, "--max-support", "6"], t)
            for t in (1, 4)]
    for r in runs:
        assert r.returncode == 0, r.stderr
    assert runs[0].stdout == runs[1].stdout
    assert runs[0].stdout.count(b"\n") == 1 + 2**6


def test_console_entry_point():
    r = subprocess.run(["spzeros", "zeros", CHEB, "--max-support", "1"],
                       capture_output=True, cwd=str(ROOT))
    assert r.returncode == 0
    assert r.stdout.startswith(b"sigma,re,im,")
