import json
import math
from pathlib import Path

import pytest

from classforms import cli

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schema" / "envelope.schema.json"


def validate_envelope(obj):
    """Structural validation against the shipped schema (no external deps)."""
    schema = json.loads(SCHEMA_PATH.read_text())
    assert schema["type"] == "object"
    assert isinstance(obj, dict)
    for key in schema["required"]:
        assert key in obj, f"missing envelope field {key}"
    assert set(obj) <= set(schema["properties"]), "unexpected envelope field"
    types = {"string": str, "object": dict, "array": list, "number": (int, float),
             "null": type(None)}
    for key, prop in schema["properties"].items():
        if key not in obj:
            continue
        allowed = prop["type"]
        if isinstance(allowed, str):
            allowed = [allowed]
        assert isinstance(obj[key], tuple(t for name in allowed for t in
                                          (types[name] if isinstance(types[name], tuple)
                                           else (types[name],)))), key


def run_json(capsys, argv):
    rc = cli.main(argv)
    out = capsys.readouterr().out
    envelope = json.loads(out)
    validate_envelope(envelope)
    return rc, envelope, out


def test_classgroup_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["classgroup", "-84"])
    assert rc == 0
    assert env["results"]["representatives"] == [
        [1, 0, 21], [2, 2, 11], [3, 0, 7], [5, 4, 5]]
    assert env["results"]["elementary_divisors"] == [2, 2]
    assert env["results"]["class_number"] == 4
    assert env["results"]["two_torsion_order"] == 4


def test_classgroup_neg_flag(capsys):
    rc, env, _ = run_json(capsys, ["--neg", "classgroup", "84"])
    assert rc == 0
    assert env["results"]["D"] == -84


def test_bh_classify(capsys):
    rc, env, _ = run_json(capsys, ["bh", "classify", "-20"])
    assert rc == 0
    assert env["results"]["entropy"] == pytest.approx(math.pi * math.sqrt(20), rel=1e-11)
    triples = [(c["p2"], c["pq"], c["q2"]) for c in env["results"]["classes"]]
    assert triples == [(1, 0, 5), (2, -1, 3)]


def test_bh_hilbert(capsys):
    rc, env, _ = run_json(capsys, ["bh", "hilbert", "-4"])
    assert rc == 0
    assert env["results"]["coefficients_low_to_high"] == ["-1728", "1"]


def test_series_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["series", "j", "--order", "3"])
    assert rc == 0
    assert env["results"]["coefficients"]["-1"] == "1"
    assert env["results"]["coefficients"]["0"] == "744"
    assert env["results"]["coefficients"]["1"] == "196884"


def test_trace_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["trace", "--weight", "12", "--n", "6"])
    assert rc == 0
    assert env["results"]["trace"] == -6048


def test_rademacher_subcommand(capsys):
    rc, env, _ = run_json(
        capsys, ["rademacher", "invdelta", "--n", "1", "--cmax", "20"])
    assert rc == 0
    assert env["results"]["exact"] == 324
    assert env["results"]["relative_error"] < 1e-3


def test_singular_trace_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["singular-trace", "--n", "1"])
    assert rc == 0
    assert env["results"]["expected"] == 23
    assert env["results"]["abs_residual"] < 1e-4
    assert env["results"]["points"] == [[6, 1, 1], [12, 13, 4], [18, 25, 9]]


def test_ecc_verify_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["ecc", "verify", "--q", "13"])
    assert rc == 0
    assert all(row["status"] == "ok" for row in env["results"])


def test_ecc_torsion_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["ecc", "torsion", "--q", "7", "--n", "3"])
    assert rc == 0
    rows = {row["t"]: row for row in env["results"]}
    assert rows[-1]["observed"] == 1
    assert rows[-1]["fractional"] is True


def test_cft_zk_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["cft", "zk", "--k", "1", "--order", "4"])
    assert rc == 0
    assert env["results"]["coefficients"]["1"] == "196884"


def test_cft_polar_table(capsys):
    rc, env, _ = run_json(capsys, ["cft", "polar", "--mmax", "20", "--emit", "table"])
    assert rc == 0
    first = env["results"]["rows"][0]
    assert first["m"] == 1 and first["J"] == 1 and first["P"] == 1
    assert set(env["results"]["flagged"]) <= set(env["results"]["documented_candidates"])


def test_cft_polar_figure_csv(capsys):
    rc = cli.main(["cft", "polar", "--mmax", "12", "--emit", "figure-data"])
    captured = capsys.readouterr()
    assert rc == 0
    lines = captured.out.strip().splitlines()
    assert lines[0] == "m,normalized_excess"
    assert len(lines) == 13
    m, val = lines[1].split(",")
    assert m == "1"
    assert float(val) == pytest.approx((1 - 1 / 12 - 5 / 8) / 1.0)


def test_cft_polar_histogram_and_cdf(capsys):
    rc = cli.main(["cft", "polar", "--mmax", "300", "--emit", "histogram"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert out[0].startswith("# bin_width = ")
    assert out[1] == "bin_left,bin_right,count"
    rc = cli.main(["cft", "polar", "--mmax", "300", "--emit", "cdf"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert out[0] == "value,cumulative_fraction"
    assert len(out) == 301


def test_cft_polar_parallel_matches_serial(capsys):
    cli.main(["cft", "polar", "--mmax", "200", "--emit", "figure-data"])
    serial = capsys.readouterr().out
    cli.main(["--jobs", "2", "cft", "polar", "--mmax", "200", "--emit", "figure-data"])
    parallel = capsys.readouterr().out
    assert serial == parallel


def test_rademacher_tau_subcommand(capsys):
    rc, env, _ = run_json(capsys, ["rademacher", "tau", "--n", "2", "--cmax", "200"])
    assert rc == 0
    assert env["results"]["exact"] == -24
    assert env["results"]["beta"] == pytest.approx(2.840, abs=5e-3)
    assert env["results"]["relative_error"] < 0.01


def test_stats_subcommands(capsys):
    rc, env, _ = run_json(capsys, ["stats", "cohen-lenstra", "--p", "3", "--N", "500"])
    assert rc == 0
    assert env["results"]["predicted"] == pytest.approx(0.560126, abs=1e-5)
    rc, env, _ = run_json(capsys, ["stats", "ng", "--g", "2", "--x", "50"])
    assert rc == 0
    assert env["results"]["cg_constant"] == pytest.approx(0.4323, abs=1e-3)


def test_stats_h_scan_json(capsys):
    rc, env, _ = run_json(capsys, ["stats", "h-scan", "--N", "30"])
    assert rc == 0
    rows = env["results"]
    assert rows[0]["D"] == -3 and rows[0]["h"] == 1
    assert all(r["siegel_curve"] > 0 for r in rows)


def test_stats_h_scan_csv(capsys):
    rc = cli.main(["--format", "csv", "stats", "h-scan", "--N", "50"])
    out = capsys.readouterr().out.strip().splitlines()
    assert rc == 0
    assert out[0].startswith("# epsilon = ")
    assert out[1] == "D,h,siegel_curve"
    rows = [line.split(",") for line in out[2:]]
    assert ["-3", "1"] == rows[0][:2]
    assert all(int(r[0]) < 0 for r in rows)


def test_byte_identical_output(capsys):
    cli.main(["classgroup", "-47"])
    first = capsys.readouterr().out
    cli.main(["classgroup", "-47"])
    second = capsys.readouterr().out
    assert first == second
    assert json.loads(first)["wall_time_ms"] is None


def test_byte_identical_across_processes():
    import os
    import subprocess
    import sys as _sys

    outs = []
    for seed in ("0", "424242"):
        env = dict(os.environ, PYTHONHASHSEED=seed)
        proc = subprocess.run(
            [_sys.executable, "-m", "classforms", "classgroup", "-84"],
            capture_output=True, env=env, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1]


def test_timing_flag_fills_wall_time(capsys):
    rc, env, _ = run_json(capsys, ["--timing", "classgroup", "-47"])
    assert rc == 0
    assert isinstance(env["wall_time_ms"], (int, float))


def test_identity_failure_exits_1(capsys, monkeypatch):
    from classforms import eccensus

    def broken(q):
        raise AssertionError("census disagrees at (q=7, t=0): N=2 vs H=3")

    monkeypatch.setattr(eccensus, "verify_deuring", broken)
    rc = cli.main(["ecc", "verify", "--q", "7"])
    captured = capsys.readouterr()
    assert rc == 1
    assert "census disagrees" in captured.err


def test_usage_errors_exit_2(capsys):
    assert cli.main(["classgroup", "84"]) == 2
    capsys.readouterr()
    assert cli.main(["trace", "--weight", "5", "--n", "1"]) == 2
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_float_formatting_is_12_significant_digits(capsys):
    rc, env, out = run_json(capsys, ["bh", "classify", "-20"])
    entropy = env["results"]["entropy"]
    assert entropy == float(f"{math.pi * math.sqrt(20):.12g}")
