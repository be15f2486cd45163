import json
import math

import pytest
from click.testing import CliRunner

from ldwalk.cli import main

BLUE_PROFILE = """\
window_lo = 0
window_hi = 0
tail_minus = 0.31
tail_plus = 0.62

[table]
"0" = 0.62
"""

HALF_SEGMENT_MEASURE = """\
alpha_minus = 0.5
alpha_plus = 0.5
"""

SYM_PROFILE = """\
window_lo = 0
window_hi = 0
tail_minus = 0.5
tail_plus = 0.5

[table]
"0" = 0.5
"""

DIRAC0_MEASURE = """\
alpha_minus = 0.0
alpha_plus = 0.0

[central]
"0" = 1.0
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (("blue.toml", BLUE_PROFILE),
                       ("half.toml", HALF_SEGMENT_MEASURE),
                       ("sym.toml", SYM_PROFILE),
                       ("d0.toml", DIRAC0_MEASURE)):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = str(tmp_path)
    return paths


def _json_out(result):
    return json.loads(result.stdout)


def test_rate_eval_blue_half_segment(files):
    r = CliRunner().invoke(main, ["--profile", files["blue.toml"],
                                  "--measure", files["half.toml"],
                                  "rate", "eval"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert doc["value"] == pytest.approx(0.0148313665, abs=1e-9)
    assert doc["regime"] == "drift_outward"
    assert abs(doc["min_form"] - doc["closed_form"]) <= 1e-12
    assert abs(doc["variational_form"] - doc["value"]) < 1e-8
    assert doc["agreement"]["pass"] is True
    assert doc["schema_version"] == 1


def test_rate_eval_unbounded_sentinel(files):
    r = CliRunner().invoke(main, ["--profile", files["sym.toml"],
                                  "--measure", files["d0.toml"],
                                  "rate", "eval"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert doc["value"] == "unbounded"
    assert doc["agreement"]["pass"] is True


def test_rate_eval_requires_files(files):
    r = CliRunner().invoke(main, ["rate", "eval"])
    assert r.exit_code == 2
    r = CliRunner().invoke(main, ["--profile", files["blue.toml"],
                                  "--measure", "/does/not/exist.toml",
                                  "rate", "eval"])
    assert r.exit_code == 2


def test_rate_eval_rejects_bad_profile(tmp_path, files):
    bad = tmp_path / "bad.toml"
    bad.write_text("window_lo = 0\n")  # missing keys
    r = CliRunner().invoke(main, ["--profile", str(bad),
                                  "--measure", files["half.toml"],
                                  "rate", "eval"])
    assert r.exit_code == 2
    bad.write_text(BLUE_PROFILE.replace("0.62", "1.62"))
    r = CliRunner().invoke(main, ["--profile", str(bad),
                                  "--measure", files["half.toml"],
                                  "rate", "eval"])
    assert r.exit_code == 2


def test_rate_segment_endpoints_vanish(files):
    r = CliRunner().invoke(main, ["--profile", files["blue.toml"],
                                  "rate", "segment", "--grid", "5"])
    assert r.exit_code == 0
    lines = r.stdout.strip().split("\n")
    assert lines[0] == "alpha,rate"
    rows = [tuple(map(float, ln.split(","))) for ln in lines[1:]]
    assert rows[0] == (0.0, 0.0) and rows[-1] == (1.0, 0.0)
    assert rows[2][1] == pytest.approx(0.0148313665, abs=1e-9)


def test_verify_counterexample_reports_gap():
    r = CliRunner().invoke(main, ["verify", "counterexample"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert doc["gap"] == pytest.approx(0.0724820979, abs=1e-9)
    assert doc["pass"] is True


def test_verify_excursion_honest_failure_at_short_series():
    # the log-prefactor bias ~1.5/n exceeds the default tolerance at n=201
    r = CliRunner().invoke(main, ["verify", "excursion", "--n-max", "201"])
    assert r.exit_code == 1
    r = CliRunner().invoke(main, ["verify", "excursion", "--n-max", "201",
                                  "--tol", "0.01"])
    assert r.exit_code == 0


def test_verify_ball_partition():
    r = CliRunner().invoke(main, ["--seed", "11", "verify", "ball",
                                  "--count", "2", "--n-max", "10"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert doc["worst_gap"] <= 1e-13
    r = CliRunner().invoke(main, ["verify", "ball", "--n-max", "15"])
    assert r.exit_code == 2


def test_verify_lemmas_roundtrip_suite():
    r = CliRunner().invoke(main, ["--seed", "3", "verify", "lemmas",
                                  "--suite", "roundtrip", "--count", "50"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert all(item["pass"] for item in doc["results"])


def test_mc_estimate_deterministic_and_logged():
    args = ["--seed", "5", "mc", "estimate", "--p", "0.5", "--n", "21",
            "--radius", "1", "--samples", "20000"]
    a = CliRunner().invoke(main, args)
    b = CliRunner().invoke(main, args)
    assert a.exit_code == 0
    assert a.stdout == b.stdout
    doc = _json_out(a)
    assert doc["mean"] > 0
    assert doc["log_mean"] == pytest.approx(math.log(doc["mean"]), abs=1e-12)


def test_mc_estimate_zero_hits_exits_one():
    # even word length: excursions are impossible
    r = CliRunner().invoke(main, ["mc", "estimate", "--p", "0.5", "--n", "10",
                                  "--radius", "1", "--samples", "1000"])
    assert r.exit_code == 1
    doc = _json_out(r)
    assert doc["mean"] == 0.0 and doc["rel_std_err"] == "unbounded"


def test_mc_estimate_validation_errors(files):
    r = CliRunner().invoke(main, ["mc", "estimate", "--p", "1.5", "--n", "5"])
    assert r.exit_code == 2
    r = CliRunner().invoke(main, ["mc", "estimate", "--p", "0.5", "--n", "5",
                                  "--event", "ball"])
    assert r.exit_code == 2  # ball needs --measure and --eps
    r = CliRunner().invoke(main, ["mc", "estimate", "--p", "0.5", "--n", "9",
                                  "--drift", "0.2", "--schedule", "x.csv"])
    assert r.exit_code == 2


def test_mc_estimate_with_schedule_file(tmp_path):
    sched = tmp_path / "sched.csv"
    sched.write_text("from,to,x\n1,8,0.0\n")
    r = CliRunner().invoke(main, ["--seed", "1", "mc", "estimate",
                                  "--p", "0.6", "--n", "9", "--radius", "1",
                                  "--samples", "5000",
                                  "--schedule", str(sched)])
    assert r.exit_code == 0, r.output
    assert _json_out(r)["mean"] > 0


def test_mc_rate_command():
    r = CliRunner().invoke(main, ["--seed", "9", "mc", "rate", "--p", "0.5",
                                  "--radius", "1", "--n-min", "5",
                                  "--n-max", "15", "--step", "2",
                                  "--samples", "20000"])
    assert r.exit_code == 0, r.output
    doc = _json_out(r)
    assert doc["slope"] < 0
    assert doc["unreliable"] is False
    assert len(doc["points"]) == 6


def test_figure1_csv_and_checks(files):
    r = CliRunner().invoke(main, ["--out", files["dir"], "figure1",
                                  "--grid", "401", "--svg"])
    assert r.exit_code == 0, r.output
    lines = r.stdout.strip().split("\n")
    assert lines[0] == "alpha,rate_blue,rate_red"
    first = lines[1].split(",")
    last = lines[-1].split(",")
    assert float(first[1]) == 0.0 and float(first[2]) == 0.0
    assert float(last[1]) == 0.0 and float(last[2]) == 0.0
    svg = (files["dir"] + "/figure1.svg")
    with open(svg) as fh:
        body = fh.read()
    assert body.startswith("<svg") and body.count("<polyline") == 2


def test_figure1_svg_requires_out():
    r = CliRunner().invoke(main, ["figure1", "--svg"])
    assert r.exit_code == 2


def test_figure1_rerun_is_byte_identical(files):
    args = ["--out", files["dir"], "figure1", "--grid", "401"]
    a = CliRunner().invoke(main, args)
    with open(files["dir"] + "/figure1.csv") as fh:
        first = fh.read()
    b = CliRunner().invoke(main, args)
    with open(files["dir"] + "/figure1.csv") as fh:
        second = fh.read()
    assert a.exit_code == b.exit_code == 0
    assert first == second == a.stdout


def test_trajectory_demo(files):
    import os

    r = CliRunner().invoke(main, ["--seed", "3", "--out", files["dir"],
                                  "trajectory", "demo"])
    assert r.exit_code == 0, r.output
    assert r.stdout.startswith("step,position,region\n")
    assert "# stitched region" in r.stdout
    with open(files["dir"] + "/trajectory.csv") as fh:
        assert fh.readline().strip() == "step,position,region"
    stitched = [f for f in os.listdir(files["dir"])
                if f.startswith("stitched_")]
    assert stitched
    r = CliRunner().invoke(main, ["trajectory", "demo", "--n", "100"])
    assert r.exit_code == 2
