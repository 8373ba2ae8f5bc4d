"""Report emission, determinism, CLI verbs and exit codes."""

import json
from pathlib import Path

import pytest

from kronzeta.cli import RunConfig, main, run_suite, sample_regular_alphas
from kronzeta.cosets import enumerate_orbits
from kronzeta.errors import IoError
from kronzeta.report import (
    CheckRecord,
    Report,
    emit,
    ledger_csv_text,
    orbit_csv_text,
    report_from_json,
)
from kronzeta.zeta import SatakeParams, gj_torus_ledger


def _tiny_report():
    report = Report(suite="demo", config={"seed": 0})
    report.add(CheckRecord("alpha", {"x": 1}, "pass", {"value": 3}))
    report.add(CheckRecord("beta", {"x": 2}, "fail", {"mismatch": 4}))
    return report


def test_emit_json_round_trip(tmp_path):
    report = _tiny_report()
    paths = emit(report, "json", tmp_path / "out")
    doc = json.loads(paths[0].read_text())
    parsed = report_from_json(doc)
    assert parsed.to_json() == report.to_json()
    assert doc["summary"] == {"pass": 1, "fail": 1, "info": 0}


def test_emit_empty_report(tmp_path):
    report = Report(suite="empty", config={})
    for fmt in ("json", "csv", "markdown"):
        paths = emit(report, fmt, tmp_path / f"empty_{fmt}")
        assert paths[0].exists()
        assert paths[0].read_text()


def test_emit_formats(tmp_path):
    report = _tiny_report()
    csv_path = emit(report, "csv", tmp_path / "out")[0]
    assert csv_path.suffix == ".csv"
    assert "alpha" in csv_path.read_text()
    md_path = emit(report, "markdown", tmp_path / "out")[0]
    assert md_path.suffix == ".md"
    assert "| `alpha`" in md_path.read_text()


def test_emit_unknown_format(tmp_path):
    with pytest.raises(IoError):
        emit(_tiny_report(), "yaml", tmp_path / "out")


def test_wall_times_excluded_by_default(tmp_path):
    report = _tiny_report()
    report.records[0].wall_time = 1.23
    text = emit(report, "json", tmp_path / "out")[0].read_text()
    assert "wall_time" not in text
    text = emit(report, "json", tmp_path / "out2", include_timings=True)[0].read_text()
    assert "wall_time_s" in text


def test_ledger_csv():
    ledger = gj_torus_ledger(SatakeParams((2, 3), 5), 4)
    text = ledger_csv_text(ledger)
    lines = text.strip().split("\n")
    assert lines[0].startswith("exps,mu_numerator")
    assert len(lines) == len(ledger.rows) + 1


def test_orbit_csv():
    table = enumerate_orbits(2, 2, 2)
    text = orbit_csv_text(table)
    assert "orbit_id,size,rank,contains_epsilon_r" in text
    assert "0,9,1,0" in text
    assert "1,6,2,1" in text


def test_sample_regular_alphas_distinct():
    import random

    rng = random.Random(0)
    for n in (1, 2, 3):
        for _ in range(20):
            alphas = sample_regular_alphas(n, rng)
            assert len(set(alphas)) == n
            assert all(a != 0 for a in alphas)


def test_run_suite_deterministic(tmp_path):
    config1 = RunConfig(suite="gj", order=6, seed=7, alpha_samples=2, plots=False)
    config2 = RunConfig(suite="gj", order=6, seed=7, alpha_samples=2, plots=False)
    r1 = run_suite(config1)
    r2 = run_suite(config2)
    p1 = emit(r1, "json", tmp_path / "a")[0].read_bytes()
    p2 = emit(r2, "json", tmp_path / "b")[0].read_bytes()
    assert p1 == p2


def test_cli_orbits(tmp_path, capsys):
    out = tmp_path / "orbits"
    code = main(["--out", str(out), "--no-plots", "orbits", "2", "2", "2"])
    assert code == 0
    captured = capsys.readouterr().out
    assert "2 orbits on 15 points" in captured
    assert (tmp_path / "orbits.csv").exists()
    assert (tmp_path / "orbits.json").exists()


def test_cli_orbits_renders_figure(tmp_path):
    out = tmp_path / "orbits"
    code = main(["--out", str(out), "orbits", "2", "2", "3"])
    assert code == 0
    assert (tmp_path / "orbits_orbits.png").exists()


def test_cli_verify_gj(tmp_path):
    out = tmp_path / "gj"
    code = main(
        [
            "--out", str(out), "--order", "6", "--samples", "2", "--no-plots",
            "verify", "gj",
        ]
    )
    assert code == 0
    doc = json.loads((tmp_path / "gj.json").read_text())
    assert doc["summary"]["fail"] == 0


def test_cli_verify_emits_figures(tmp_path):
    out = tmp_path / "figs" / "gj"
    code = main(["--out", str(out), "--order", "5", "--samples", "1", "verify", "gj"])
    assert code == 0
    pngs = list((tmp_path / "figs").glob("*.png"))
    assert pngs, "expected a rendered figure next to the report"


def test_cli_ledger(tmp_path):
    out = tmp_path / "ledger"
    code = main(
        [
            "--out", str(out), "--order", "5",
            "ledger", "local", "--m", "2", "--n", "2", "--q", "5",
            "--alphas", "2,3",
        ]
    )
    assert code == 0
    text = (tmp_path / "ledger.csv").read_text()
    assert text.startswith("exps,")


def test_cli_config_error_exit_code(tmp_path):
    code = main(
        ["--out", str(tmp_path / "x"), "ledger", "gj", "--n", "2", "--alphas", "2"]
    )
    assert code == 2


def test_cli_bad_config_file(tmp_path):
    bad = tmp_path / "conf.json"
    bad.write_text("{not json")
    code = main(["--config", str(bad), "--no-plots", "verify", "gj"])
    assert code == 2


def test_cli_config_file_round_trip(tmp_path):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"order": 5, "alpha_samples": 1, "plots": False}))
    out = tmp_path / "r"
    code = main(["--config", str(conf), "--out", str(out), "verify", "gj"])
    assert code == 0
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["config"]["order"] == 5


def test_cli_failure_exit_code(tmp_path, monkeypatch):
    # breaking the measure must surface as exit code 1, with the failure
    # record carrying the first mismatching coefficient
    import kronzeta.zeta as zeta_mod
    from kronzeta.rings import QRoot

    original = zeta_mod.macdonald_measure

    def broken(t, n, q):
        value = original(t, n, q)
        exps = t.exps if hasattr(t, "exps") else tuple(t)
        if sum(exps) == 1:
            return value * QRoot.of(2, q)
        return value

    monkeypatch.setattr(zeta_mod, "macdonald_measure", broken)
    out = tmp_path / "broken"
    code = main(
        ["--out", str(out), "--order", "5", "--samples", "1", "--no-plots",
         "verify", "gj"]
    )
    assert code == 1
    doc = json.loads((tmp_path / "broken.json").read_text())
    failing = [r for r in doc["records"] if r["status"] == "fail"]
    assert failing
    assert all("first_mismatch" in r["detail"] for r in failing)
