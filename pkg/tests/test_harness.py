import csv
import io
import json

import pytest

from mlrhp import harness as hz
from mlrhp.cli import build_parser, load_config, main


def _report():
    errors = {"a": [1e-2, 5e-3, 2.5e-3], "b": [3e-3, 1.6e-3, 7e-4]}
    fits = hz._probe_fits([8, 16, 32], errors, [0.8, 1.2], [0.35, 0.7])
    return hz.AsymptoticReport("demo", "2", [8, 16, 32], errors, fits, {"C2.x": {"value": 1, "pass": True}}, True)


def test_config_roundtrip_and_validation(tmp_path):
    cfg = hz.ExperimentConfig(n_sweep=[8, 16], radius_x0=0.5)
    assert hz.ExperimentConfig.from_json(cfg.to_json()) == cfg
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    assert hz.ExperimentConfig.load(str(path)) == cfg
    with pytest.raises(ValueError):
        hz.ExperimentConfig.from_dict({"bogus": 1})


def test_shipped_config_matches_defaults():
    import pathlib
    text = (pathlib.Path(__file__).parent.parent / "configs" / "default.json").read_text()
    assert hz.ExperimentConfig.from_json(text) == hz.ExperimentConfig()


def test_precision_override_from_environment():
    cfg = hz.ExperimentConfig()
    assert cfg.with_env({hz.PRECISION_ENV: "320"}).precision_bits == 320
    assert cfg.with_env({}).precision_bits == 256
    assert cfg.with_env({"MLRHP_N_SWEEP": "4"}).n_sweep == cfg.n_sweep


def test_cli_flags(monkeypatch):
    monkeypatch.setenv(hz.PRECISION_ENV, "300")
    args = build_parser().parse_args(["verify", "zeros", "--n-sweep", "8,16", "--format", "csv"])
    cfg = load_config(args)
    assert cfg.n_sweep == [8, 16] and cfg.format == "csv" and cfg.precision_bits == 300
    args = build_parser().parse_args(["verify", "zeros", "--precision-bits", "288"])
    assert load_config(args).precision_bits == 288


def test_power_law_fit():
    f = hz.fit_power_law([8, 16, 32, 64], [3 / n for n in (8, 16, 32, 64)])
    assert abs(f["p"] - 1) < 1e-12 and abs(f["C"] - 3) < 1e-10 and all(abs(r - 0.5) < 1e-12 for r in f["ratios"])
    assert hz.fit_power_law([8, 16], [None, 1.0])["p"] is None


def test_emit_is_deterministic_and_schema(tmp_path):
    r = _report()
    p1 = hz.emit(r, "all", str(tmp_path / "a"))
    p2 = hz.emit(_report(), "all", str(tmp_path / "b"))
    for a, b in zip(p1, p2):
        assert open(a, "rb").read() == open(b, "rb").read()
    rows = list(csv.reader(io.StringIO(hz.report_csv(r))))
    assert rows[0] == ["experiment", "n", "probe", "error", "fit_p", "fit_C", "pass"]
    assert len(rows) == 1 + 6
    svg = hz.report_svg(r)
    assert svg.count('class="series"') == 2
    doc = json.loads(hz.report_json(r))
    assert list(doc) == ["experiment", "criterion", "ns", "errors", "fits", "checks", "passed", "notes"]


def test_pass_flags_recomputable_from_tables():
    r = _report()
    for probe, errs in r.errors.items():
        f = hz.fit_power_law(r.ns, errs)
        ok = 0.8 <= f["p"] <= 1.2 and all(0.35 <= x <= 0.7 for x in f["ratios"])
        assert ok == r.fits[probe]["pass"]


def test_outer_probe_region_invariant():
    cfg = hz.ExperimentConfig(outer_probes=[[3.6, 0.1]])
    with pytest.raises(ValueError):
        hz.exp_outer_asymptotics(cfg)


def test_cli_smoke(tmp_path, capsys):
    assert main(["mop", "solve", "--n1", "2", "--n2", "3", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "mop.json").exists()
    assert main(["verify", "outer", "--n-sweep", "8,16", "--out-dir", str(tmp_path), "--format", "csv"]) in (0, 1)
    assert (tmp_path / "outer.csv").exists()
