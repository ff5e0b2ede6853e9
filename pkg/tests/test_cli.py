import csv
import json

import pytest

from mfflow.cli import main
from mfflow.config import ConfigError, RunConfig, build_config, format_config, parse_config_text
from mfflow.presets import PRESETS, get_preset
from mfflow.runner import CompareError, compare, reload_records, run

TINY = dict(d=3, m=8, n=40, N_pop=80, target="norm-difference", h=0.1, T=30, record_every=5, seed=3)


def write_config(path, **kw):
    path.write_text("".join(f"{k} = {v}\n" for k, v in kw.items()))
    return path


def test_parse_config_text():
    raw = parse_config_text("# comment\nd = 4\n\ntarget = max-difference  # trailing\nh = 0.1\n")
    assert raw == {"d": "4", "target": "max-difference", "h": "0.1"}


@pytest.mark.parametrize("text", ["d 4\n", "d = 4\nd = 5\n", "= 3\n"])
def test_parse_config_rejects(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_build_config_validates():
    with pytest.raises(ConfigError):
        build_config({**TINY, "d": 0})
    with pytest.raises(ConfigError):
        build_config({**TINY, "target": "sine"})
    with pytest.raises(ConfigError):
        build_config({**TINY, "colour": "red"})


def test_format_config_roundtrip():
    cfg = build_config(dict(TINY))
    assert build_config(parse_config_text(format_config(cfg))) == cfg


def test_run_id_ignores_output_dir():
    cfg = build_config(dict(TINY))
    assert cfg.run_id() == cfg.replace(output_dir="elsewhere").run_id()
    assert cfg.run_id() != cfg.replace(seed=4).run_id()


def test_default_fit_window():
    cfg = RunConfig(**TINY)
    assert cfg.fit_window == pytest.approx((0.3, 3.0))


def test_cli_run_config_with_flag_override(tmp_path):
    conf = write_config(tmp_path / "c.cfg", **TINY)
    out = tmp_path / "run"
    assert main(["run", "--config", str(conf), "--seed", "7", "--output-dir", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 7
    assert manifest["config"]["d"] == 3
    assert set(manifest["seeds"]) == {"dataset", "init", "population"}
    for name in ("trajectory.csv", "final_ensemble.csv", "summary.json"):
        assert (out / name).is_file()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "ok"
    recs = reload_records(out)
    assert [r.t for r in recs][-1] == pytest.approx(3.0)


def test_cli_malformed_config_exits_2(tmp_path):
    conf = tmp_path / "bad.cfg"
    conf.write_text("d = three\n")
    out = tmp_path / "run"
    assert main(["run", "--config", str(conf), "--output-dir", str(out)]) == 2
    assert not out.exists()


def test_cli_unknown_preset_exits_2(tmp_path):
    assert main(["run", "--preset", "nope", "--output-dir", str(tmp_path / "x")]) == 2
    assert not (tmp_path / "x").exists()


def test_cli_presets_lists_all(capsys):
    assert main(["presets"]) == 0
    names = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
    assert names == list(PRESETS)


def test_presets_required_names():
    for name in ["fig1-barron-d8", "fig1-nonbarron-d32", "fig2-norms", "rf-vs-nn-d32", "overfit-smalln", "oracle-alpha2"]:
        assert get_preset(name).name == name
    with pytest.raises(KeyError):
        get_preset("fig9")


def test_cli_oracle_table(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle", "--alpha", "2", "--h", "1e-3", "--T", "1000", "--record-every", "100", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 11
    assert float(rows[-1]["abs_error"]) <= 1e-3


def test_run_oracle_preset_directory(tmp_path):
    cfg = get_preset("oracle-alpha1").runs[0][1]
    assert run(cfg.replace(T=1000, h=1e-3, record_every=500), tmp_path) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["passed"] and summary["kind"] == "oracle"


def test_compare_identical_seeds(tmp_path):
    cfg = build_config(dict(TINY))
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    text = compare([tmp_path / "a", tmp_path / "b"])
    header, r1, r2 = text.strip().splitlines()
    assert header.startswith("d,target,mode")
    assert r1 == r2


def test_compare_via_cli(tmp_path, capsys):
    cfg = build_config(dict(TINY))
    run(cfg, tmp_path / "a")
    run(cfg.replace(d=2), tmp_path / "b")
    assert main(["compare", str(tmp_path / "a"), str(tmp_path / "b")]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["d"] for r in rows] == ["2", "3"]


def test_compare_missing_summary(tmp_path):
    run(build_config(dict(TINY)), tmp_path / "a")
    (tmp_path / "b").mkdir()
    with pytest.raises(CompareError, match="b"):
        compare([tmp_path / "a", tmp_path / "b"])
    assert main(["compare", str(tmp_path / "a"), str(tmp_path / "b")]) == 2


def test_compare_needs_two(tmp_path):
    with pytest.raises(CompareError):
        compare([tmp_path])


def test_run_is_reproducible(tmp_path):
    cfg = build_config(dict(TINY))
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("trajectory.csv", "final_ensemble.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_output_root_env(tmp_path, monkeypatch):
    monkeypatch.setenv("MFFLOW_OUTPUT_ROOT", str(tmp_path))
    conf = write_config(tmp_path / "c.cfg", **TINY)
    assert main(["run", "--config", str(conf)]) == 0
    cfg = build_config(dict(TINY))
    assert (tmp_path / cfg.run_id() / "summary.json").is_file()
