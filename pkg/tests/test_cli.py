"""Command-line behavior: configs, outputs, exit codes, exact tables."""

import csv
import json
import shutil
import subprocess

import pytest

from rangelab import cli
from rangelab.cli import main, resolve_config
from rangelab.harness import ConfigError

BASE = {"model": "oriented", "params": {"p": 0.5}, "sizes": [8, 16],
        "trials": 4, "outputs": ["range", "escape"]}


@pytest.fixture
def config_path(tmp_path):
    def write(overrides=None, **extra):
        cfg = {**BASE, **(overrides or {}), **extra}
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg))
        return str(path)
    return write


def run_cli(*argv):
    return main(list(argv))


# ---------------------------------------------------------------------------
# config resolution


def test_defaults_fill_in_and_resolution_is_idempotent():
    cfg = resolve_config(dict(BASE))
    assert cfg["seed"] == 0
    assert cfg["horizon"] is None
    assert cfg["threads"] == 1
    assert cfg["out"] == "results"
    assert cfg["format"] == "csv"
    assert resolve_config(cfg) == cfg


def test_config_values_are_coerced():
    cfg = resolve_config({**BASE, "trials": "7", "sizes": ["4", 8.0],
                          "seed": "3"})
    assert cfg["trials"] == 7
    assert cfg["sizes"] == [4, 8]
    assert cfg["seed"] == 3


def test_malformed_configs_are_rejected():
    with pytest.raises(ConfigError):
        resolve_config([])
    with pytest.raises(ConfigError):
        resolve_config({**BASE, "typo": 1})
    with pytest.raises(ConfigError):
        resolve_config({k: v for k, v in BASE.items() if k != "trials"})
    with pytest.raises(ConfigError):
        resolve_config({**BASE, "format": "parquet"})
    with pytest.raises(ConfigError):
        resolve_config({**BASE, "params": "p=0.5"})
    with pytest.raises(ConfigError):
        resolve_config({**BASE, "trials": "many"})


# ---------------------------------------------------------------------------
# run subcommand


def test_run_writes_table_and_summary(tmp_path, config_path):
    out = tmp_path / "res"
    assert run_cli("run", "--config", config_path(), "--out", str(out)) == 0

    with open(out / "results.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["n", "statistic", "mean", "ci_half", "trials"]
    assert len(rows) == 1 + len(BASE["sizes"]) * len(BASE["outputs"])
    assert {r[0] for r in rows[1:]} == {"8", "16"}
    for r in rows[1:]:
        float(r[2])  # means parse back
        assert r[4] == "4"

    summary = json.loads((out / "summary.json").read_text())
    assert summary["master_seed"] == 0
    assert set(summary["results"]) == {"8", "16"}
    assert summary["files"]["csv"] == "results.csv"
    # the stored config is fully resolved: feeding it back is a no-op
    assert resolve_config(summary["config"]) == summary["config"]


def test_rerun_is_byte_identical(tmp_path, config_path):
    cfg = config_path()
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "a"))
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "b"))
    assert (tmp_path / "a/results.csv").read_bytes() == \
        (tmp_path / "b/results.csv").read_bytes()


def test_thread_count_leaves_the_table_unchanged(tmp_path, config_path):
    cfg = config_path()
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "a"))
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "b"),
            "--threads", "4")
    assert (tmp_path / "a/results.csv").read_bytes() == \
        (tmp_path / "b/results.csv").read_bytes()


def test_seed_override_changes_the_numbers(tmp_path, config_path):
    cfg = config_path()
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "a"))
    run_cli("run", "--config", cfg, "--out", str(tmp_path / "b"),
            "--seed", "99")
    assert (tmp_path / "a/results.csv").read_bytes() != \
        (tmp_path / "b/results.csv").read_bytes()
    summary = json.loads((tmp_path / "b/summary.json").read_text())
    assert summary["master_seed"] == 99


def test_dotted_set_overrides_reach_the_config(tmp_path, config_path):
    out = tmp_path / "res"
    code = run_cli("run", "--config", config_path(), "--out", str(out),
                   "--set", "params.p=0.7",
                   "--set", "trials=2",
                   "--set", "sizes=[4,8,12]")
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["params"]["p"] == 0.7
    assert summary["config"]["trials"] == 2
    assert summary["config"]["sizes"] == [4, 8, 12]


def test_exit_codes_for_broken_inputs(tmp_path, config_path):
    assert run_cli("run", "--config", str(tmp_path / "missing.json")) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli("run", "--config", str(bad)) == 2
    assert run_cli("run", "--config", config_path({"typo": 1})) == 2
    assert run_cli("run", "--config", config_path(params={"p": 2.0})) == 2
    assert run_cli("run", "--config", config_path(),
                   "--set", "params.p") == 2  # not key=value


def test_budget_cap_exits_three(config_path):
    big = config_path(sizes=[20_000_000_001], trials=1, outputs=["range"])
    assert run_cli("run", "--config", big) == 3


def test_runtime_failure_exits_one(tmp_path, config_path, monkeypatch):
    def boom(spec):
        raise RuntimeError("worker died")
    monkeypatch.setattr(cli.harness, "run_experiment", boom)
    assert run_cli("run", "--config", config_path(),
                   "--out", str(tmp_path / "r")) == 1


# ---------------------------------------------------------------------------
# scaling subcommand


def test_scaling_reports_fits_with_expected_exponents(tmp_path, config_path,
                                                      capsys):
    cfg = config_path(sizes=[16, 32, 64], trials=6, outputs=["first_range"])
    out = tmp_path / "sc"
    assert run_cli("scaling", "--config", cfg, "--out", str(out)) == 0
    report = json.loads(capsys.readouterr().out)
    fit = report["fits"]["first_range"]
    assert fit["expected_exponent"] == 0.75
    assert fit["sizes"] == [16, 32, 64]
    assert len(fit["means"]) == 3
    assert fit["slope_ci"][0] <= fit["slope"] <= fit["slope_ci"][1]
    on_disk = json.loads((out / "scaling.json").read_text())
    assert on_disk == report


def test_scaling_needs_three_sizes(config_path):
    assert run_cli("scaling", "--config", config_path(sizes=[8, 16])) == 2


# ---------------------------------------------------------------------------
# exact tables


def test_exact_endpoint_table_for_one_step(capsys):
    assert run_cli("exact", "cp-law", "--p", "0.5", "--n", "1") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x y probability"
    got = {}
    for line in lines[1:]:
        x, y, prob = line.split()
        got[(int(x), int(y))] = float(prob)
    assert got == {(-1, 0): 0.25, (1, 0): 0.25, (0, -1): 0.25, (0, 1): 0.25}


def test_exact_escape_value(capsys):
    assert run_cli("exact", "cp-escape", "--p", "0.5", "--L", "2") == 0
    assert float(capsys.readouterr().out) == 0.875
    assert run_cli("exact", "cp-escape", "--p", "0.5", "--L", "1") == 0
    assert float(capsys.readouterr().out) == 1.0


def test_exact_scenery_sum_table(capsys):
    assert run_cli("exact", "rwrs-law", "--n", "0") == 0
    assert capsys.readouterr().out.strip().splitlines() == \
        ["z probability", "0 1"]
    assert run_cli("exact", "rwrs-law", "--walk", "simple",
                   "--scenery", "rademacher", "--n", "2") == 0
    lines = capsys.readouterr().out.strip().splitlines()[1:]
    got = {int(z): float(p) for z, p in (ln.split() for ln in lines)}
    assert got == {-2: 0.25, 0: 0.5, 2: 0.25}


def test_exact_caps_and_bad_parameters(capsys):
    assert run_cli("exact", "cp-law", "--p", "0.5", "--n", "15") == 3
    assert run_cli("exact", "rwrs-law", "--n", "13") == 3
    assert run_cli("exact", "cp-law", "--p", "1.5", "--n", "2") == 2
    assert run_cli("exact", "rwrs-law", "--walk", "poisson", "--n", "2") == 2
    capsys.readouterr()  # drop partial output


@pytest.mark.skipif(shutil.which("rangelab") is None,
                    reason="console script not on PATH")
def test_installed_script_answers():
    out = subprocess.run(["rangelab", "exact", "cp-escape", "--p", "0.5",
                          "--L", "2"], capture_output=True, text=True)
    assert out.returncode == 0
    assert float(out.stdout) == 0.875
