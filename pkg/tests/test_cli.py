import csv
import subprocess
import sys

import pytest

from fvceuler.cli import EXIT_IO, EXIT_OK, EXIT_SOLVER, EXIT_USAGE, EXIT_VALIDATION, UsageError, main, parse_args
from fvceuler.config import ConfigError, load_config
from fvceuler.fvc import AlphaMode, LimiterKind
from fvceuler.mesh import CflMode


def write_ini(path, text):
    path.write_text(text)
    return str(path)


def test_defaults():
    spec = parse_args(["run"])
    assert spec.benchmark.name == "sod_sonic"
    assert (spec.config.scheme, spec.cells, spec.t_end, spec.config.courant) == ("fvc", 200, 0.2, 0.8)
    assert spec.config.alpha_mode.adaptive and spec.config.limiter is LimiterKind.MINMOD
    assert spec.config.cfl_mode is CflMode.BASE and spec.out is None


def test_flags_override_config_which_overrides_defaults(tmp_path):
    ini = write_ini(tmp_path / "a.ini", "[mesh]\ncells = 100\n[scheme]\nscheme = hll\ncfl = 0.5\n")
    spec = parse_args(["run", "--config", ini, "--cells", "64"])
    assert spec.cells == 64  # flag wins
    assert spec.config.scheme == "hll" and spec.config.courant == 0.5  # config wins
    assert spec.t_end == 0.2  # benchmark default


def test_benchmark_alpha_override_survives_unless_overridden():
    assert parse_args(["run", "--test", "contact_slow"]).config.alpha_mode == AlphaMode(0.5)
    spec = parse_args(["run", "--test", "contact_slow", "--alpha", "adaptive"])
    assert spec.config.alpha_mode.adaptive


@pytest.mark.parametrize(
    "argv",
    [[], ["run", "--test", "nope"], ["run", "--scheme", "hllc"], ["run", "--limiter", "superbee"],
     ["fly"], ["run", "--test", "custom", "--left", "1,0,1"], ["campaign"]],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_USAGE


def test_unknown_limiter_in_config_is_a_usage_error(tmp_path):
    ini = write_ini(tmp_path / "a.ini", "[scheme]\nlimiter = superbee\n")
    with pytest.raises(UsageError):
        parse_args(["run", "--config", ini])
    assert main(["run", "--config", ini]) == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [["run", "--cells", "0"], ["run", "--cfl", "-1"], ["run", "--gamma", "1.0"], ["run", "--alpha", "fixed:2"],
     ["run", "--tend", "0"], ["run", "--jobs", "0"], ["run", "--repetitions", "2"], ["run", "--cfl-mode", "fast"],
     ["run", "--test", "custom", "--left", "1,0,-1", "--right", "1,0,1", "--tend", "0.1"],
     ["run", "--test", "custom", "--left", "1,0", "--right", "1,0,1", "--tend", "0.1"],
     ["campaign", "--table1", "--grids", "100,300"]],
)
def test_validation_errors_exit_3(argv, capsys):
    assert main(argv) == EXIT_VALIDATION
    assert "validation error" in capsys.readouterr().err


@pytest.mark.parametrize("text", ["[mesh]\ncells = many\n", "[mesh]\nsize = 3\n", "[extra]\nx = 1\n", "cells = 3\n"])
def test_bad_config_files(tmp_path, text):
    with pytest.raises(ConfigError):
        load_config(write_ini(tmp_path / "a.ini", text))


def test_missing_config_file(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.ini")]) == EXIT_VALIDATION


def test_solver_failure_exits_4_with_step(capsys):
    assert main(["run", "--test", "vacuum123", "--scheme", "roe"]) == EXIT_SOLVER
    err = capsys.readouterr().err
    assert "failed at step 1" in err


def test_unwritable_output_exits_5(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["run", "--cells", "20", "--out", str(blocker / "sub")]) == EXIT_IO
    assert "i/o error" in capsys.readouterr().err


def test_run_prints_summary_and_writes_manifest(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--cells", "50", "--scheme", "hll", "--out", str(out), "--plots"]) == EXIT_OK
    line = capsys.readouterr().out
    assert "sod_sonic" in line and "scheme=hll" in line and "L1(rho)=" in line
    assert (out / "sod_sonic_hll_50.csv").exists() and (out / "sod_sonic_exact_50.csv").exists()
    assert list(out.glob("plot_*.py"))
    echoed = load_config(out / "manifest.ini")
    assert echoed["scheme"] == "hll" and echoed["cells"] == 50 and echoed["cfl"] == 0.8


def test_manifest_reproduces_the_run(tmp_path):
    first = tmp_path / "first"
    assert main(["run", "--test", "custom", "--left", "1,0,1", "--right", "0.5,0,0.5", "--tend", "0.1",
                 "--split", "0.4", "--cells", "30", "--limiter", "vanalbada", "--out", str(first)]) == EXIT_OK
    second = tmp_path / "second"
    assert main(["run", "--config", str(first / "manifest.ini"), "--out", str(second)]) == EXIT_OK
    name = "custom_fvc_30.csv"
    assert (first / name).read_bytes() == (second / name).read_bytes()


def test_campaign_table1(tmp_path, capsys):
    out = tmp_path / "camp"
    assert main(["campaign", "--table1", "--grids", "50,100", "--out", str(out)]) == EXIT_OK
    rows = list(csv.reader((out / "table1_reproduction.csv").open()))
    assert rows[0] == ["cells", "rusanov", "roe", "hll", "fvc"] and len(rows) == 3
    assert (out / "manifest.ini").exists()
    assert "overall rate" in capsys.readouterr().out


def test_console_script_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fvceuler", "run", "--cells", "20", "--scheme", "rusanov"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0, proc.stderr
    assert "scheme=rusanov" in proc.stdout
