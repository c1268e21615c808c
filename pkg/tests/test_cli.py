import json
import subprocess
import sys

import pytest

from eisenkit.cli import main
from eisenkit.config import RunConfig, load_config


def run_cli(args):
    return subprocess.run([sys.executable, "-m", "eisenkit.cli", *args],
                          capture_output=True, timeout=600)


def test_help_exits_zero():
    assert run_cli(["--help"]).returncode == 0


def test_cusps_level_4(tmp_path):
    out = tmp_path / "cusps.json"
    res = run_cli(["cusps", "--level", "4", "--out", str(out)])
    assert res.returncode == 0
    doc = json.loads(out.read_text())
    rows = doc["checks"]
    assert rows[0]["pass"] is True
    assert len(rows[0]["inputs"]["cusps"]) == 3


def test_cusps_bad_level_exits_two():
    assert run_cli(["cusps", "--level", "6"]).returncode == 2


def test_unknown_command_exits_two():
    assert run_cli(["no-such-command"]).returncode == 2


def test_report_bytes_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    r1 = run_cli(["check-cocycle", "--seed", "42", "--out", str(a)])
    r2 = run_cli(["check-cocycle", "--seed", "42", "--out", str(b)])
    assert r1.returncode == 0 and r2.returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_csv_flag(tmp_path):
    out = tmp_path / "rows.csv"
    res = run_cli(["check-cocycle", "--seed", "1", "--csv", "--out", str(out)])
    assert res.returncode == 0
    head = out.read_text().splitlines()[0]
    assert head == "name,paper_ref,inputs,residual,tol,pass"


def test_eval_command(tmp_path):
    out = tmp_path / "val.json"
    res = run_cli(["eval", "--level", "4", "--z", "0.3,0.8", "--c-max", "60",
                   "--out", str(out)])
    assert res.returncode == 0
    doc = json.loads(out.read_text())
    assert doc["z"] == [0.3, 0.8]
    assert "tail_estimate" in doc


def test_eval_bad_point_exits_two():
    assert run_cli(["eval", "--level", "4", "--z", "nope"]).returncode == 2


def test_validate_schema_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"level\": 4}")
    assert run_cli(["validate", str(bad)]).returncode == 2
    assert run_cli(["validate", str(tmp_path / "missing.json")]).returncode == 2


def test_validate_zero_dataset(tmp_path):
    from eisenkit.converse import FamilyEntry, NiceFamilyDataset
    ds = NiceFamilyDataset(4, "1/2", 2.5 + 0j,
                           [FamilyEntry(1, 0j, 0j, 0j, 0j, {1: 0j}, {1: 0j})])
    path = tmp_path / "zeros.json"
    ds.save(str(path))
    res = run_cli(["validate", str(path)])
    assert res.returncode == 0


def test_config_file_and_flag_override(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("[run]\nlevel = 8\nseed = 7\nheights = 0.8 1.2\n")
    cfg = load_config(str(cfgfile), {"seed": 9})
    assert cfg.level == 8
    assert cfg.seed == 9          # flag wins
    assert cfg.heights == (0.8, 1.2)
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "nope.cfg"), {})


def test_config_rejects_bad_level():
    with pytest.raises(ValueError):
        RunConfig(level=6)
    with pytest.raises(ValueError):
        RunConfig(weight="5/2")


def test_main_inprocess_usage_error():
    assert main(["cusps", "--level", "6"]) == 2
