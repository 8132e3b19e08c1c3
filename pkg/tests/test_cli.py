import json
import os
import subprocess
import sys

import pytest

from mesl.cli import main
from mesl.config import loads

SMALL_SWEEP = '[sweep]\nv_start = "0.6V"\nv_stop = "0.8V"\nv_step = "0.1V"\ntrials = 600\n'


def run(args, capsys):
    with pytest.raises(SystemExit) as info:
        main(args)
    err = capsys.readouterr().err
    return info.value.code, json.loads(err) if err else None


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_truth_table_xnor_zero_temperature(tmp_path, capsys):
    assert main(["truth-table", "--kind", "xnor", "--temp", "0", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [(r["inputs"], r["output"]) for r in out["rows"]] == [([0, 0], 1), ([0, 1], 0), ([1, 0], 0), ([1, 1], 1)]
    lines = (tmp_path / "truth_table.csv").read_text().splitlines()
    assert lines[0] == "A,B,expected,output,success_rate,trials"
    assert lines[1] == "0,0,1,1,1.0,1"


def test_sweep_byte_identical_across_runs_and_threads(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL_SWEEP)
    outs = []
    for i, threads in enumerate((1, 1, 2)):
        d = tmp_path / f"o{i}"
        assert main(["sweep", "--config", str(cfg), "--seed", "11", "--threads", str(threads), "--out", str(d)]) == 0
        outs.append(files(d))
    assert outs[0] == outs[1] == outs[2]
    rows = outs[0]["sweep.csv"].decode().splitlines()
    assert rows[0] == "V,p_switch,ci_low,ci_high,trials" and len(rows) == 4


def test_manifest_reproduces_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--temp", "300", "--seed", "4", "--duration", "2e-10", "--out", str(a)]) == 0
    man = a / "manifest.toml"
    cfg = loads(man.read_text())
    assert cfg.sim.seed == 4 and cfg.magnet.temperature == 300.0
    assert main(["simulate", "--config", str(man), "--duration", "2e-10", "--out", str(b)]) == 0
    fa, fb = files(a), files(b)
    assert fa["trajectory.csv"] == fb["trajectory.csv"] and fa["summary.json"] == fb["summary.json"]
    assert loads(fb["manifest.toml"].decode()) == cfg


def test_every_command_writes_only_into_out(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    cfg = tmp_path / "c.toml"
    cfg.write_text('[sweep]\nv_start = "0.7V"\nv_stop = "0.7V"\ntrials = 8\nstt_window = "2ns"\n')
    expected = {
        "simulate": {"trajectory.csv", "summary.json"},
        "sweep": {"sweep.csv", "sweep_summary.json"},
        "tdist": {"tdist.csv", "tdist_summary.json"},
        "truth-table": {"truth_table.csv"},
        "cascade": {"cascade.csv", "events.csv", "reset_omission.csv"},
        "energy": {"energy.json"},
        "demag": {"demag.json"},
    }
    for cmd, names in expected.items():
        extra = ["--kind", "nor"] if cmd == "truth-table" else []
        temp = ["--temp", "0"] if cmd in ("truth-table", "cascade") else []
        assert main([cmd, *extra, *temp, "--config", str(cfg), "--out", f"out/{cmd}"]) == 0
        assert {p.name for p in (tmp_path / "out" / cmd).iterdir()} == names | {"manifest.toml"}
    capsys.readouterr()
    assert {p.name for p in tmp_path.iterdir()} == {"c.toml", "out"}


def test_cascade_outputs(tmp_path, capsys):
    assert main(["cascade", "--temp", "0", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert all(r["output"] == r["expected"] for r in out["rows"]) and len(out["rows"]) == 8
    assert out["reset_omission_failures"]
    assert (tmp_path / "events.csv").read_text().startswith("t_s,node,value_V\n")


def test_energy_report(tmp_path, capsys):
    assert main(["energy", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "energy.json").read_text())
    assert rep["v_data_V"] == 0.725
    r = rep["read"]
    assert r["v_read_V"] ** 2 / r["r_total_ohm"] * r["duration_s"] + rep["gate_J"] == pytest.approx(r["total_J"])


def test_demag_command(tmp_path, capsys):
    assert main(["demag", "--out", str(tmp_path)]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["Nzz"] == pytest.approx(0.900988686405, abs=1e-9)


def test_error_payloads_and_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('[me_oxide]\nt_ME = "-5nm"\n')
    code, err = run(["demag", "--config", str(bad), "--out", str(tmp_path / "o")], capsys)
    assert code == 2 and err["error"] == "ConfigError" and err["key"] == "me_oxide.t_ME" and err["line"] == 2
    assert not (tmp_path / "o").exists()
    code, err = run(["demag", "--bogus"], capsys)
    assert code == 64 and err["error"] == "UsageError"
    code, err = run(["simulate", "--duration", "1e-10", "--out", str(tmp_path / "o2"), "--config",
                     str(_write(tmp_path, '[sim]\ndt = "2ps"\n'))], capsys)
    assert code == 2
    code, err = run(["truth-table", "--kind", "xnor", "--temp", "0", "--out", str(tmp_path / "o3"), "--config",
                     str(_write(tmp_path, '[read_circuit]\nv_switch_min = "0.2V"\n'))], capsys)
    assert code == 6 and err["error"] == "ReadDisturbError"
    code, err = run(["cascade", "--temp", "0", "--out", str(tmp_path / "o4"), "--config",
                     str(_write(tmp_path, '[sim]\nwrite_pulse = "300ps"\n'))], capsys)
    assert code == 7 and err["error"] == "ScheduleError"


def _write(d, text):
    p = d / f"cfg{abs(hash(text))}.toml"
    p.write_text(text)
    return p


def test_module_entry_point(tmp_path):
    env = dict(os.environ)
    res = subprocess.run([sys.executable, "-m", "mesl", "demag", "--out", str(tmp_path)], capture_output=True,
                         text=True, env=env, check=False)
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["sum"] == pytest.approx(1.0)
