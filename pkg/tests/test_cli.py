"""Command-line behavior: exit codes, config validation, seed plumbing.

The runner reserves exit 2 for runs that hit their collision budget, so even
argparse usage errors are remapped to 1.  Tests call main() directly with an
argv list rather than spawning subprocesses.
"""

import json

import pytest

from qsc.cli import main


def run_cli(*argv):
    return main([str(a) for a in argv])


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


# h=0 turns off the free precession so the coherence settles quickly and the
# tiny budgets below actually converge
BASE_CONFIG = {
    "reservoirs": [{"theta": 3.14159265358979, "coupling": 0.1}],
    "engine": {"h": 0.0, "max_collisions": 400, "tol": 1e-2},
}


def test_list_shows_all_presets(capsys):
    assert run_cli("list") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 18
    assert any(line.startswith("fig1e") for line in lines)
    assert any(line.startswith("transmon") for line in lines)


def test_run_preset_writes_and_reports_files(tmp_path, capsys):
    code = run_cli("run", "--preset", "fig3a", "--out", tmp_path,
                   "--max-collisions", 60, "--tol", 0.5)
    out = capsys.readouterr().out
    assert code == 0
    assert str(tmp_path / "sweep.csv") in out
    assert (tmp_path / "sweep.csv").exists()


def test_run_unknown_preset_fails(tmp_path, capsys):
    assert run_cli("run", "--preset", "fig9z", "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err


def test_budget_exhaustion_exits_two_but_writes(tmp_path, capsys):
    code = run_cli("run", "--preset", "fig1e", "--out", tmp_path, "--max-collisions", 50)
    captured = capsys.readouterr()
    assert code == 2
    assert "collision budget" in captured.err
    assert (tmp_path / "trajectory.csv").exists()


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("run")  # neither --preset nor --config
    assert exc.value.code == 1


def test_custom_trajectory_run(tmp_path, capsys):
    config = write_config(tmp_path, BASE_CONFIG)
    code = run_cli("run", "--config", config, "--out", tmp_path / "out")
    assert code == 0
    lines = (tmp_path / "out" / "trajectory.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# seed={0xC0111DE}"
    assert lines[2] == "n,sigma_z,bloch_x,bloch_y,bloch_z,fidelity"
    # one drain reservoir pulls the state toward the ground state
    assert float(lines[-1].split(",")[1]) < 0.0


def test_custom_run_with_noise_uses_final_state_fidelity(tmp_path):
    config = write_config(tmp_path, {
        "reservoirs": [{"theta": 0.3, "coupling": 0.1, "noise": {"epsilon": 0.3, "eta": 0.1}}],
        "engine": {"max_collisions": 300, "tol": 1e-2},
    })
    code = run_cli("run", "--config", config, "--out", tmp_path / "out")
    assert code in (0, 2)
    lines = (tmp_path / "out" / "trajectory.csv").read_text(encoding="utf-8").splitlines()
    # no clean steady-state oracle exists under noise; the last row is its
    # own fidelity reference
    assert lines[-1].split(",")[5] == "1"


def test_sweep_over_reservoir_coupling(tmp_path):
    config = write_config(tmp_path, {
        **BASE_CONFIG,
        "sweep": {"path": "reservoirs.0.coupling", "values": [0.05, 0.1]},
    })
    code = run_cli("run", "--config", config, "--out", tmp_path / "out")
    assert code == 0
    lines = (tmp_path / "out" / "sweep.csv").read_text(encoding="utf-8").splitlines()
    assert lines[2] == "param_name,param_value,sigma_z_ss,n_used,converged,label"
    assert lines[3].startswith("reservoirs.0.coupling,0.05,")
    assert lines[4].startswith("reservoirs.0.coupling,0.1,")
    assert len(lines) == 5


def test_sweep_path_must_resolve(tmp_path, capsys):
    config = write_config(tmp_path, {
        **BASE_CONFIG,
        "sweep": {"path": "reservoirs.5.coupling", "values": [0.1]},
    })
    assert run_cli("run", "--config", config, "--out", tmp_path / "out") == 1
    assert "sweep path" in capsys.readouterr().err


def test_sweep_cannot_invent_engine_keys(tmp_path, capsys):
    config = write_config(tmp_path, {
        **BASE_CONFIG,
        "sweep": {"path": "engine.velocity", "values": [1.0]},
    })
    assert run_cli("run", "--config", config, "--out", tmp_path / "out") == 1
    assert "unknown key" in capsys.readouterr().err


def test_unknown_config_keys_rejected(tmp_path, capsys):
    config = write_config(tmp_path, {**BASE_CONFIG, "extra": 1})
    assert run_cli("run", "--config", config, "--out", tmp_path / "out") == 1
    assert "unknown key" in capsys.readouterr().err


def test_preset_config_must_not_define_engine(tmp_path, capsys):
    config = write_config(tmp_path, {"name": "fig1e", "engine": {"h": 1.0}})
    assert run_cli("run", "--config", config, "--out", tmp_path / "out") == 1
    assert "must not define" in capsys.readouterr().err


def test_custom_config_requires_engine(tmp_path):
    config = write_config(tmp_path, {"reservoirs": BASE_CONFIG["reservoirs"]})
    assert run_cli("run", "--config", config, "--out", tmp_path / "out") == 1


def test_malformed_json_exits_one(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert run_cli("run", "--config", path, "--out", tmp_path / "out") == 1
    assert "JSON" in capsys.readouterr().err


def test_missing_config_file_exits_one(tmp_path):
    assert run_cli("run", "--config", tmp_path / "nope.json", "--out", tmp_path) == 1


def test_degree_input_converts_angles(tmp_path):
    config = write_config(tmp_path, {
        "angle_unit": "degrees",
        "reservoirs": [{"theta": 90.0, "coupling": 0.1}],
        "engine": {"h": 0.0, "max_collisions": 6000, "tol": 1e-5},
        "sweep": {"path": "reservoirs.0.theta", "values": [90.0, 180.0]},
    })
    code = run_cli("run", "--config", config, "--out", tmp_path / "out")
    assert code == 0
    lines = (tmp_path / "out" / "sweep.csv").read_text(encoding="utf-8").splitlines()
    # sweep values stay in the unit they were supplied in
    first, second = lines[3].split(","), lines[4].split(",")
    assert first[1] == "90" and second[1] == "180"
    assert abs(float(first[2])) < 1e-3 and first[5] == "class1"  # equator: sigma_z 0
    assert float(second[2]) < -0.99 and second[5] == "class2"  # pole: sigma_z -1
    # without the unit declaration the same angles are rejected as radians
    bad = write_config(tmp_path, {
        "reservoirs": [{"theta": 90.0, "coupling": 0.1}],
        "engine": {},
    }, name="bad.json")
    assert run_cli("run", "--config", bad, "--out", tmp_path / "out2") == 1


def test_seed_precedence(tmp_path, monkeypatch):
    def header_seed(out_dir):
        first = (out_dir / "trajectory.csv").read_text(encoding="utf-8").splitlines()[0]
        return first.removeprefix("# seed=")

    config = write_config(tmp_path, {**BASE_CONFIG, "engine": {**BASE_CONFIG["engine"], "seed": 77}})
    run_cli("run", "--config", config, "--out", tmp_path / "a")
    assert header_seed(tmp_path / "a") == "77"

    monkeypatch.setenv("QSC_SEED", "123")
    run_cli("run", "--config", config, "--out", tmp_path / "b")
    assert header_seed(tmp_path / "b") == "123"

    run_cli("run", "--config", config, "--out", tmp_path / "c", "--seed", 9)
    assert header_seed(tmp_path / "c") == "9"


def test_invalid_env_seed_exits_one(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("QSC_SEED", "not-a-number")
    assert run_cli("run", "--preset", "fig1f", "--out", tmp_path) == 1
    assert "QSC_SEED" in capsys.readouterr().err


def test_unwritable_output_exits_three(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("file in the way", encoding="utf-8")
    code = run_cli("run", "--preset", "fig1f", "--out", blocker,
                   "--max-collisions", 60, "--tol", 0.5)
    assert code == 3


def test_transmon_default_report(capsys):
    assert run_cli("transmon") == 0
    out = capsys.readouterr().out
    assert "omega_r = 8.625 GHz" in out
    assert "J(system, reservoir 1) = -48.9 MHz" in out
    assert "dispersive regime: FAIL" in out  # honest about the marginal ratios
    assert "response time: 10 us over 2000 collisions" in out


def test_transmon_custom_qubits(capsys):
    assert run_cli("transmon", "--omega-r", 10.0, "--qubit", "12.425:100") == 0
    out = capsys.readouterr().out
    assert "|delta|/g = 24.25 (ok)" in out
    assert "dispersive regime: ok" in out


def test_transmon_requires_complete_override(capsys):
    assert run_cli("transmon", "--omega-r", 10.0) == 1
    assert "both" in capsys.readouterr().err


def test_transmon_rejects_malformed_qubit(capsys):
    assert run_cli("transmon", "--omega-r", 10.0, "--qubit", "6.2") == 1
    assert "--qubit expects" in capsys.readouterr().err
