import pytest

from hedgepole.cli import main
from hedgepole.config import ConfigError, parse_config


# ------------------------------------------------------------------- parsing

def test_empty_config_gives_full_defaults():
    cfg = parse_config("")
    assert cfg.experiment == "all"
    assert cfg.controllers == ("rshac", "fc", "lqr")
    assert cfg.integrator == "rk4"
    assert cfg.dwell == 0.5
    assert cfg.duration == 10.0
    assert cfg.plant.m == 0.116527
    assert cfg.plant.Ts == 0.001
    assert cfg.rshac.x.semantic_map.crisp_hi == 0.43
    assert cfg.rshac.x.control_frame.alpha == 0.35
    assert cfg.rshac.q_dot.state_frame.n_labels == 7
    assert cfg.rshac.l1 == 0.09 and cfg.rshac.l2 == 0.87
    assert cfg.lqr.q_diag == (40.0, 1.0, 100.0, 2.0)
    assert cfg.lqr.r == 0.2
    assert cfg.fuzzy.u_max == 29.42


def test_default_valued_override_is_a_noop():
    assert parse_config("plant.m = 0.116527") == parse_config("")


def test_overrides_apply():
    cfg = parse_config("""
    # comment line
    plant.Ts = 0.002
    rshac.alpha_u_x = 0.4   # inline comment
    lqr.r = 2.0
    harness.experiment = exp2
    harness.dwell = 0.25
    harness.duration = 6
    harness.out = elsewhere
    """)
    assert cfg.plant.Ts == 0.002
    assert cfg.rshac.x.control_frame.alpha == 0.4
    assert cfg.lqr.r == 2.0
    assert cfg.experiment == "exp2"
    assert cfg.dwell == 0.25
    assert cfg.duration == 6.0
    assert cfg.out_dir == "elsewhere"


def test_controller_subset_parsing():
    assert parse_config("harness.controllers = rshac, lqr").controllers == \
        ("rshac", "lqr")
    assert parse_config("harness.controllers = all").controllers == \
        ("rshac", "fc", "lqr")
    with pytest.raises(ConfigError):
        parse_config("harness.controllers = pid")


def test_invalid_alpha_rejected_with_location():
    with pytest.raises(ConfigError, match="alpha_u_x"):
        parse_config("rshac.alpha_u_x = 1.5")


def test_unknown_key_rejected_with_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("plant.m = 0.1\nplant.mass = 0.1")


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="motor"):
        parse_config("motor.kv = 100")


def test_malformed_lines_rejected():
    with pytest.raises(ConfigError):
        parse_config("just some text")
    with pytest.raises(ConfigError):
        parse_config("m = 0.1")  # missing section
    with pytest.raises(ConfigError):
        parse_config("plant.m =")
    with pytest.raises(ConfigError):
        parse_config("plant.m = fast")


def test_invalid_plant_value_rejected():
    with pytest.raises(ConfigError, match="plant.m"):
        parse_config("plant.m = -1")


def test_custom_episode_keys():
    cfg = parse_config("""
    harness.experiment = custom
    harness.custom_q0_deg = 15
    harness.custom_step_to = 0.1
    harness.custom_t_step = 2.0
    """)
    assert cfg.experiment == "custom"
    assert cfg.custom.x0.q == pytest.approx(15 * 3.14159 / 180, rel=1e-3)
    assert cfg.custom.step_to == 0.1
    with pytest.raises(ConfigError):
        parse_config("harness.custom_step_to = 0.1")  # t_step missing


def test_experiment_selector_validated():
    with pytest.raises(ConfigError):
        parse_config("harness.experiment = exp3")


# ----------------------------------------------------------------------- CLI

def test_cli_gain(capsys):
    assert main(["gain"]) == 0
    out = capsys.readouterr().out
    assert "-13.9" in out and "-55.3" in out
    assert "stable" in out


def test_cli_validate_default_config(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert "all checks passed" in out


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("rshac.alpha_u_x = 1.5\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_run_single_episode(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("harness.duration = 6\n")
    out_dir = tmp_path / "out"
    rc = main(["run", "--experiment", "exp2", "--controller", "lqr",
               "--config", str(cfg), "--out", str(out_dir)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "Experiment 2" in stdout
    traj_path = out_dir / "traj_exp2_step_lqr.csv"
    metrics_path = out_dir / "metrics.csv"
    assert traj_path.exists() and metrics_path.exists()
    assert (out_dir / "fig_exp2_step.png").exists()
    header = traj_path.read_text().splitlines()[0]
    assert header == "t,x,x_dot,q,q_dot,u,x_ref"
    metrics_lines = metrics_path.read_text().splitlines()
    assert metrics_lines[0].startswith("controller,experiment,scenario")
    assert metrics_lines[1].startswith("lqr,exp2,step,")

    # byte-identical rerun
    before = {p.name: p.read_bytes() for p in out_dir.iterdir()
              if p.suffix == ".csv"}
    rc = main(["run", "--experiment", "exp2", "--controller", "lqr",
               "--config", str(cfg), "--out", str(out_dir)])
    assert rc == 0
    for p in out_dir.iterdir():
        if p.suffix == ".csv":
            assert p.read_bytes() == before[p.name]


def test_cli_run_experiment1_writes_nine_trajectories(tmp_path, capsys):
    out_dir = tmp_path / "exp1"
    rc = main(["run", "--experiment", "exp1", "--out", str(out_dir)])
    assert rc == 0
    csvs = [p for p in out_dir.iterdir()
            if p.name.startswith("traj_") and p.suffix == ".csv"]
    assert len(csvs) == 9
    figures = [p for p in out_dir.iterdir() if p.suffix == ".png"]
    assert len(figures) == 3
    stdout = capsys.readouterr().out
    assert "RS-HAC" in stdout and "LQR" in stdout
    assert "up = RS-HAC better" in stdout
    # printed transient times match the metrics CSV
    metrics_lines = (out_dir / "metrics.csv").read_text().splitlines()[1:]
    for line in metrics_lines:
        cells = line.split(",")
        assert cells[7] == "true"
        assert f"{float(cells[3]):.3f}" in stdout


def test_cli_run_flags_non_stabilized_episode(tmp_path, capsys):
    cfg = tmp_path / "short.cfg"
    cfg.write_text("harness.duration = 1.5\n")
    rc = main(["run", "--experiment", "exp1", "--controller", "lqr",
               "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 1
    assert "NOT STABILIZED" in capsys.readouterr().err


def test_cli_run_custom_experiment(tmp_path):
    cfg = tmp_path / "custom.cfg"
    cfg.write_text("""
    harness.experiment = custom
    harness.controllers = lqr
    harness.duration = 5
    harness.custom_q0_deg = 8
    """)
    out_dir = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out_dir)]) == 0
    assert (out_dir / "traj_custom_custom_lqr.csv").exists()
