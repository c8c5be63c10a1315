import json
import os

import pandas as pd
import pytest

from atomdb.db_loader import load_db
from config.config_loader import CONFIG_DIR, create_default_config, load_config, save_config
from main import main, sweep_configs, sweep_seed
from synthesis.cost import SynthesisError

HEADER = "d_m,gamma_te_re,gamma_te_im,gamma_tm_re,gamma_tm_im\n"


@pytest.fixture(autouse=True)
def in_tmpdir(tmpdir, monkeypatch):
    """Run every command from a scratch directory so logs stay out of the tree."""
    monkeypatch.chdir(str(tmpdir))


def small_config(tmpdir, name="config.json", **synthesis):
    config = create_default_config()
    config["seed"] = 123
    config["scenario"]["grid"].update({"p": 6, "q": 6, "cell_size_m": 0.02725})
    config["scenario"]["observation"].update({"theta_count": 12, "phi_count": 24, "phi_deg": [-180.0, 165.0]})
    config["synthesis"].update({"max_outer": 2, "pso": {"swarm_size": 6, "iterations": 3}})
    config["synthesis"].update(synthesis)
    config["output"]["dir"] = os.path.join(str(tmpdir), "out")
    return save_config(config, os.path.join(str(tmpdir), name))


def test_atomdb_generate_paper(tmpdir):
    path = os.path.join(str(tmpdir), "paper.csv")
    assert main(["atomdb", "generate", "--substrate", "paper", "--file", path]) == 0
    database = load_db(path)
    assert len(database) == 273
    assert database.descriptors[0] == 0.0


def test_atomdb_generate_isola_then_validate(tmpdir, capsys):
    path = os.path.join(str(tmpdir), "isola.csv")
    assert main(["atomdb", "generate", "--substrate", "isola", "--file", path]) == 0
    assert main(["atomdb", "validate", "--file", path]) == 0
    assert "273 entries" in capsys.readouterr().out


def test_atomdb_validate_descending_rows(tmpdir, capsys):
    path = os.path.join(str(tmpdir), "bad.csv")
    with open(path, "w") as f:
        f.write(HEADER + "0.002,0.5,0,0.5,0\n0.001,0.5,0,0.5,0\n")
    assert main(["atomdb", "validate", "--file", path]) == 2
    assert "line 3" in capsys.readouterr().err


def test_atomdb_unknown_substrate(tmpdir):
    assert main(["atomdb", "generate", "--substrate", "fr4", "--file", os.path.join(str(tmpdir), "x.csv")]) == 2


def test_synthesize_is_reproducible_across_output_dirs(tmpdir):
    config = small_config(tmpdir)
    first = os.path.join(str(tmpdir), "first")
    second = os.path.join(str(tmpdir), "second")
    assert main(["synthesize", "--config", config, "--out", first]) == 0
    assert main(["synthesize", "--config", config, "--out", second, "--threads", "2"]) == 0

    with open(os.path.join(first, "result.json"), "rb") as f:
        first_bytes = f.read()
    with open(os.path.join(second, "result.json"), "rb") as f:
        assert f.read() == first_bytes
    with open(os.path.join(first, "metrics.json")) as f:
        assert "p_max" in json.load(f)


def test_seed_override_changes_stored_config(tmpdir):
    config = small_config(tmpdir)
    out = os.path.join(str(tmpdir), "seeded")
    assert main(["synthesize", "--config", config, "--out", out, "--seed", "7"]) == 0
    with open(os.path.join(out, "result.json")) as f:
        assert json.load(f)["config"]["seed"] == 7


def test_invalid_threshold_exits_with_input_error(tmpdir):
    config = small_config(tmpdir, eta_svd=0.0)
    assert main(["synthesize", "--config", config]) == 2


def test_missing_config_exits_with_input_error(tmpdir):
    assert main(["synthesize", "--config", os.path.join(str(tmpdir), "nope.json")]) == 2


def test_numerical_failure_exits_with_runtime_error(tmpdir, mocker):
    mocker.patch("main.RunController.run_synthesis",
                 side_effect=SynthesisError("Target is orthogonal to every retained mode"))
    assert main(["synthesize", "--config", small_config(tmpdir)]) == 1


def test_sweep_needs_values(tmpdir):
    with pytest.raises(SystemExit) as info:
        main(["sweep", "aperture", "--config", small_config(tmpdir), "--values"])
    assert info.value.code == 2


def test_sweep_configs_derive_seeds(tmpdir):
    config = load_config(small_config(tmpdir))
    configs = sweep_configs(config, "aperture", [4, 5])
    assert [c["scenario"]["grid"]["p"] for c in configs] == [4, 5]
    assert configs[0]["seed"] == sweep_seed(123, 0)
    assert configs[0]["seed"] != configs[1]["seed"]
    assert configs[1]["output"]["dir"].endswith("run_001_5")
    with pytest.raises(ValueError, match="positive integers"):
        sweep_configs(config, "aperture", [4.5])


def test_sweep_summary(tmpdir):
    config = small_config(tmpdir)
    out = os.path.join(str(tmpdir), "sweep")
    assert main(["sweep", "aperture", "--config", config, "--out", out, "--values", "4", "5"]) == 0
    summary = pd.read_csv(os.path.join(out, "sweep_summary.csv"))
    assert summary["value"].tolist() == [4, 5]
    assert (summary["status"] == "ok").all()


def test_analyze_stored_result(tmpdir):
    config = small_config(tmpdir)
    run_dir = os.path.join(str(tmpdir), "run")
    assert main(["synthesize", "--config", config, "--out", run_dir]) == 0
    analysis_dir = os.path.join(str(tmpdir), "analysis")
    assert main(["analyze", "--result", os.path.join(run_dir, "result.json"), "--out", analysis_dir]) == 0
    for name in ("field_design.csv", "field_reference.csv", "power_improvement.csv"):
        assert os.path.exists(os.path.join(analysis_dir, name))

    with open(os.path.join(run_dir, "metrics.json")) as f:
        stored = json.load(f)
    with open(os.path.join(analysis_dir, "power_improvement.meta.json")) as f:
        recomputed = json.load(f)
    assert recomputed["p_max"] == pytest.approx(stored["p_max"], rel=1e-9, abs=1e-12)


def test_analyze_pre_image_result_needs_reference(tmpdir):
    config = small_config(tmpdir)
    run_dir = os.path.join(str(tmpdir), "run")
    assert main(["synthesize", "--config", config, "--out", run_dir]) == 0
    assert main(["analyze", "--result", os.path.join(run_dir, "pi_result.json")]) == 2


@pytest.mark.slow
def test_aperture_sweep_trend(tmpdir):
    """Smaller skins gain more from the null-space optimization."""
    out = os.path.join(str(tmpdir), "aperture")
    assert main(["sweep", "aperture", "--config", os.path.join(CONFIG_DIR, "config.json"),
                 "--out", out, "--values", "15", "35", "55", "--threads", "2"]) == 0
    summary = pd.read_csv(os.path.join(out, "sweep_summary.csv"))
    p_max = dict(zip(summary["value"], summary["p_max"]))
    assert p_max[15] > p_max[35] > p_max[55] > 0


@pytest.mark.slow
def test_angle_sweep_completes(tmpdir):
    config = create_default_config()
    config["scenario"]["grid"].update({"p": 35, "q": 35, "cell_size_m": 0.02725})
    config["scenario"]["observation"].update({"theta_deg": [0.0, 60.0], "theta_count": 61})
    config["synthesis"].update({"max_outer": 10, "stall_patience": 3})
    path = save_config(config, os.path.join(str(tmpdir), "angle.json"))
    out = os.path.join(str(tmpdir), "angle")
    assert main(["sweep", "angle", "--config", path, "--out", out, "--values", "20", "50"]) == 0
    summary = pd.read_csv(os.path.join(out, "sweep_summary.csv"))
    assert (summary["p_max"] > 0).all()
