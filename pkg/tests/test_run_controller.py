import os

import numpy as np
import pytest

from config.config_loader import CONFIG_DIR, create_default_config, load_config, validate_config
from scenario.observation import nearest_sample
from scenario.scenario import Scenario
from synthesis.run_controller import RunController, analyze_result, hashed_config


def test_hashed_config_drops_output():
    config = create_default_config()
    stored = hashed_config(config)
    assert "output" not in stored
    assert "output" in config


def test_build_steps():
    config = create_default_config()
    config["scenario"]["grid"].update({"p": 4, "q": 4})
    controller = RunController(config)
    scenario = controller.build_scenario()
    assert scenario.grid.atom_count == 16
    database = controller.build_database(scenario)
    assert len(database) == 273
    field = controller.build_target(scenario)
    assert field.shape == (scenario.observation.sample_count, 2)
    assert controller.target.get_target_type() == "pencil"


def test_pencil_benchmark_improves_on_pre_image_design(tmpdir):
    """15x15 paper-substrate pencil beam: the optimized skin focuses more power."""
    config = load_config(os.path.join(CONFIG_DIR, "config.json"))
    config["synthesis"].update({"max_outer": 5, "pso": {**config["synthesis"]["pso"], "swarm_size": 20,
                                                        "iterations": 20}})
    metrics = RunController(config, workers=2).run_synthesis(str(tmpdir))
    assert metrics["p_max"] > 0
    assert metrics["phi_final"] < metrics["phi_pre_image"]
    assert metrics["s_th"] > 0
    assert os.path.exists(metrics["paths"]["power_improvement"])


def test_contour_run_reports_footprint_power(tmpdir):
    config = create_default_config()
    config["scenario"]["grid"].update({"p": 6, "q": 6, "center_height_m": 10.0})
    config["scenario"]["observation"] = {"kind": "floor", "x_m": [-6.0, 6.0], "y_m": [4.0, 16.0],
                                         "x_count": 7, "y_count": 7}
    config["target"] = {"kind": "contour", "polygons": [[[-3.0, 6.0], [3.0, 6.0], [3.0, 12.0], [-3.0, 12.0]]]}
    config["synthesis"].update({"max_outer": 2})
    config["synthesis"]["pso"].update({"swarm_size": 6, "iterations": 3})

    metrics = RunController(validate_config(config)).run_synthesis(str(tmpdir))
    assert metrics["inside_power_opt"] > 0
    assert metrics["inside_power_pi"] > 0
    assert len(metrics["p_max_location"]) == 2
    assert "cut_peak_theta_deg" not in metrics


@pytest.mark.slow
@pytest.mark.parametrize("config_name", ["config.json", "pencil_35x35.json"])
def test_improvement_peaks_along_target_direction(tmpdir, config_name):
    """Paper-substrate pencil beams gain power exactly at the requested direction."""
    config = load_config(os.path.join(CONFIG_DIR, config_name))
    obs = Scenario.from_config(config["scenario"]).observation
    expected = nearest_sample(obs, np.deg2rad(config["target"]["theta_deg"]), np.deg2rad(config["target"]["phi_deg"]))

    metrics = RunController(config, workers=4).run_synthesis(str(tmpdir))
    assert metrics["p_max"] > 0
    assert metrics["p_max_index"] == expected
    assert metrics["target_index"] == expected
    assert metrics["delta_e_db"] > 0

    analysis = analyze_result(os.path.join(str(tmpdir), "result.json"), str(tmpdir.join("analysis")))
    assert analysis["p_max"] == pytest.approx(metrics["p_max"], rel=1e-9)
    assert analysis["p_max_index"] == expected


@pytest.mark.slow
def test_contoured_coverage_gains_inside_footprint(tmpdir):
    """Two-polygon floor target 10 m below a 35x35 skin."""
    config = load_config(os.path.join(CONFIG_DIR, "contour_35x35.json"))
    config["target"]["polygons_path"] = os.path.join(CONFIG_DIR, "coverage_polygons.json")
    assert config["scenario"]["grid"]["center_height_m"] == 10.0

    metrics = RunController(config, workers=4).run_synthesis(str(tmpdir))
    assert metrics["p_max"] > 0
    assert metrics["inside_power_opt"] > metrics["inside_power_pi"]
