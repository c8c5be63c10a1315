import json
import os

import numpy as np
import pytest

from analysis.field_metrics import power_improvement_map
from forward.radiation_operator import assemble_operator
from reports.report_generator import ReportGenerator, complex_pairs, load_result, pairs_to_complex, read_map
from spectral.decomposition import decompose
from synthesis.layout_synthesizer import run_alternating
from targets.pencil_beam import PencilBeamTarget


@pytest.fixture
def synthesis_run(small_scenario, paper_db):
    """Short synthesis run on the small scenario with its decomposition."""
    operator = assemble_operator(small_scenario.grid, small_scenario.observation, small_scenario.wave.k0)
    dec = decompose(operator, 0.1)
    target = PencilBeamTarget("pencil", {"theta_deg": 30.0, "phi_deg": -45.0}).generate(small_scenario)
    result = run_alternating(small_scenario, paper_db, target, {"max_outer": 2, "pso": {"swarm_size": 4, "iterations": 2}})
    return result, dec, small_scenario.observation


def test_report_generator_init(tmpdir):
    """Test ReportGenerator initialization."""
    output_dir = os.path.join(str(tmpdir), "run")
    generator = ReportGenerator({"output_dir": output_dir, "run_config": {"seed": 1}})
    assert generator.output_dir == output_dir
    assert os.path.isdir(output_dir)
    assert len(generator.config_hash) == 64


def test_complex_pairs():
    values = np.array([[1.0 + 2.0j, -0.5j]])
    assert complex_pairs(values) == [[[1.0, 2.0], [0.0, -0.5]]]
    np.testing.assert_array_equal(pairs_to_complex(complex_pairs(values)), values)


def test_map_keeps_fifteen_digits(tmpdir, small_scenario):
    obs = small_scenario.observation
    values = np.random.default_rng(4).random(obs.sample_count) * np.pi
    generator = ReportGenerator({"output_dir": str(tmpdir)})
    path = generator.write_map(values, obs, "values")
    frame = read_map(path)
    assert frame.shape == obs.shape
    np.testing.assert_allclose(frame.to_numpy().ravel(), values, rtol=1e-14)
    np.testing.assert_allclose(frame.columns.to_numpy(), obs.column_values, rtol=1e-14)

    with open(os.path.join(str(tmpdir), "values.meta.json")) as f:
        sidecar = json.load(f)
    assert sidecar["domain"]["kind"] == "angular"
    assert sidecar["config_hash"] == generator.config_hash


def test_generate_report_writes_every_output(tmpdir, synthesis_run):
    result, dec, obs = synthesis_run
    power_map = power_improvement_map(result.field_opt, result.field_pi, obs)
    generator = ReportGenerator({"output_dir": str(tmpdir), "run_config": {"seed": 3}})
    paths = generator.generate_report(result, dec, obs, power_map, {"p_max": power_map.peak_value})

    for name in ("result.json", "pi_result.json", "layout.csv", "pi_layout.csv", "spectrum.csv",
                 "spectrum.meta.json", "field_opt.csv", "field_pi.csv", "field_target.csv",
                 "power_improvement.csv", "power_improvement.meta.json", "metrics.json"):
        assert os.path.exists(os.path.join(str(tmpdir), name)), name
    assert paths["result"].endswith("result.json")

    document = load_result(paths["result"])
    assert document["design"] == "optimized"
    np.testing.assert_array_equal(np.asarray(document["layout_m"]), result.layout)
    np.testing.assert_array_equal(pairs_to_complex(document["beta"]), result.beta)
    assert document["cost_trace"] == result.cost_trace
    assert document["config_hash"] == generator.config_hash

    baseline = load_result(paths["pi_result"])
    assert baseline["design"] == "pre_image"
    assert baseline["cost"] == result.pi_cost
    np.testing.assert_array_equal(pairs_to_complex(baseline["beta"]), 0.0)

    with open(os.path.join(str(tmpdir), "spectrum.meta.json")) as f:
        assert json.load(f)["s_th"] == dec.s_th


def test_result_json_is_reproducible(tmpdir, synthesis_run):
    result, _, _ = synthesis_run
    first = ReportGenerator({"output_dir": str(tmpdir.mkdir("a")), "run_config": {"seed": 3}})
    second = ReportGenerator({"output_dir": str(tmpdir.mkdir("b")), "run_config": {"seed": 3}})
    with open(first.write_result_json(result), "rb") as f:
        first_bytes = f.read()
    with open(second.write_result_json(result), "rb") as f:
        assert f.read() == first_bytes


def test_layout_csv(tmpdir, synthesis_run):
    result, _, _ = synthesis_run
    path = ReportGenerator({"output_dir": str(tmpdir)}).write_layout_csv(result.layout)
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("p,")
    assert len(lines) == result.layout.shape[0] + 1


def test_load_result_missing_file(tmpdir):
    with pytest.raises(FileNotFoundError, match="Result file not found"):
        load_result(os.path.join(str(tmpdir), "missing.json"))
