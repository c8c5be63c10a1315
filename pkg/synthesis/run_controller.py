#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Run controller for skin synthesis.

Ties the pipeline together for the command line: scenario, atom database,
target, radiation operator, SVD, alternating synthesis, metrics and report.
"""

import copy
import logging
import os
from typing import Any, Dict, Optional

import numpy as np

from analysis.field_metrics import delta_e_db, field_cut, field_magnitude, mean_power, power_improvement_map
from atomdb.atom_database import AtomDatabase, IncidenceKey
from atomdb.db_loader import AtomDatabaseLoader
from atomdb.induced_current import descriptors_to_indices, layout_currents
from forward.radiation_operator import assemble_operator
from reports.report_generator import ReportGenerator, load_result
from scenario.scenario import Scenario
from spectral.decomposition import decompose
from synthesis.layout_synthesizer import LayoutSynthesizer, SynthesisConfig
from targets.target_factory import TargetFactory

logger = logging.getLogger(__name__)

# Published improvement figures for the broadside pencil-beam benchmark, logged for comparison only
REFERENCE_P_MAX = {15: 0.38, 35: 0.28}


def hashed_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """Run configuration without the output section, as stored in results."""
    stored = copy.deepcopy(config)
    stored.pop("output", None)
    return stored


class RunController:
    """Executes one synthesis run described by a validated configuration."""

    def __init__(self, config: Dict[str, Any], workers: int = 1):
        """
        Initialize the run controller.

        Args:
            config: Validated run configuration
            workers: Threads for the numerical kernels
        """
        self.config = config
        self.workers = workers
        self.scenario = None
        self.database = None
        self.target = None

    def build_scenario(self) -> Scenario:
        self.scenario = Scenario.from_config(self.config["scenario"])
        return self.scenario

    def build_database(self, scenario: Scenario) -> AtomDatabase:
        atomdb_config = self.config["atomdb"]
        wave = scenario.wave
        loader = AtomDatabaseLoader({
            "path": atomdb_config.get("path"),
            "substrate": atomdb_config.get("substrate", "paper"),
            "step_m": atomdb_config.get("step_m", 1e-4),
            "cell_size_m": scenario.grid.cell_size_m,
            "incidence": IncidenceKey(wave.theta_inc_rad, wave.phi_inc_rad, wave.frequency_hz),
        })
        self.database = loader.load_data()
        logger.info(f"Atom database: {loader.get_metadata()}")
        return self.database

    def build_target(self, scenario: Scenario) -> np.ndarray:
        target_config = self.config["target"]
        factory = TargetFactory()
        factory.load_all_targets()
        self.target = factory.create_target(target_config["kind"], target_config)
        return self.target.generate(scenario)

    def run_synthesis(self, output_dir: str) -> Dict[str, Any]:
        """
        Run the full pipeline and write every output.

        Args:
            output_dir: Directory receiving the result files

        Returns:
            Metrics dictionary (P_max, final cost, delta E at the target, ...)
        """
        scenario = self.build_scenario()
        database = self.build_database(scenario)
        target_field = self.build_target(scenario)

        operator = assemble_operator(scenario.grid, scenario.observation, scenario.wave.k0, self.workers)
        synthesis_config = SynthesisConfig.from_dict(self.config["synthesis"], seed=self.config["seed"])
        decomposition = decompose(operator, synthesis_config.eta_svd)

        synthesizer = LayoutSynthesizer(synthesis_config, workers=self.workers)
        result = synthesizer.synthesize(scenario, database, target_field, operator, decomposition)

        obs = scenario.observation
        power_map = power_improvement_map(result.field_opt, result.field_pi, obs)
        target_sample = int(np.argmax(field_magnitude(result.target_field)))
        metrics = {
            "p_max": power_map.peak_value,
            "p_max_index": power_map.peak_index,
            "p_max_location": list(power_map.peak_location_deg() if obs.is_angular else power_map.peak_location),
            "target_index": target_sample,
            "phi_final": result.final_cost,
            "phi_pre_image": result.pi_cost,
            "delta_e_db": delta_e_db(result.field_opt, result.field_pi, target_sample),
            "s_th": result.s_th,
            "termination_reason": result.termination_reason,
        }
        if obs.is_angular:
            metrics.update(self._cut_metrics(result, obs))
        if self.config["target"]["kind"] == "contour":
            inside = self.target.inside_mask(obs)
            metrics["inside_power_opt"] = mean_power(result.field_opt, inside)
            metrics["inside_power_pi"] = mean_power(result.field_pi, inside)
        self._log_reference(metrics)

        generator = ReportGenerator({"output_dir": output_dir, "run_config": hashed_config(self.config)})
        metrics["paths"] = generator.generate_report(result, decomposition, obs, power_map, {
            key: value for key, value in metrics.items() if key != "paths"
        })
        return metrics

    def _cut_metrics(self, result, obs) -> Dict[str, Any]:
        phi_cut = np.deg2rad(self.config["target"].get("phi_deg", 0.0)) \
            if self.config["target"]["kind"] == "pencil" else 0.0
        try:
            cut = field_cut(result.field_opt, obs, phi_cut)
        except ValueError as e:
            logger.warning(f"Skipping field cut: {e}")
            return {}
        theta_peak = max(cut, key=lambda point: point[1])[0]
        return {"cut_phi_deg": float(np.rad2deg(phi_cut)), "cut_peak_theta_deg": float(np.rad2deg(theta_peak))}

    def _log_reference(self, metrics: Dict[str, Any]) -> None:
        grid = self.config["scenario"]["grid"]
        reference = REFERENCE_P_MAX.get(grid["p"]) if grid["p"] == grid["q"] else None
        note = f" (published figure at this aperture: {reference:.0%})" if reference is not None else ""
        logger.info(f"P_max = {metrics['p_max']:.2%}{note}")
        logger.info(f"Delta E at target = {metrics['delta_e_db']:.3f} dB (published figure at 15x15: about 1.4 dB)")
        logger.info(f"Final cost {metrics['phi_final']:.6e}, pre-image layout cost {metrics['phi_pre_image']:.6e}")
        if "inside_power_opt" in metrics:
            logger.info(
                f"Mean power inside the footprint: {metrics['inside_power_opt']:.4e} (optimized) vs "
                f"{metrics['inside_power_pi']:.4e} (pre-image layout)"
            )


def layout_field(config: Dict[str, Any], layout_m: Any, workers: int = 1):
    """Recompute the field radiated by a stored layout; returns (scenario, field)."""
    controller = RunController(config, workers)
    scenario = controller.build_scenario()
    database = controller.build_database(scenario)
    indices = descriptors_to_indices(np.asarray(layout_m, dtype=float), database)
    currents = layout_currents(indices, database, scenario.wave, scenario.basis, scenario.grid.centers())
    operator = assemble_operator(scenario.grid, scenario.observation, scenario.wave.k0, workers)
    return scenario, operator.radiate(currents)


def analyze_result(result_path: str, output_dir: str, reference_path: Optional[str] = None,
                   workers: int = 1) -> Dict[str, Any]:
    """
    Recompute maps and metrics from a stored result.

    Without a reference the optimized layout is compared with the stored
    pre-image layout; otherwise with the reference result's optimized layout,
    e.g. a design on another substrate.

    Args:
        result_path: result.json of the design under test
        output_dir: Directory receiving the maps
        reference_path: Optional result.json of the reference design
        workers: Threads for operator assembly

    Returns:
        Metrics dictionary
    """
    document = load_result(result_path)
    config = document["config"]
    scenario, field = layout_field(config, document["layout_m"], workers)

    if reference_path is None:
        if "pi_layout_m" not in document:
            raise KeyError(f"{result_path} holds no pre-image layout; pass a reference result")
        _, reference_field = layout_field(config, document["pi_layout_m"], workers)
        reference_label = "pre_image"
    else:
        reference = load_result(reference_path)
        reference_scenario, reference_field = layout_field(reference["config"], reference["layout_m"], workers)
        if reference_scenario.observation.sample_count != scenario.observation.sample_count:
            raise ValueError("Result and reference use different observation domains")
        reference_label = os.path.basename(os.path.dirname(os.path.abspath(reference_path))) or reference_path

    obs = scenario.observation
    power_map = power_improvement_map(field, reference_field, obs)
    reference_peak = int(np.argmax(field_magnitude(reference_field)))
    metrics = {
        "reference": reference_label,
        "p_max": power_map.peak_value,
        "p_max_index": power_map.peak_index,
        "delta_e_db_at_reference_peak": delta_e_db(field, reference_field, reference_peak),
    }

    generator = ReportGenerator({"output_dir": output_dir, "run_config": config})
    generator.write_field_map(field, obs, "field_design")
    generator.write_field_map(reference_field, obs, "field_reference")
    generator.write_power_map(power_map, obs, "power_improvement", metrics)
    logger.info(f"Analysis against {reference_label}: P_max {power_map.peak_value:.2%}")
    return metrics
