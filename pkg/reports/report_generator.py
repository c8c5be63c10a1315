#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json
import logging
import os
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from analysis.field_metrics import PowerMap, field_magnitude, map_frame
from config.config_loader import config_hash
from scenario.observation import ObservationDomain
from spectral.decomposition import SpectralDecomposition, spectrum_frame
from synthesis.layout_synthesizer import SynthesisResult

logger = logging.getLogger(__name__)

MAP_FLOAT_FORMAT = "%.15g"


def complex_pairs(values: np.ndarray) -> list:
    """Complex array as nested [re, im] lists."""
    values = np.asarray(values, dtype=complex)
    return np.stack([values.real, values.imag], axis=-1).tolist()


def pairs_to_complex(pairs: list) -> np.ndarray:
    array = np.asarray(pairs, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def _domain_description(obs: ObservationDomain) -> Dict[str, Any]:
    if obs.is_angular:
        return {
            "kind": "angular",
            "rows": "theta_rad",
            "columns": "phi_rad",
            "theta_rad": [float(obs.row_values[0]), float(obs.row_values[-1]), len(obs.row_values)],
            "phi_rad": [float(obs.column_values[0]), float(obs.column_values[-1]), len(obs.column_values)],
        }
    return {
        "kind": "floor",
        "rows": "y_m",
        "columns": "x_m",
        "y_m": [float(obs.row_values[0]), float(obs.row_values[-1]), len(obs.row_values)],
        "x_m": [float(obs.column_values[0]), float(obs.column_values[-1]), len(obs.column_values)],
        "floor_height_m": obs.kind.floor_height_m,
    }


class ReportGenerator:
    """
    Writes synthesis outputs: result JSON, layout and spectrum CSV, field maps.

    Every JSON document carries the hash of the run configuration. No
    timestamps are written, so identical runs give identical files.
    """

    def __init__(self, config: Dict[str, Any] = None):
        """
        Initialize the report generator.

        Args:
            config: ``output_dir`` plus the validated run configuration under
                ``run_config`` (used for hashing)
        """
        self.config = config or {}
        self.output_dir = self.config.get("output_dir", "output")
        self.run_config = self.config.get("run_config", {})
        self.config_hash = config_hash(self.run_config)
        os.makedirs(self.output_dir, exist_ok=True)

    def _path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def _write_json(self, filename: str, document: Dict[str, Any]) -> str:
        path = self._path(filename)
        with open(path, 'w') as f:
            json.dump(document, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"Wrote {path}")
        return path

    def write_result_json(self, result: SynthesisResult, filename: str = "result.json",
                          baseline: bool = False) -> str:
        """
        Write a synthesis result.

        Args:
            result: Synthesis result
            filename: Output file name
            baseline: Write the pre-image layout with zero coefficients instead

        Returns:
            Path to the JSON file
        """
        if baseline:
            document = {
                "design": "pre_image",
                "layout_m": result.pi_layout.tolist(),
                "beta": complex_pairs(np.zeros_like(result.beta)),
                "cost": result.pi_cost,
            }
        else:
            document = {
                "design": "optimized",
                "layout_m": result.layout.tolist(),
                "pi_layout_m": result.pi_layout.tolist(),
                "beta": complex_pairs(result.beta),
                "cost": result.final_cost,
                "cost_trace": result.cost_trace,
            }
        document.update({
            "summary": result.summary(),
            "config": self.run_config,
            "config_hash": self.config_hash,
        })
        return self._write_json(filename, document)

    def write_layout_csv(self, layout: np.ndarray, filename: str = "layout.csv") -> str:
        """Descriptor per atom, one row per p, columns q."""
        path = self._path(filename)
        frame = pd.DataFrame(np.asarray(layout, dtype=float))
        frame.index.name = "p"
        frame.to_csv(path, float_format="%.17g")
        logger.info(f"Wrote {path}")
        return path

    def write_spectrum_csv(self, dec: SpectralDecomposition, filename: str = "spectrum.csv") -> str:
        path = self._path(filename)
        spectrum_frame(dec).to_csv(path, index=False, float_format=MAP_FLOAT_FORMAT)
        self._write_json(os.path.splitext(filename)[0] + ".meta.json", {
            "s_th": dec.s_th,
            "eta_svd": dec.eta_svd,
            "rank_bound": dec.rank_bound,
            "config_hash": self.config_hash,
        })
        logger.info(f"Wrote {path}")
        return path

    def write_map(self, values: np.ndarray, obs: ObservationDomain, name: str,
                  extra: Optional[Dict[str, Any]] = None) -> str:
        """
        Write a real-valued map as CSV with a JSON sidecar.

        Args:
            values: Value per sample (M,)
            obs: Observation domain of the samples
            name: Base file name without extension
            extra: Additional sidecar entries

        Returns:
            Path to the CSV file
        """
        path = self._path(f"{name}.csv")
        map_frame(values, obs).to_csv(path, float_format=MAP_FLOAT_FORMAT)
        self._write_json(f"{name}.meta.json", {
            "domain": _domain_description(obs),
            "config_hash": self.config_hash,
            **(extra or {}),
        })
        return path

    def write_field_map(self, field: np.ndarray, obs: ObservationDomain, name: str) -> str:
        magnitude = field_magnitude(field)
        peak = int(np.argmax(magnitude))
        return self.write_map(magnitude, obs, name, {
            "quantity": "field_magnitude",
            "peak_value": float(magnitude[peak]),
            "peak_location": [float(v) for v in obs.sample_coordinates()[peak]],
        })

    def write_power_map(self, power_map: PowerMap, obs: ObservationDomain, name: str = "power_improvement",
                        extra: Optional[Dict[str, Any]] = None) -> str:
        return self.write_map(power_map.values, obs, name, {
            "quantity": "power_improvement",
            "p_max": power_map.peak_value,
            "peak_index": power_map.peak_index,
            "peak_location": list(power_map.peak_location) if power_map.peak_location else None,
            **(extra or {}),
        })

    def generate_report(self, result: SynthesisResult, dec: SpectralDecomposition, obs: ObservationDomain,
                        power_map: PowerMap, metrics: Dict[str, Any]) -> Dict[str, str]:
        """
        Write every output of a synthesis run.

        Returns:
            Mapping of output kind to path
        """
        paths = {
            "result": self.write_result_json(result, "result.json"),
            "pi_result": self.write_result_json(result, "pi_result.json", baseline=True),
            "layout": self.write_layout_csv(result.layout, "layout.csv"),
            "pi_layout": self.write_layout_csv(result.pi_layout, "pi_layout.csv"),
            "spectrum": self.write_spectrum_csv(dec),
            "field_opt": self.write_field_map(result.field_opt, obs, "field_opt"),
            "field_pi": self.write_field_map(result.field_pi, obs, "field_pi"),
            "field_target": self.write_field_map(result.target_field, obs, "field_target"),
            "power_improvement": self.write_power_map(power_map, obs, "power_improvement", metrics),
        }
        self._write_json("metrics.json", {**metrics, "config_hash": self.config_hash})
        logger.info(f"Generated report in {self.output_dir}")
        return paths


def read_map(path: str) -> pd.DataFrame:
    """Read a map CSV back; column labels become floats."""
    frame = pd.read_csv(path, index_col=0, float_precision="round_trip")
    frame.columns = frame.columns.astype(float)
    return frame


def load_result(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"Result file not found: {path}")
    with open(path, 'r') as f:
        return json.load(f)
