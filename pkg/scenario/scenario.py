#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from scenario.ems_grid import EmsGrid
from scenario.incident_wave import IncidentWave, PolarizationBasis, polarization_basis
from scenario.observation import AngularGrid, FloorPlane, ObservationDomain, build_observation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Scenario:
    """Incident wave, skin lattice and observation domain of one synthesis problem."""
    wave: IncidentWave
    grid: EmsGrid
    observation: ObservationDomain

    @property
    def basis(self) -> PolarizationBasis:
        return polarization_basis(self.wave.wave_vector)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "Scenario":
        """
        Build a scenario from the validated ``scenario`` config section.

        Angles in the config are in degrees; cell_size_m = None means half a
        wavelength.

        Args:
            config: Scenario section of a run configuration

        Returns:
            Scenario instance
        """
        incidence = config.get("incidence", {})
        wave = IncidentWave(
            frequency_hz=float(config["frequency_hz"]),
            theta_inc_rad=np.deg2rad(incidence.get("theta_deg", 0.0)),
            phi_inc_rad=np.deg2rad(incidence.get("phi_deg", 0.0)),
            e_te=complex(*incidence.get("e_te", [1.0, 0.0])),
            e_tm=complex(*incidence.get("e_tm", [0.0, 0.0])),
        )

        grid_config = config["grid"]
        cell_size = grid_config.get("cell_size_m")
        if cell_size is None:
            cell_size = wave.wavelength / 2.0
        grid = EmsGrid(
            p_count=int(grid_config["p"]),
            q_count=int(grid_config["q"]),
            cell_size_m=float(cell_size),
            center_height_m=float(grid_config.get("center_height_m", 0.0)),
        )

        observation = build_observation(observation_spec_from_config(config["observation"], grid.center_height_m))
        logger.info(
            f"Scenario: f={wave.frequency_hz:.4g} Hz, grid {grid.p_count}x{grid.q_count}, "
            f"cell {grid.cell_size_m:.6g} m, {observation.sample_count} samples"
        )
        return cls(wave=wave, grid=grid, observation=observation)


def observation_spec_from_config(config: Dict[str, Any], center_height_m: float = 0.0):
    """
    Translate an ``observation`` config section into an AngularGrid or FloorPlane.

    The floor lies center_height_m below the skin centre.
    """
    kind = config.get("kind", "angular")
    if kind == "angular":
        return AngularGrid(
            theta_range_rad=tuple(np.deg2rad(config["theta_deg"])),
            phi_range_rad=tuple(np.deg2rad(config["phi_deg"])),
            theta_count=int(config["theta_count"]),
            phi_count=int(config["phi_count"]),
        )
    elif kind == "floor":
        return FloorPlane(
            x_range_m=tuple(config["x_m"]),
            y_range_m=tuple(config["y_m"]),
            x_count=int(config["x_count"]),
            y_count=int(config["y_count"]),
            floor_height_m=float(center_height_m),
        )
    else:
        raise ValueError(f"Unknown observation kind: {kind}")
