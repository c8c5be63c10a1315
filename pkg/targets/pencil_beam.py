#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from typing import Any, Dict, Sequence

import numpy as np

from scenario.observation import AngularGrid, ObservationDomain, nearest_sample
from scenario.scenario import Scenario
from targets.target_interface import TargetPattern

logger = logging.getLogger(__name__)

_ANGLE_TOL = 1e-9


def _direction_cosines(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.column_stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi)])


def _check_direction(obs: ObservationDomain, theta: float, phi: float) -> None:
    theta_values, phi_values = obs.row_values, obs.column_values
    if not theta_values[0] - _ANGLE_TOL <= theta <= theta_values[-1] + _ANGLE_TOL:
        raise ValueError(
            f"Target elevation {np.rad2deg(theta):.3f} deg outside grid "
            f"[{np.rad2deg(theta_values[0]):.3f}, {np.rad2deg(theta_values[-1]):.3f}] deg"
        )
    offset = (phi - phi_values[0]) % (2 * np.pi)
    near_start = 2 * np.pi - offset <= _ANGLE_TOL
    wrapped = phi_values[0] + offset
    if not near_start and wrapped > phi_values[-1] + _ANGLE_TOL:
        raise ValueError(
            f"Target azimuth {np.rad2deg(phi):.3f} deg outside grid "
            f"[{np.rad2deg(phi_values[0]):.3f}, {np.rad2deg(phi_values[-1]):.3f}] deg"
        )


def pencil_beam_target(theta_refl: float, phi_refl: float, beamwidth: float, obs: ObservationDomain,
                       amplitude: float = 1.0, polarization: Sequence[float] = (0.0, 1.0)) -> np.ndarray:
    """
    Gaussian spot in direction-cosine space.

    The spot is centred on the grid sample nearest (theta_refl, phi_refl),
    so that sample carries the peak amplitude.

    Args:
        theta_refl: Target elevation in radians
        phi_refl: Target azimuth in radians
        beamwidth: Gaussian width in direction-cosine units
        obs: Angular observation domain
        amplitude: Peak amplitude
        polarization: Transverse unit 2-vector of the field

    Returns:
        Complex field (M, 2)
    """
    if not obs.is_angular:
        raise ValueError("Pencil-beam targets need an angular observation domain")
    if beamwidth <= 0:
        raise ValueError(f"Beamwidth must be positive, got {beamwidth}")
    _check_direction(obs, theta_refl, phi_refl)

    peak = nearest_sample(obs, theta_refl, phi_refl)
    uv = obs.directions[:, :2]
    distance_sq = np.sum((uv - uv[peak]) ** 2, axis=1)
    magnitude = amplitude * np.exp(-distance_sq / beamwidth ** 2)
    return TargetPattern.polarize(magnitude, np.asarray(polarization, dtype=float))


class PencilBeamTarget(TargetPattern):
    """
    Pencil beam toward (theta_deg, phi_deg).

    Parameters: theta_deg, phi_deg, beamwidth (direction-cosine units; None
    means the aperture's diffraction width lambda / (P * cell size)),
    amplitude.
    """

    def __init__(self, name: str = "pencil", parameters: Dict[str, Any] = None):
        super().__init__(name, parameters)
        self.theta_deg = float(self.parameters.get("theta_deg", 30.0))
        self.phi_deg = float(self.parameters.get("phi_deg", -45.0))
        self.beamwidth = self.parameters.get("beamwidth")
        self.amplitude = float(self.parameters.get("amplitude", 1.0))

    def resolve_beamwidth(self, scenario: Scenario) -> float:
        if self.beamwidth is not None:
            return float(self.beamwidth)
        grid = scenario.grid
        return scenario.wave.wavelength / (max(grid.p_count, grid.q_count) * grid.cell_size_m)

    def generate(self, scenario: Scenario) -> np.ndarray:
        beamwidth = self.resolve_beamwidth(scenario)
        self.field = pencil_beam_target(
            np.deg2rad(self.theta_deg), np.deg2rad(self.phi_deg), beamwidth,
            scenario.observation, self.amplitude, scenario.basis.transverse_te(),
        )
        peak = int(np.argmax(np.abs(self.field[:, 0]) + np.abs(self.field[:, 1])))
        self.metadata = {
            "beamwidth": beamwidth,
            "peak_index": peak,
            "peak_direction_deg": [float(np.rad2deg(v)) for v in scenario.observation.sample_coordinates()[peak]],
        }
        logger.info(f"Pencil beam toward ({self.theta_deg}, {self.phi_deg}) deg, beamwidth {beamwidth:.4f}")
        return self.field

    def get_target_type(self) -> str:
        return "pencil"

    def get_description(self) -> str:
        return (f"Gaussian pencil beam toward theta={self.theta_deg} deg, phi={self.phi_deg} deg "
                f"in direction-cosine space")
