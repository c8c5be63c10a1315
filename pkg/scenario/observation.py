#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class AngularGrid:
    """Far-field directions on a (theta, phi) grid, endpoints inclusive."""
    theta_range_rad: Tuple[float, float]
    phi_range_rad: Tuple[float, float]
    theta_count: int
    phi_count: int


@dataclass(frozen=True)
class FloorPlane:
    """
    Rectangle on the floor in front of a facade-mounted skin.

    x runs along the facade, y is the distance from the facade. The floor
    lies floor_height_m below the skin centre.
    """
    x_range_m: Tuple[float, float]
    y_range_m: Tuple[float, float]
    x_count: int
    y_count: int
    floor_height_m: float


@dataclass(frozen=True)
class ObservationDomain:
    """
    Sampled observation domain.

    Samples are ordered row-major: rows run over theta (or floor y), columns
    over phi (or floor x).
    """
    kind: Union[AngularGrid, FloorPlane]
    positions: np.ndarray
    distances: np.ndarray
    directions: np.ndarray
    row_values: np.ndarray
    column_values: np.ndarray
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def sample_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.row_values), len(self.column_values))

    @property
    def is_angular(self) -> bool:
        return isinstance(self.kind, AngularGrid)

    def sample_coordinates(self) -> np.ndarray:
        """(M, 2) array of (row value, column value) per sample."""
        rows, cols = np.meshgrid(self.row_values, self.column_values, indexing="ij")
        return np.column_stack([rows.ravel(), cols.ravel()])


def _axis(bounds: Tuple[float, float], count: int, label: str) -> np.ndarray:
    if count < 1:
        raise ValueError(f"{label} count must be at least 1, got {count}")
    start, stop = float(bounds[0]), float(bounds[1])
    if stop < start:
        raise ValueError(f"{label} range is empty: [{start}, {stop}]")
    if count == 1:
        return np.array([start])
    return np.linspace(start, stop, count)


def _freeze(*arrays: np.ndarray) -> None:
    for array in arrays:
        array.setflags(write=False)


def build_observation(spec: Union[AngularGrid, FloorPlane]) -> ObservationDomain:
    """
    Sample an observation domain.

    Args:
        spec: AngularGrid or FloorPlane description

    Returns:
        ObservationDomain with positions, distances and unit directions
    """
    if isinstance(spec, AngularGrid):
        return _build_angular(spec)
    elif isinstance(spec, FloorPlane):
        return _build_floor(spec)
    else:
        raise ValueError(f"Unknown observation domain type: {type(spec).__name__}")


def _build_angular(spec: AngularGrid) -> ObservationDomain:
    theta = _axis(spec.theta_range_rad, spec.theta_count, "theta")
    phi = _axis(spec.phi_range_rad, spec.phi_count, "phi")
    if theta[0] < -_ANGLE_TOL or theta[-1] > np.pi / 2 + _ANGLE_TOL:
        raise ValueError(
            f"Angular grid theta must lie in [0, pi/2], got [{theta[0]}, {theta[-1]}]"
        )

    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    directions = np.column_stack([
        np.sin(tt) * np.cos(pp),
        np.sin(tt) * np.sin(pp),
        np.cos(tt),
    ])
    # Far-field normalization: every sample sits on the unit sphere
    distances = np.ones(len(tt))
    positions = directions.copy()
    _freeze(positions, distances, directions, theta, phi)

    logger.debug(f"Built angular grid with {len(tt)} samples")
    return ObservationDomain(
        kind=spec,
        positions=positions,
        distances=distances,
        directions=directions,
        row_values=theta,
        column_values=phi,
    )


def _build_floor(spec: FloorPlane) -> ObservationDomain:
    if spec.floor_height_m <= 0:
        raise ValueError(f"Floor height must be positive, got {spec.floor_height_m}")
    x = _axis(spec.x_range_m, spec.x_count, "floor x")
    y = _axis(spec.y_range_m, spec.y_count, "floor y")
    if y[0] <= 0:
        raise ValueError(f"Floor distances from the facade must be positive, got {y[0]}")

    yy, xx = np.meshgrid(y, x, indexing="ij")
    yy, xx = yy.ravel(), xx.ravel()
    # Local frame of the skin: z is the facade normal, y points up
    positions = np.column_stack([xx, np.full(len(xx), -spec.floor_height_m), yy])
    distances = np.linalg.norm(positions, axis=1)
    directions = positions / distances[:, None]
    _freeze(positions, distances, directions, x, y)

    logger.debug(f"Built floor plane with {len(xx)} samples")
    return ObservationDomain(
        kind=spec,
        positions=positions,
        distances=distances,
        directions=directions,
        row_values=y,
        column_values=x,
    )


def nearest_sample(obs: ObservationDomain, row_value: float, column_value: float) -> int:
    """
    Index of the sample nearest to a (theta, phi) direction or floor point.

    Angular grids compare unit directions; floor planes compare positions.
    """
    if obs.is_angular:
        target = np.array([
            np.sin(row_value) * np.cos(column_value),
            np.sin(row_value) * np.sin(column_value),
            np.cos(row_value),
        ])
        return int(np.argmax(obs.directions @ target))
    coords = obs.sample_coordinates()
    distance = (coords[:, 0] - row_value) ** 2 + (coords[:, 1] - column_value) ** 2
    return int(np.argmin(distance))
