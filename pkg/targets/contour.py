#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json
import logging
import os
from typing import Any, Dict, List, Sequence

import numpy as np
from matplotlib.path import Path

from scenario.observation import ObservationDomain
from scenario.scenario import Scenario
from targets.target_interface import TargetPattern

logger = logging.getLogger(__name__)


def load_polygons(path: str) -> List[np.ndarray]:
    """Read a JSON list of polygons, each a list of [x_m, y_m] vertices."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Polygon file not found: {path}")
    with open(path, 'r') as f:
        polygons = json.load(f)
    if not isinstance(polygons, list):
        raise ValueError(f"Polygon file {path} must hold a list of polygons")
    return [validate_polygon(polygon) for polygon in polygons]


def _segments_cross(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> bool:
    def orientation(p, q, r):
        return np.sign((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    return (orientation(a, b, c) * orientation(a, b, d) < 0
            and orientation(c, d, a) * orientation(c, d, b) < 0)


def validate_polygon(polygon: Sequence[Sequence[float]]) -> np.ndarray:
    """
    Check a polygon and return its vertices as an (K, 2) array.

    Raises:
        ValueError: On fewer than 3 vertices, zero area or self-intersection
    """
    vertices = np.asarray(polygon, dtype=float)
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise ValueError("Polygon vertices must be [x_m, y_m] pairs")
    if len(vertices) > 3 and np.array_equal(vertices[0], vertices[-1]):
        vertices = vertices[:-1]
    if len(vertices) < 3:
        raise ValueError(f"Degenerate polygon with {len(vertices)} vertices")

    count = len(vertices)
    for i in range(count):
        for j in range(i + 2, count):
            if i == 0 and j == count - 1:
                continue
            if _segments_cross(vertices[i], vertices[(i + 1) % count], vertices[j], vertices[(j + 1) % count]):
                raise ValueError(f"Polygon is self-intersecting (edges {i} and {j})")

    x, y = vertices[:, 0], vertices[:, 1]
    area = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
    if area == 0:
        raise ValueError("Degenerate polygon with zero area")
    return vertices


def boundary_distance(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    """Distance from each point (M, 2) to the polygon boundary."""
    start = vertices
    edge = np.roll(vertices, -1, axis=0) - vertices
    relative = points[:, None, :] - start[None, :, :]
    length_sq = np.sum(edge ** 2, axis=1)
    t = np.clip(np.sum(relative * edge[None, :, :], axis=2) / length_sq[None, :], 0.0, 1.0)
    closest = start[None, :, :] + t[:, :, None] * edge[None, :, :]
    return np.min(np.linalg.norm(points[:, None, :] - closest, axis=2), axis=1)


def polygon_weight(points: np.ndarray, vertices: np.ndarray, smoothing_m: float) -> np.ndarray:
    """
    Membership weight in [0, 1] of each point for one polygon.

    The weight ramps linearly across a band of width smoothing_m centred on
    the boundary; without smoothing it is the plain inside test.
    """
    inside = Path(vertices).contains_points(points)
    if smoothing_m <= 0:
        return inside.astype(float)
    signed = np.where(inside, 1.0, -1.0) * boundary_distance(points, vertices)
    return np.clip(0.5 + signed / smoothing_m, 0.0, 1.0)


def contour_mask(polygons: Sequence[np.ndarray], points: np.ndarray, inside: float = 1.0,
                 outside: float = 0.0, smoothing_m: float = 0.0) -> np.ndarray:
    """Amplitude per point: inside value within any polygon, outside value elsewhere."""
    if not polygons:
        raise ValueError("Contour target needs at least one polygon")
    weight = np.max([polygon_weight(points, vertices, smoothing_m) for vertices in polygons], axis=0)
    return outside + (inside - outside) * weight


def inside_polygons(polygons: Sequence[np.ndarray], obs: ObservationDomain) -> np.ndarray:
    """Boolean mask of the floor samples lying inside any polygon."""
    points = obs.sample_coordinates()[:, ::-1]
    return contour_mask(polygons, points) > 0.5


def contour_target(polygons: Sequence[Sequence[Sequence[float]]], obs: ObservationDomain,
                   inside: float = 1.0, outside: float = 0.0, smoothing_m: float = 0.0,
                   polarization: Sequence[float] = (0.0, 1.0)) -> np.ndarray:
    """
    Coverage mask on a floor plane.

    Args:
        polygons: Polygons in floor coordinates (x along the facade, y away from it)
        obs: Floor observation domain
        inside: Amplitude inside the covered area
        outside: Amplitude elsewhere
        smoothing_m: Width of the linear edge ramp
        polarization: Transverse unit 2-vector of the field

    Returns:
        Complex field (M, 2)
    """
    if obs.is_angular:
        raise ValueError("Contour targets need a floor observation domain")
    if inside < 0 or outside < 0:
        raise ValueError("Contour amplitudes must be non-negative")
    vertices = [validate_polygon(polygon) for polygon in polygons]
    # Floor samples are stored as (distance, along-facade); polygons use (x, y)
    points = obs.sample_coordinates()[:, ::-1]
    magnitude = contour_mask(vertices, points, inside, outside, smoothing_m)
    return TargetPattern.polarize(magnitude, np.asarray(polarization, dtype=float))


class ContourTarget(TargetPattern):
    """
    Contoured floor footprint.

    Parameters: polygons or polygons_path, inside, outside, smoothing_m.
    """

    def __init__(self, name: str = "contour", parameters: Dict[str, Any] = None):
        super().__init__(name, parameters)
        self.inside = float(self.parameters.get("inside", 1.0))
        self.outside = float(self.parameters.get("outside", 0.0))
        self.smoothing_m = float(self.parameters.get("smoothing_m", 0.0))
        polygons = self.parameters.get("polygons")
        if polygons is None and self.parameters.get("polygons_path"):
            polygons = load_polygons(self.parameters["polygons_path"])
        if not polygons:
            raise ValueError("Contour target needs 'polygons' or 'polygons_path'")
        self.polygons = [validate_polygon(polygon) for polygon in polygons]

    def generate(self, scenario: Scenario) -> np.ndarray:
        self.field = contour_target(self.polygons, scenario.observation, self.inside, self.outside,
                                    self.smoothing_m, scenario.basis.transverse_te())
        covered = float(np.mean(np.linalg.norm(self.field, axis=1) > self.outside + 1e-12))
        self.metadata = {"polygons": len(self.polygons), "covered_fraction": covered}
        logger.info(f"Contour target with {len(self.polygons)} polygons covers {covered:.1%} of the floor")
        return self.field

    def inside_mask(self, obs: ObservationDomain) -> np.ndarray:
        return inside_polygons(self.polygons, obs)

    def get_target_type(self) -> str:
        return "contour"

    def get_description(self) -> str:
        return f"Contoured footprint over {len(self.polygons)} polygons on the floor plane"
