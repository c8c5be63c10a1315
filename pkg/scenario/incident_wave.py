#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

logger = logging.getLogger(__name__)

SPEED_OF_LIGHT = 299792458.0
FREE_SPACE_IMPEDANCE = 376.730313668


@dataclass(frozen=True)
class IncidentWave:
    """
    Plane wave illuminating the skin.

    Angles are in radians. The wave travels toward the skin, so its wave
    vector points into the half-space z < 0.
    """
    frequency_hz: float
    theta_inc_rad: float = 0.0
    phi_inc_rad: float = 0.0
    e_te: complex = 1.0 + 0.0j
    e_tm: complex = 0.0 + 0.0j

    def __post_init__(self):
        if not np.isfinite(self.frequency_hz) or self.frequency_hz <= 0:
            raise ValueError(f"Frequency must be positive, got {self.frequency_hz}")
        if not 0.0 <= self.theta_inc_rad < np.pi / 2:
            raise ValueError(f"Incidence angle must lie in [0, pi/2), got {self.theta_inc_rad}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def k0(self) -> float:
        return 2.0 * np.pi * self.frequency_hz / SPEED_OF_LIGHT

    @property
    def wave_vector(self) -> np.ndarray:
        return wave_vector(self.theta_inc_rad, self.phi_inc_rad, self.k0)


@dataclass(frozen=True)
class PolarizationBasis:
    """TE/TM unit vectors of an incident wave."""
    e_te_hat: np.ndarray
    e_tm_hat: np.ndarray

    def transverse_te(self) -> np.ndarray:
        """Unit 2-vector along the in-plane part of the TE direction."""
        te = self.e_te_hat[:2]
        return te / np.linalg.norm(te)


def wave_vector(theta_inc: float, phi_inc: float, k0: float) -> np.ndarray:
    """
    Incident wave vector for a wave arriving from direction (theta, phi).

    Args:
        theta_inc: Polar angle of arrival in radians
        phi_inc: Azimuth of arrival in radians
        k0: Free-space wavenumber

    Returns:
        Real 3-vector of norm k0 with negative z component
    """
    direction = np.array([
        np.sin(theta_inc) * np.cos(phi_inc),
        np.sin(theta_inc) * np.sin(phi_inc),
        np.cos(theta_inc),
    ])
    return -k0 * direction


def polarization_basis(k_inc: np.ndarray) -> PolarizationBasis:
    """
    Build the TE/TM basis for an incident wave vector.

    TE is normal to the plane of incidence. At normal incidence the plane of
    incidence is undefined and TE is taken along y; TM follows the limit of
    its general formula so the basis stays continuous along phi = 0.

    Args:
        k_inc: Incident wave vector

    Returns:
        PolarizationBasis with both unit vectors orthogonal to k_inc
    """
    k_inc = np.asarray(k_inc, dtype=float)
    norm = np.linalg.norm(k_inc)
    if norm == 0:
        raise ValueError("Wave vector must be non-zero")
    k_hat = k_inc / norm
    z_hat = np.array([0.0, 0.0, 1.0])

    te = np.cross(k_hat, z_hat)
    te_norm = np.linalg.norm(te)
    if te_norm < 1e-12:
        te = np.array([0.0, 1.0, 0.0])
    else:
        te = te / te_norm

    tm = np.cross(te, k_hat)
    tm = tm / np.linalg.norm(tm)

    te.setflags(write=False)
    tm.setflags(write=False)
    return PolarizationBasis(e_te_hat=te, e_tm_hat=tm)


def incident_field_at(wave: IncidentWave, basis: PolarizationBasis,
                      r: Union[np.ndarray, list]) -> np.ndarray:
    """
    Evaluate the incident electric field at one or several points.

    Args:
        wave: Incident plane wave
        basis: Polarization basis of the wave
        r: Point (3,) or points (N, 3) in metres

    Returns:
        Complex field (3,) or (N, 3)
    """
    r = np.asarray(r, dtype=float)
    polarization = wave.e_te * basis.e_te_hat + wave.e_tm * basis.e_tm_hat
    phase = np.exp(-1j * (r @ wave.wave_vector))
    if r.ndim == 1:
        return phase * polarization
    return phase[:, None] * polarization[None, :]
