#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Equivalent surface currents induced on the skin by the incident wave.

Each atom reflects the local incident field through its diagonal TE/TM
reflection matrix. The reflected field is turned into electric and magnetic
equivalent currents on the skin plane, which are then folded into one
transverse current J = z x [zeta0 z x J^e + J^m].
"""

import logging
from typing import Sequence

import numpy as np

from atomdb.atom_database import AtomDatabase
from scenario.incident_wave import FREE_SPACE_IMPEDANCE, IncidentWave, PolarizationBasis

logger = logging.getLogger(__name__)

_Z_HAT = np.array([0.0, 0.0, 1.0])


def reflected_direction(k_inc: np.ndarray) -> np.ndarray:
    """Unit vector of the specularly reflected wave."""
    k_hat = np.asarray(k_inc, dtype=float) / np.linalg.norm(k_inc)
    return np.array([k_hat[0], k_hat[1], -k_hat[2]])


def currents_from_reflection(gamma_te: np.ndarray, gamma_tm: np.ndarray,
                             wave: IncidentWave, basis: PolarizationBasis) -> np.ndarray:
    """
    Transverse currents at the origin for arrays of reflection coefficients.

    Args:
        gamma_te: TE coefficients, shape (E,)
        gamma_tm: TM coefficients, shape (E,)
        wave: Incident wave
        basis: Polarization basis of the wave

    Returns:
        Complex (E, 2) array of (x, y) current components
    """
    gamma_te = np.atleast_1d(np.asarray(gamma_te, dtype=complex))
    gamma_tm = np.atleast_1d(np.asarray(gamma_tm, dtype=complex))
    reflected = (
        (gamma_te * wave.e_te)[:, None] * basis.e_te_hat[None, :]
        + (gamma_tm * wave.e_tm)[:, None] * basis.e_tm_hat[None, :]
    )
    k_refl = reflected_direction(wave.wave_vector)

    j_electric = np.cross(_Z_HAT, np.cross(k_refl, reflected)) / FREE_SPACE_IMPEDANCE
    j_magnetic = -np.cross(_Z_HAT, reflected)
    total = np.cross(_Z_HAT, FREE_SPACE_IMPEDANCE * np.cross(_Z_HAT, j_electric) + j_magnetic)
    return total[:, :2]


def entry_currents(db: AtomDatabase, wave: IncidentWave, basis: PolarizationBasis) -> np.ndarray:
    """Current of every database entry at the origin, shape (E, 2)."""
    return currents_from_reflection(db.gamma_te, db.gamma_tm, wave, basis)


def incident_phase(wave: IncidentWave, centers: np.ndarray) -> np.ndarray:
    """Phase factor exp(-j k_inc . r) at each atom centre, shape (N,)."""
    return np.exp(-1j * (np.asarray(centers, dtype=float) @ wave.wave_vector))


def induced_current(d: float, db: AtomDatabase, wave: IncidentWave,
                    basis: PolarizationBasis, r_pq: Sequence[float]) -> np.ndarray:
    """
    Current induced at one atom.

    Args:
        d: Patch side, must be stored in the database
        db: Atom database
        wave: Incident wave
        basis: Polarization basis
        r_pq: Atom centre

    Returns:
        Complex 2-vector (x, y)

    Raises:
        DescriptorLookupError: If d is not in the database
    """
    reflection = db.lookup(d)
    current = currents_from_reflection(reflection.gamma_te, reflection.gamma_tm, wave, basis)[0]
    return current * incident_phase(wave, np.asarray(r_pq, dtype=float)[None, :])[0]


def layout_currents(indices: np.ndarray, db: AtomDatabase, wave: IncidentWave,
                    basis: PolarizationBasis, centers: np.ndarray) -> np.ndarray:
    """
    Currents of a whole layout given as database indices.

    Args:
        indices: Database entry index per atom, shape (N,)
        db: Atom database
        wave: Incident wave
        basis: Polarization basis
        centers: Atom centres, shape (N, 3)

    Returns:
        Complex (N, 2) current vector
    """
    per_entry = entry_currents(db, wave, basis)
    return incident_phase(wave, centers)[:, None] * per_entry[np.asarray(indices, dtype=int)]


def descriptors_to_indices(descriptors: np.ndarray, db: AtomDatabase) -> np.ndarray:
    """Map a layout of descriptors to database indices."""
    flat = np.asarray(descriptors, dtype=float).ravel()
    return np.array([db.index_of(d) for d in flat], dtype=int)
