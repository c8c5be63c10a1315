#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from atomdb.atom_database import AtomDatabase
from atomdb.induced_current import entry_currents, incident_phase
from scenario.ems_grid import EmsGrid
from scenario.incident_wave import IncidentWave, PolarizationBasis

logger = logging.getLogger(__name__)

ATOM_CHUNK = 1024


def ems_update_indices(db: AtomDatabase, j_tilde: np.ndarray, wave: IncidentWave,
                       basis: PolarizationBasis, grid: EmsGrid, workers: int = 1) -> np.ndarray:
    """
    Best database entry per atom.

    The cost separates over atoms, so every atom independently takes the
    entry whose current is closest to its reference current. np.argmin keeps
    the first minimum, which is the smallest descriptor.

    Args:
        db: Atom database
        j_tilde: Reference current (N, 2)
        wave: Incident wave
        basis: Polarization basis
        grid: Skin lattice
        workers: Threads used for atom chunks

    Returns:
        Database index per atom, shape (N,)
    """
    j_tilde = np.asarray(j_tilde, dtype=complex)
    if j_tilde.shape != (grid.atom_count, 2):
        raise ValueError(f"Reference current must have shape ({grid.atom_count}, 2), got {j_tilde.shape}")

    per_entry = entry_currents(db, wave, basis)
    phase = incident_phase(wave, grid.centers())
    indices = np.empty(grid.atom_count, dtype=int)
    starts = list(range(0, grid.atom_count, ATOM_CHUNK))

    def search(start: int) -> None:
        stop = min(start + ATOM_CHUNK, grid.atom_count)
        candidates = phase[start:stop, None, None] * per_entry[None, :, :]
        mismatch = np.sum(np.abs(candidates - j_tilde[start:stop, None, :]) ** 2, axis=2)
        indices[start:stop] = np.argmin(mismatch, axis=1)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            list(executor.map(search, starts))
    else:
        for start in starts:
            search(start)
    return indices


def ems_update(db: AtomDatabase, j_tilde: np.ndarray, wave: IncidentWave,
               basis: PolarizationBasis, grid: EmsGrid, workers: int = 1) -> np.ndarray:
    """Layout (P, Q) of descriptors best matching j_tilde atom by atom."""
    indices = ems_update_indices(db, j_tilde, wave, basis, grid, workers)
    return db.descriptors[indices].reshape(grid.shape)
