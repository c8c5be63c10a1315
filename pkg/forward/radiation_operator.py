#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from scenario.ems_grid import EmsGrid
from scenario.observation import ObservationDomain

logger = logging.getLogger(__name__)

ROW_CHUNK = 512


class RadiationOperator:
    """
    Dense far-field kernel mapping per-atom currents to sampled fields.

    The same scalar kernel acts on the x and y current components.
    """

    def __init__(self, matrix: np.ndarray, grid: Optional[EmsGrid] = None,
                 observation: Optional[ObservationDomain] = None, k0: Optional[float] = None):
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.ndim != 2:
            raise ValueError(f"Operator matrix must be 2-D, got shape {self.matrix.shape}")
        self.matrix.setflags(write=False)
        self.grid = grid
        self.observation = observation
        self.k0 = k0

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def sample_count(self) -> int:
        return self.matrix.shape[0]

    @property
    def atom_count(self) -> int:
        return self.matrix.shape[1]

    def radiate(self, j: np.ndarray) -> np.ndarray:
        j = np.asarray(j, dtype=complex)
        if j.shape[0] != self.atom_count:
            raise ValueError(f"Current has {j.shape[0]} atoms, operator expects {self.atom_count}")
        return self.matrix @ j

    def adjoint_radiate(self, e: np.ndarray) -> np.ndarray:
        e = np.asarray(e, dtype=complex)
        if e.shape[0] != self.sample_count:
            raise ValueError(f"Field has {e.shape[0]} samples, operator expects {self.sample_count}")
        return self.matrix.conj().T @ e


def _kernel_rows(k0: float, cell_area: float, distances: np.ndarray, directions: np.ndarray,
                 centers: np.ndarray) -> np.ndarray:
    spreading = (1j * k0 / (4.0 * np.pi)) * np.exp(-1j * k0 * distances) / distances
    return (spreading * cell_area)[:, None] * np.exp(1j * k0 * (directions @ centers.T))


def assemble_operator(grid: EmsGrid, obs: ObservationDomain, k0: float, workers: int = 1) -> RadiationOperator:
    """
    Assemble the radiation kernel.

    Entry (m, n) = (j k0 / 4 pi) exp(-j k0 r_m) / r_m * exp(j k0 r_hat_m . r_n) * cell area.
    Rows are computed in independent chunks, so the result does not depend
    on the worker count.

    Args:
        grid: Skin lattice
        obs: Observation domain
        k0: Free-space wavenumber
        workers: Threads used for row chunks

    Returns:
        RadiationOperator of shape (M, P*Q)
    """
    if k0 <= 0:
        raise ValueError(f"Wavenumber must be positive, got {k0}")
    centers = grid.centers()
    cell_area = grid.cell_size_m ** 2
    matrix = np.empty((obs.sample_count, grid.atom_count), dtype=complex)
    starts = list(range(0, obs.sample_count, ROW_CHUNK))

    def fill(start: int) -> None:
        stop = min(start + ROW_CHUNK, obs.sample_count)
        matrix[start:stop] = _kernel_rows(k0, cell_area, obs.distances[start:stop],
                                          obs.directions[start:stop], centers)

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            list(executor.map(fill, starts))
    else:
        for start in starts:
            fill(start)

    logger.info(f"Assembled radiation operator {matrix.shape[0]}x{matrix.shape[1]}")
    return RadiationOperator(matrix, grid=grid, observation=obs, k0=k0)


def radiate(op: RadiationOperator, j: np.ndarray) -> np.ndarray:
    """Field (M, 2) radiated by a current (N, 2)."""
    return op.radiate(j)


def adjoint_radiate(op: RadiationOperator, e: np.ndarray) -> np.ndarray:
    """Adjoint of radiate under the unweighted inner products on both sides."""
    return op.adjoint_radiate(e)
