#!/usr/bin/env python
# -*- coding: utf-8 -*-

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EmsGrid:
    """
    Rectangular P x Q lattice of square atoms centred on the origin.

    Atoms are indexed row-major over (p, q): flat index = p * Q + q, with
    x growing with p and y growing with q. Coordinates are relative to the
    skin centre, which sits center_height_m above the floor.
    """
    p_count: int
    q_count: int
    cell_size_m: float
    center_height_m: float = 0.0

    def __post_init__(self):
        if self.p_count < 1 or self.q_count < 1:
            raise ValueError(f"Grid dimensions must be positive, got {self.p_count}x{self.q_count}")
        if not np.isfinite(self.cell_size_m) or self.cell_size_m <= 0:
            raise ValueError(f"Cell size must be positive, got {self.cell_size_m}")

    @property
    def shape(self):
        return (self.p_count, self.q_count)

    @property
    def atom_count(self) -> int:
        return self.p_count * self.q_count

    @property
    def aperture_m(self):
        return (self.p_count * self.cell_size_m, self.q_count * self.cell_size_m)

    def centers(self) -> np.ndarray:
        """Atom centres as an (N, 3) array with z = 0."""
        x = (np.arange(self.p_count) - (self.p_count - 1) / 2.0) * self.cell_size_m
        y = (np.arange(self.q_count) - (self.q_count - 1) / 2.0) * self.cell_size_m
        xx, yy = np.meshgrid(x, y, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel(), np.zeros(self.atom_count)])
