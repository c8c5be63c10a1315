#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, fields
from typing import Any, Dict

import numpy as np

from atomdb.atom_database import AtomDatabase, DEFAULT_PRINTING_STEP_M, IncidenceKey
from config.config_loader import get_substrate_defaults

logger = logging.getLogger(__name__)


def _logistic(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True)
class SubstrateModel:
    """
    Parametric reflection model of a square patch on a grounded substrate.

    Magnitude in dB is a Lorentzian dip around the resonant patch side;
    phase falls monotonically from pi along a logistic centred on the
    same side. The TM coefficient mirrors the TE one.
    """
    name: str
    eps_r: float
    tan_delta: float
    thickness_m: float
    resonance_d_m: float
    dip_db: float
    dip_width_m: float
    phase_span_rad: float
    floor_loss_db: float
    phase_width_m: float = 4e-3

    def __post_init__(self):
        if not self.dip_db <= self.floor_loss_db <= 0:
            raise ValueError(
                f"Substrate '{self.name}': need dip_db <= floor_loss_db <= 0, "
                f"got {self.dip_db} and {self.floor_loss_db}"
            )
        if self.dip_width_m <= 0:
            raise ValueError(f"Substrate '{self.name}': dip_width_m must be positive")
        if not 0 < self.phase_span_rad <= 2 * np.pi or self.phase_width_m <= 0:
            raise ValueError(
                f"Substrate '{self.name}': non-monotone phase parameterization "
                f"(span {self.phase_span_rad}, width {self.phase_width_m})"
            )

    @classmethod
    def from_preset(cls, preset: str, **overrides) -> "SubstrateModel":
        """
        Build a model from a named preset in config/substrates.json.

        Args:
            preset: Preset name, e.g. "paper" or "isola"
            **overrides: Field values replacing the preset ones
        """
        parameters = get_substrate_defaults(preset)
        if not parameters:
            raise KeyError(f"Unknown substrate preset: {preset}")
        return cls.from_dict({"name": preset, **parameters, **overrides})

    @classmethod
    def from_dict(cls, parameters: Dict[str, Any]) -> "SubstrateModel":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(parameters) - known)
        if unknown:
            raise ValueError(f"Unknown substrate parameters: {unknown}")
        return cls(**parameters)

    def magnitude_db(self, d: np.ndarray) -> np.ndarray:
        offset = (np.asarray(d, dtype=float) - self.resonance_d_m) / self.dip_width_m
        return self.floor_loss_db + (self.dip_db - self.floor_loss_db) / (1.0 + offset ** 2)

    def phase_rad(self, d: np.ndarray, cell_size_m: float) -> np.ndarray:
        start = _logistic(-self.resonance_d_m / self.phase_width_m)
        stop = _logistic((cell_size_m - self.resonance_d_m) / self.phase_width_m)
        s = (_logistic((np.asarray(d, dtype=float) - self.resonance_d_m) / self.phase_width_m) - start) / (stop - start)
        return np.pi - self.phase_span_rad * s

    def reflection(self, d: np.ndarray, cell_size_m: float) -> np.ndarray:
        magnitude = 10.0 ** (self.magnitude_db(d) / 20.0)
        return magnitude * np.exp(1j * self.phase_rad(d, cell_size_m))


def generate_synthetic_db(model: SubstrateModel, cell_size: float,
                          step: float = DEFAULT_PRINTING_STEP_M,
                          incidence: IncidenceKey = None) -> AtomDatabase:
    """
    Tabulate a substrate model on the printing grid.

    Args:
        model: Reflection model
        cell_size: Unit-cell size in metres; the largest descriptor
        step: Printing step in metres
        incidence: Incidence key stored with the database

    Returns:
        AtomDatabase with entries at 0, step, 2*step, ... <= cell_size
    """
    if not 0 < step < cell_size:
        raise ValueError(f"Need 0 < step < cell_size, got step={step}, cell_size={cell_size}")
    if incidence is None:
        incidence = IncidenceKey(0.0, 0.0, 0.0)

    count = int(np.floor(cell_size / step + 1e-9)) + 1
    descriptors = np.round(np.arange(count) * step, 12)
    gamma = model.reflection(descriptors, cell_size)

    database = AtomDatabase(
        incidence=incidence,
        descriptors=descriptors,
        gamma_te=gamma,
        gamma_tm=gamma.copy(),
        step_m=step,
        cell_size_m=cell_size,
        name=model.name,
    )
    logger.info(
        f"Generated synthetic database '{model.name}': {count} entries, "
        f"min |gamma_te| {np.min(database.magnitude_db('te')):.2f} dB"
    )
    return database
