#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_PRINTING_STEP_M = 1e-4
_PASSIVITY_TOL = 1e-12


class DatabaseError(ValueError):
    """Raised when an atom database violates its invariants; `entry` is the offending 0-based entry if known."""

    def __init__(self, message: str, entry: Optional[int] = None):
        self.entry = entry
        super().__init__(message)


class DatabaseParseError(DatabaseError):
    """Raised when a database file cannot be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DescriptorLookupError(KeyError):
    """Raised when a descriptor is not stored in the database."""


@dataclass(frozen=True)
class AtomDescriptor:
    """Geometric descriptors of one atom; a single patch side in metres here."""
    values: Tuple[float, ...]

    @property
    def side_m(self) -> float:
        return self.values[0]


@dataclass(frozen=True)
class ReflectionMatrix:
    """Diagonal local reflection matrix of an atom."""
    gamma_te: complex
    gamma_tm: complex

    def as_matrix(self) -> np.ndarray:
        return np.diag([self.gamma_te, self.gamma_tm])


@dataclass(frozen=True)
class IncidenceKey:
    theta_inc_rad: float
    phi_inc_rad: float
    frequency_hz: float


def quantize_to_step(d: float, step: float = DEFAULT_PRINTING_STEP_M) -> float:
    """Round a descriptor to the printing grid."""
    return float(np.round(round(d / step) * step, 12))


class AtomDatabase:
    """
    Reflection coefficients of a family of atoms under one incidence.

    Entries are sorted by descriptor. The arrays are read-only once the
    database is built, so one instance can be shared between workers.
    """

    def __init__(self, incidence: IncidenceKey, descriptors: Sequence[float],
                 gamma_te: Sequence[complex], gamma_tm: Sequence[complex],
                 step_m: float = DEFAULT_PRINTING_STEP_M,
                 cell_size_m: Optional[float] = None, name: str = "custom"):
        """
        Initialize the database.

        Args:
            incidence: Incidence the coefficients were computed for
            descriptors: Patch sides in metres, strictly increasing
            gamma_te: TE reflection coefficients
            gamma_tm: TM reflection coefficients
            step_m: Printing step the descriptors are quantized to
            cell_size_m: Unit-cell size bounding the descriptors
            name: Substrate or source name
        """
        self.incidence = incidence
        self.step_m = float(step_m)
        self.cell_size_m = None if cell_size_m is None else float(cell_size_m)
        self.name = name

        self._descriptors = np.array(descriptors, dtype=float)
        self._gamma_te = np.array(gamma_te, dtype=complex)
        self._gamma_tm = np.array(gamma_tm, dtype=complex)
        self._validate()
        for array in (self._descriptors, self._gamma_te, self._gamma_tm):
            array.setflags(write=False)

    def _validate(self) -> None:
        count = len(self._descriptors)
        if self._descriptors.ndim != 1 or self._gamma_te.shape != (count,) or self._gamma_tm.shape != (count,):
            raise DatabaseError("Descriptor and coefficient arrays must be 1-D and of equal length")
        if count < 2:
            raise DatabaseError(f"Database needs at least 2 entries, got {count}")
        if not (np.all(np.isfinite(self._descriptors))
                and np.all(np.isfinite(self._gamma_te)) and np.all(np.isfinite(self._gamma_tm))):
            raise DatabaseError("Database contains non-finite values")

        steps = np.diff(self._descriptors)
        if np.any(steps <= 0):
            row = int(np.argmax(steps <= 0)) + 1
            raise DatabaseError(f"Descriptors must be strictly increasing (entry {row})", entry=row)

        if self._descriptors[0] < 0 or (
                self.cell_size_m is not None and self._descriptors[-1] > self.cell_size_m * (1 + 1e-12)):
            raise DatabaseError(f"Descriptors must lie in [0, {self.cell_size_m}]")

        magnitude = np.maximum(np.abs(self._gamma_te), np.abs(self._gamma_tm))
        if np.any(magnitude > 1 + _PASSIVITY_TOL):
            row = int(np.argmax(magnitude > 1 + _PASSIVITY_TOL))
            raise DatabaseError(f"Entry {row} is not passive: |gamma| = {magnitude[row]:.6g}", entry=row)

    @property
    def descriptors(self) -> np.ndarray:
        return self._descriptors

    @property
    def gamma_te(self) -> np.ndarray:
        return self._gamma_te

    @property
    def gamma_tm(self) -> np.ndarray:
        return self._gamma_tm

    @property
    def entries(self) -> List[Tuple[AtomDescriptor, ReflectionMatrix]]:
        return [
            (AtomDescriptor((float(d),)), ReflectionMatrix(complex(te), complex(tm)))
            for d, te, tm in zip(self._descriptors, self._gamma_te, self._gamma_tm)
        ]

    def __len__(self) -> int:
        return len(self._descriptors)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomDatabase):
            return NotImplemented
        return (
            self.incidence == other.incidence
            and self.step_m == other.step_m
            and self.cell_size_m == other.cell_size_m
            and self.name == other.name
            and np.array_equal(self._descriptors, other._descriptors)
            and np.array_equal(self._gamma_te, other._gamma_te)
            and np.array_equal(self._gamma_tm, other._gamma_tm)
        )

    __hash__ = None

    def index_of(self, d: float) -> int:
        """
        Index of a stored descriptor.

        Matching tolerates float noise well below the printing step.

        Raises:
            DescriptorLookupError: If d is not stored
        """
        position = int(np.searchsorted(self._descriptors, d))
        tolerance = 1e-6 * self.step_m
        for candidate in (position - 1, position):
            if 0 <= candidate < len(self) and abs(self._descriptors[candidate] - d) <= tolerance:
                return candidate
        raise DescriptorLookupError(f"Descriptor {d!r} not in database '{self.name}'")

    def lookup(self, d: float) -> ReflectionMatrix:
        index = self.index_of(d)
        return ReflectionMatrix(complex(self._gamma_te[index]), complex(self._gamma_tm[index]))

    def quantize(self, d: float) -> float:
        """Snap a descriptor to the nearest stored one."""
        position = int(np.clip(np.searchsorted(self._descriptors, d), 1, len(self) - 1))
        left, right = self._descriptors[position - 1], self._descriptors[position]
        return float(left if d - left <= right - d else right)

    def magnitude_db(self, component: str = "te") -> np.ndarray:
        gamma = self._gamma_te if component == "te" else self._gamma_tm
        with np.errstate(divide="ignore"):
            return 20.0 * np.log10(np.abs(gamma))

    def get_metadata(self) -> dict:
        return {
            "name": self.name,
            "entries": len(self),
            "step_m": self.step_m,
            "cell_size_m": self.cell_size_m,
            "incidence": {
                "theta_inc_rad": self.incidence.theta_inc_rad,
                "phi_inc_rad": self.incidence.phi_inc_rad,
                "frequency_hz": self.incidence.frequency_hz,
            },
            "min_gamma_te_db": float(np.min(self.magnitude_db("te"))),
        }
