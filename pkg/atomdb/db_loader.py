#!/usr/bin/env python
# -*- coding: utf-8 -*-

import json
import logging
import os
import re
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from atomdb.atom_database import (
    AtomDatabase,
    DatabaseError,
    DatabaseParseError,
    DEFAULT_PRINTING_STEP_M,
    IncidenceKey,
)
from atomdb.substrate_model import SubstrateModel, generate_synthetic_db

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ["d_m", "gamma_te_re", "gamma_te_im", "gamma_tm_re", "gamma_tm_im"]


def sidecar_path(path: str) -> str:
    """Path of the JSON metadata file stored next to a CSV export."""
    return os.path.splitext(path)[0] + ".meta.json"


class AtomDatabaseLoader:
    """
    Loads an atom database from a CSV file or builds it from a substrate preset.

    The synthesis pipeline only needs an AtomDatabase; this class hides
    where the reflection coefficients came from.
    """

    def __init__(self, config: Dict[str, Any] = None):
        """
        Initialize the database loader.

        Args:
            config: Configuration dictionary. Keys: ``path`` (CSV file, wins
                over ``substrate``), ``substrate`` (preset name), ``step_m``,
                ``cell_size_m``, ``incidence`` (IncidenceKey for synthetic data)
        """
        self.config = config or {}
        self.source_path = self.config.get("path")
        self.source_type = self.config.get("type", "csv" if self.source_path else "synthetic")
        self.substrate = self.config.get("substrate", "paper")
        self.step_m = self.config.get("step_m", DEFAULT_PRINTING_STEP_M)
        self.cell_size_m = self.config.get("cell_size_m")
        self.incidence = self.config.get("incidence")
        self.metadata = {}

    def load_data(self) -> AtomDatabase:
        """
        Load the atom database based on configuration.

        Returns:
            AtomDatabase instance
        """
        if self.source_type == "csv":
            return self._load_from_csv()
        elif self.source_type == "synthetic":
            return self._generate_synthetic()
        else:
            raise ValueError(f"Unknown database source type: {self.source_type}")

    def _load_from_csv(self) -> AtomDatabase:
        database = load_db(self.source_path, cell_size_m=self.cell_size_m)
        self.metadata = {"source": "csv", "path": self.source_path, **database.get_metadata()}
        return database

    def _generate_synthetic(self) -> AtomDatabase:
        if self.cell_size_m is None:
            raise ValueError("Synthetic databases need a cell size")
        model = SubstrateModel.from_preset(self.substrate)
        database = generate_synthetic_db(model, self.cell_size_m, self.step_m, self.incidence)
        self.metadata = {"source": "synthetic", "substrate": self.substrate, **database.get_metadata()}
        return database

    def get_metadata(self) -> Dict[str, Any]:
        return self.metadata


def save_db(db: AtomDatabase, path: str) -> str:
    """
    Write a database as CSV plus a JSON sidecar.

    Floats carry 17 significant digits so that loading restores them exactly.

    Args:
        db: Database to write
        path: Target CSV path

    Returns:
        The CSV path
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    frame = pd.DataFrame({
        "d_m": db.descriptors,
        "gamma_te_re": db.gamma_te.real,
        "gamma_te_im": db.gamma_te.imag,
        "gamma_tm_re": db.gamma_tm.real,
        "gamma_tm_im": db.gamma_tm.imag,
    })
    frame.to_csv(path, index=False, float_format="%.17g")

    with open(sidecar_path(path), 'w') as f:
        json.dump({
            "name": db.name,
            "step_m": db.step_m,
            "cell_size_m": db.cell_size_m,
            "incidence": {
                "theta_inc_rad": db.incidence.theta_inc_rad,
                "phi_inc_rad": db.incidence.phi_inc_rad,
                "frequency_hz": db.incidence.frequency_hz,
            },
        }, f, indent=4, sort_keys=True)

    logger.info(f"Saved atom database '{db.name}' ({len(db)} entries) to {path}")
    return path


def _read_sidecar(path: str) -> Dict[str, Any]:
    meta_path = sidecar_path(path)
    if not os.path.exists(meta_path):
        return {}
    with open(meta_path, 'r') as f:
        return json.load(f)


def load_db(path: str, cell_size_m: Optional[float] = None) -> AtomDatabase:
    """
    Load a database CSV written by save_db or by external simulation tools.

    Args:
        path: CSV path
        cell_size_m: Unit-cell size used for the range check; falls back to
            the sidecar value

    Returns:
        AtomDatabase

    Raises:
        FileNotFoundError: If the file does not exist
        DatabaseParseError: On malformed, unsorted, duplicate or out-of-range rows
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Database file not found: {path}")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise DatabaseParseError("empty database", line=1)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise DatabaseParseError(f"malformed row: {e}", line=int(match.group(1)) if match else None)

    missing_columns = [col for col in REQUIRED_COLUMNS if col not in frame.columns]
    if missing_columns:
        raise DatabaseParseError(f"CSV file missing required columns: {missing_columns}", line=1)
    extra_columns = [col for col in frame.columns if col not in REQUIRED_COLUMNS]
    if extra_columns:
        raise DatabaseParseError(f"CSV file has unexpected columns: {extra_columns}", line=1)
    if frame.empty:
        raise DatabaseParseError("empty database", line=2)

    meta = _read_sidecar(path)
    if cell_size_m is None:
        cell_size_m = meta.get("cell_size_m")

    rows = np.empty((len(frame), len(REQUIRED_COLUMNS)))
    previous = None
    for i, record in enumerate(frame[REQUIRED_COLUMNS].itertuples(index=False)):
        line = i + 2
        try:
            values = [float(field) for field in record]
        except (TypeError, ValueError):
            raise DatabaseParseError(f"malformed row {list(record)}", line=line)
        if not np.all(np.isfinite(values)):
            raise DatabaseParseError("non-finite value", line=line)

        d = values[0]
        if d < 0 or (cell_size_m is not None and d > cell_size_m * (1 + 1e-12)):
            raise DatabaseParseError(f"descriptor {d} outside [0, {cell_size_m}]", line=line)
        if previous is not None and d == previous:
            raise DatabaseParseError(f"duplicate descriptor {d}", line=line)
        if previous is not None and d < previous:
            raise DatabaseParseError(f"unsorted descriptors: {d} after {previous}", line=line)
        if abs(complex(values[1], values[2])) > 1 + 1e-12 or abs(complex(values[3], values[4])) > 1 + 1e-12:
            raise DatabaseParseError("reflection coefficient magnitude exceeds 1", line=line)

        rows[i] = values
        previous = d

    incidence = meta.get("incidence", {})
    try:
        database = AtomDatabase(
            incidence=IncidenceKey(
                float(incidence.get("theta_inc_rad", 0.0)),
                float(incidence.get("phi_inc_rad", 0.0)),
                float(incidence.get("frequency_hz", 0.0)),
            ),
            descriptors=rows[:, 0],
            gamma_te=rows[:, 1] + 1j * rows[:, 2],
            gamma_tm=rows[:, 3] + 1j * rows[:, 4],
            step_m=meta.get("step_m", DEFAULT_PRINTING_STEP_M),
            cell_size_m=cell_size_m,
            name=meta.get("name", os.path.splitext(os.path.basename(path))[0]),
        )
    except DatabaseError as e:
        # entry i sits on line i + 2, below the header
        line = e.entry + 2 if e.entry is not None else None
        raise DatabaseParseError(str(e), line=line) from e

    logger.info(f"Loaded atom database '{database.name}' ({len(database)} entries) from {path}")
    return database
