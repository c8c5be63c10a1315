#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from forward.radiation_operator import RadiationOperator

logger = logging.getLogger(__name__)

DEFAULT_POLARIZATION = (0.0, 1.0)


class SpectralDecompositionError(RuntimeError):
    """Raised when the SVD of the radiation operator fails."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """
    Thin SVD of the radiation kernel with its truncation index.

    left_basis holds U (M, S), right_basis holds V (N, S); columns are the
    singular vectors in decreasing singular-value order.
    """
    singular_values: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    s_th: int
    eta_svd: float

    @property
    def rank_bound(self) -> int:
        return len(self.singular_values)

    @property
    def null_count(self) -> int:
        return self.rank_bound - self.s_th

    @property
    def normalized_spectrum(self) -> np.ndarray:
        if self.singular_values[0] == 0:
            return np.zeros_like(self.singular_values)
        return self.singular_values / self.singular_values[0]

    def null_basis(self, mode_count: Optional[int] = None) -> np.ndarray:
        """Right singular vectors past the truncation index, (N, K)."""
        stop = self.rank_bound if mode_count is None else min(self.rank_bound, self.s_th + mode_count)
        return self.right_basis[:, self.s_th:stop]


def truncation_index(singular_values: np.ndarray, eta_svd: float) -> int:
    """Number of singular values with sigma / sigma_1 >= eta_svd."""
    singular_values = np.asarray(singular_values, dtype=float)
    if len(singular_values) == 0 or singular_values[0] <= 0:
        return 0
    return int(np.count_nonzero(singular_values / singular_values[0] >= eta_svd))


def decompose(op: RadiationOperator, eta_svd: float) -> SpectralDecomposition:
    """
    SVD of the radiation kernel.

    Args:
        op: Radiation operator
        eta_svd: Relative truncation threshold in (0, 1)

    Returns:
        SpectralDecomposition

    Raises:
        SpectralDecompositionError: If LAPACK fails with both drivers
    """
    if not 0 < eta_svd < 1:
        raise ValueError(f"eta_svd must lie in (0, 1), got {eta_svd}")

    try:
        u, s, vh = linalg.svd(op.matrix, full_matrices=False, lapack_driver="gesdd")
    except linalg.LinAlgError:
        logger.warning("gesdd did not converge, retrying with gesvd")
        try:
            u, s, vh = linalg.svd(op.matrix, full_matrices=False, lapack_driver="gesvd")
        except linalg.LinAlgError as e:
            raise SpectralDecompositionError(f"SVD of {op.shape[0]}x{op.shape[1]} operator failed: {e}") from e

    v = vh.conj().T
    s_th = truncation_index(s, eta_svd)
    for array in (u, s, v):
        array.setflags(write=False)

    logger.info(f"SVD: S = {len(s)}, s_th = {s_th} at eta_svd = {eta_svd}")
    return SpectralDecomposition(singular_values=s, left_basis=u, right_basis=v, s_th=s_th, eta_svd=eta_svd)


def pre_image_current(dec: SpectralDecomposition, target: np.ndarray) -> np.ndarray:
    """
    Truncated pseudo-inverse applied to a target field, per component.

    Args:
        dec: Spectral decomposition
        target: Field (M, 2)

    Returns:
        Current (N, 2)
    """
    target = np.asarray(target, dtype=complex)
    if target.shape[0] != dec.left_basis.shape[0]:
        raise ValueError(f"Target has {target.shape[0]} samples, expected {dec.left_basis.shape[0]}")
    r = dec.s_th
    coefficients = dec.left_basis[:, :r].conj().T @ target
    return dec.right_basis[:, :r] @ (coefficients / dec.singular_values[:r, None])


def null_space_current(dec: SpectralDecomposition, beta: np.ndarray,
                       polarization: Sequence[float] = DEFAULT_POLARIZATION) -> np.ndarray:
    """
    Null-space current sum_s beta_s V_s along a transverse polarization.

    beta may be shorter than the full null space; it then covers the first
    len(beta) null modes.

    Args:
        dec: Spectral decomposition
        beta: Complex coefficients
        polarization: Unit (x, y) direction of the current

    Returns:
        Current (N, 2)
    """
    beta = np.asarray(beta, dtype=complex).ravel()
    if len(beta) > dec.null_count:
        raise ValueError(f"beta has {len(beta)} coefficients, null space has {dec.null_count} modes")
    scalar = dec.null_basis(len(beta)) @ beta
    return np.outer(scalar, np.asarray(polarization, dtype=float))


def total_current(dec: SpectralDecomposition, target: np.ndarray, beta: np.ndarray,
                  polarization: Sequence[float] = DEFAULT_POLARIZATION,
                  j_pi: Optional[np.ndarray] = None) -> np.ndarray:
    """Pre-image plus null-space current; j_pi may be passed in when already known."""
    if j_pi is None:
        j_pi = pre_image_current(dec, target)
    return j_pi + null_space_current(dec, beta, polarization)


def spectrum_frame(dec: SpectralDecomposition) -> pd.DataFrame:
    """Normalized spectrum as a frame with columns s (1-based) and sigma_normalized."""
    return pd.DataFrame({
        "s": np.arange(1, dec.rank_bound + 1),
        "sigma_normalized": dec.normalized_spectrum,
    })
