#!/usr/bin/env python
# -*- coding: utf-8 -*-

import numpy as np


class SynthesisError(RuntimeError):
    """Raised when the synthesis reaches a numerically degenerate state."""


def cost_phi(j_induced: np.ndarray, j_tilde: np.ndarray) -> float:
    """
    Normalized mismatch between induced and reference currents.

    Args:
        j_induced: Current realized by a layout (N, 2)
        j_tilde: Reference current (N, 2)

    Returns:
        sum |J - J~|^2 / sum |J~|^2

    Raises:
        ValueError: On shape mismatch
        SynthesisError: On a zero reference current
    """
    j_induced = np.asarray(j_induced)
    j_tilde = np.asarray(j_tilde)
    if j_induced.shape != j_tilde.shape:
        raise ValueError(f"Current shapes differ: {j_induced.shape} vs {j_tilde.shape}")
    reference = np.sum(np.abs(j_tilde) ** 2)
    if reference == 0:
        raise SynthesisError("Reference current has zero norm")
    return float(np.sum(np.abs(j_induced - j_tilde) ** 2) / reference)
