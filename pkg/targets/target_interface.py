#!/usr/bin/env python
# -*- coding: utf-8 -*-

from abc import ABC, abstractmethod
from typing import Any, Dict

import numpy as np

from scenario.scenario import Scenario


class TargetPattern(ABC):
    """
    Abstract base class for desired reflected-field distributions.

    Implementations turn their parameters into a field vector (M, 2) sampled
    on the scenario's observation domain. Targets carry magnitude only; the
    phase is uniform and zero.
    """

    def __init__(self, name: str, parameters: Dict[str, Any] = None):
        """
        Initialize a new target.

        Args:
            name: The name of the target
            parameters: Dictionary of target-specific parameters
        """
        self.name = name
        self.parameters = dict(parameters or {})
        self.field = None
        self.metadata = {}

    def get_name(self) -> str:
        return self.name

    def get_parameters(self) -> Dict[str, Any]:
        return self.parameters

    def get_metadata(self) -> Dict[str, Any]:
        return self.metadata

    @staticmethod
    def polarize(amplitude: np.ndarray, polarization: np.ndarray) -> np.ndarray:
        """Spread a scalar amplitude (M,) along a transverse unit 2-vector."""
        return np.outer(np.asarray(amplitude, dtype=float), polarization).astype(complex)

    @abstractmethod
    def generate(self, scenario: Scenario) -> np.ndarray:
        """
        Sample the target field on the scenario's observation domain.

        Args:
            scenario: Scenario whose observation domain is sampled

        Returns:
            Complex field (M, 2)
        """
        pass

    @abstractmethod
    def get_target_type(self) -> str:
        pass

    @abstractmethod
    def get_description(self) -> str:
        pass
