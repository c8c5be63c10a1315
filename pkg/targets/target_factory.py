#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from typing import Any, Dict, Type

from targets.target_interface import TargetPattern

logger = logging.getLogger(__name__)


class TargetFactory:
    """
    Factory class for creating target patterns.

    Targets are registered under the ``kind`` string used in run configs.
    """

    def __init__(self):
        self.registered_targets = {}

    def register_target(self, kind: str, target_class: Type[TargetPattern]) -> None:
        """
        Register a target class with the factory.

        Args:
            kind: Config name of the target
            target_class: The target class (must inherit from TargetPattern)
        """
        if not issubclass(target_class, TargetPattern):
            raise TypeError("Target class must inherit from TargetPattern interface")
        self.registered_targets[kind] = target_class
        logger.debug(f"Registered target: {kind}")

    def load_all_targets(self) -> None:
        from targets.contour import ContourTarget
        from targets.pencil_beam import PencilBeamTarget

        self.register_target("pencil", PencilBeamTarget)
        self.register_target("contour", ContourTarget)

    def create_target(self, kind: str, parameters: Dict[str, Any] = None) -> TargetPattern:
        """
        Create a new instance of the specified target.

        Args:
            kind: Registered target kind
            parameters: Target parameters; a ``kind`` entry is ignored

        Returns:
            A new target instance

        Raises:
            ValueError: If the kind is not registered
        """
        if not self.registered_targets:
            self.load_all_targets()
        if kind not in self.registered_targets:
            raise ValueError(f"Unknown target kind: {kind}")
        parameters = {k: v for k, v in (parameters or {}).items() if k != "kind"}
        return self.registered_targets[kind](kind, parameters)
