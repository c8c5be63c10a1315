#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import numpy as np

from atomdb.atom_database import AtomDatabase
from atomdb.induced_current import entry_currents, layout_currents
from forward.radiation_operator import RadiationOperator, assemble_operator
from scenario.scenario import Scenario
from spectral.decomposition import SpectralDecomposition, decompose, pre_image_current, total_current
from synthesis.cost import SynthesisError, cost_phi
from synthesis.ems_update import ems_update_indices
from synthesis.particle_swarm import PsoConfig, ns_update

logger = logging.getLogger(__name__)

DEFAULT_MODE_CAP = 200
STALL_TOLERANCE = 1e-12


@dataclass
class SynthesisConfig:
    """Control parameters of the alternating synthesis loop."""
    eta_svd: float = 0.1
    eta_phi: float = 1e-4
    max_outer: int = 10000
    ns_mode_cap: Optional[int] = None
    ns_method: str = "pso"
    target_scale: Optional[float] = None
    stall_patience: Optional[int] = None
    seed: int = 0
    pso: PsoConfig = field(default_factory=PsoConfig)

    def __post_init__(self):
        if not 0 < self.eta_svd < 1:
            raise ValueError(f"eta_svd must lie in (0, 1), got {self.eta_svd}")
        if not 0 < self.eta_phi < 1:
            raise ValueError(f"eta_phi must lie in (0, 1), got {self.eta_phi}")
        if self.max_outer < 1:
            raise ValueError(f"max_outer must be at least 1, got {self.max_outer}")
        if self.ns_method not in ("pso", "none"):
            raise ValueError(f"Unknown null-space method: {self.ns_method}")
        if self.ns_mode_cap is not None and self.ns_mode_cap < 0:
            raise ValueError(f"ns_mode_cap must be non-negative, got {self.ns_mode_cap}")

    @classmethod
    def from_dict(cls, config: Dict[str, Any] = None, seed: int = 0) -> "SynthesisConfig":
        config = dict(config or {})
        pso = PsoConfig.from_dict(config.pop("pso", None))
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config) - known)
        if unknown:
            raise ValueError(f"Unknown synthesis parameters: {unknown}")
        config.setdefault("seed", seed)
        return cls(pso=pso, **config)

    def mode_count(self, null_count: int) -> int:
        cap = DEFAULT_MODE_CAP if self.ns_mode_cap is None else self.ns_mode_cap
        return min(null_count, cap)


@dataclass
class SynthesisState:
    """Layout and coefficients after the latest phase."""
    layout_indices: np.ndarray
    beta: np.ndarray
    cost_trace: List[Dict[str, Any]] = field(default_factory=list)
    phase: int = 0

    def record(self, step: str, cost: float) -> None:
        self.cost_trace.append({"phase": self.phase, "step": step, "cost": cost})
        logger.info(f"Phase {self.phase} {step}: cost {cost:.6e}")


@dataclass
class SynthesisResult:
    """Outcome of one synthesis run."""
    layout: np.ndarray
    pi_layout: np.ndarray
    layout_indices: np.ndarray
    pi_layout_indices: np.ndarray
    beta: np.ndarray
    cost_trace: List[Dict[str, Any]]
    termination_reason: str
    outer_iterations: int
    final_cost: float
    pi_cost: float
    s_th: int
    mode_count: int
    target_scale: float
    seed: int
    target_field: np.ndarray
    field_opt: np.ndarray
    field_pi: np.ndarray
    field_reference: np.ndarray
    j_pi: np.ndarray
    j_ns: np.ndarray
    ns_radiation_ratio: float

    def summary(self) -> Dict[str, Any]:
        return {
            "termination_reason": self.termination_reason,
            "outer_iterations": self.outer_iterations,
            "final_cost": self.final_cost,
            "pi_cost": self.pi_cost,
            "s_th": self.s_th,
            "mode_count": self.mode_count,
            "target_scale": self.target_scale,
            "ns_radiation_ratio": self.ns_radiation_ratio,
            "seed": self.seed,
        }


class LayoutSynthesizer:
    """
    Alternating synthesis of a skin layout.

    Each outer iteration first picks, atom by atom, the database entry closest
    to the reference current J_PI + J_NS(beta), then re-optimizes beta for the
    new layout with a particle swarm seeded at the residual-projection
    optimum. With ns_method "none" beta stays zero and the run reduces to
    matching the pre-image current alone; an empty null space ends the run
    after its first layout update.
    """

    def __init__(self, config: Any = None, workers: int = 1):
        """
        Initialize the synthesizer.

        Args:
            config: SynthesisConfig or the ``synthesis`` config dictionary
            workers: Threads for assembly, layout search and swarm evaluation
        """
        if isinstance(config, SynthesisConfig):
            self.config = config
        else:
            self.config = SynthesisConfig.from_dict(config)
        self.workers = workers
        self.metadata = {}

    def _scale_target(self, dec: SpectralDecomposition, target: np.ndarray, db: AtomDatabase,
                      scenario: Scenario) -> float:
        if self.config.target_scale is not None:
            return float(self.config.target_scale)
        j_unit = pre_image_current(dec, target)
        peak = float(np.max(np.linalg.norm(j_unit, axis=1)))
        attainable = float(np.max(np.linalg.norm(entry_currents(db, scenario.wave, scenario.basis), axis=1)))
        if peak == 0 or attainable == 0:
            logger.warning("Pre-image current or database currents vanish, target left unscaled")
            return 1.0
        return attainable / peak

    def _stalled(self, trace: List[Dict[str, Any]], phase: int) -> bool:
        patience = self.config.stall_patience
        if patience is None or phase <= patience:
            return False
        costs = {entry["phase"]: entry["cost"] for entry in trace}
        before, now = costs[phase - patience], costs[phase]
        return before - now <= STALL_TOLERANCE * max(before, 1e-300)

    def synthesize(self, scenario: Scenario, db: AtomDatabase, target: np.ndarray,
                   operator: Optional[RadiationOperator] = None,
                   decomposition: Optional[SpectralDecomposition] = None) -> SynthesisResult:
        """
        Run the alternating loop.

        Args:
            scenario: Problem geometry and illumination
            db: Atom database
            target: Desired field (M, 2) before scaling
            operator: Pre-assembled radiation operator
            decomposition: Pre-computed SVD of the operator

        Returns:
            SynthesisResult

        Raises:
            SynthesisError: If the target has no component on the retained modes
        """
        cfg = self.config
        grid, wave, basis = scenario.grid, scenario.wave, scenario.basis
        if operator is None:
            operator = assemble_operator(grid, scenario.observation, wave.k0, self.workers)
        if decomposition is None:
            decomposition = decompose(operator, cfg.eta_svd)
        dec = decomposition

        scale = self._scale_target(dec, target, db, scenario)
        target_field = np.asarray(target, dtype=complex) * scale
        j_pi = pre_image_current(dec, target_field)
        if not np.any(j_pi):
            raise SynthesisError("Target is orthogonal to every retained mode; nothing to synthesize")

        polarization = basis.transverse_te()
        mode_count = cfg.mode_count(dec.null_count) if cfg.ns_method == "pso" else 0
        centers = grid.centers()
        logger.info(
            f"Synthesis: s_th={dec.s_th}, null modes {dec.null_count}, optimizing {mode_count}, "
            f"target scale {scale:.6g}"
        )

        state = SynthesisState(layout_indices=np.zeros(grid.atom_count, dtype=int),
                               beta=np.zeros(mode_count, dtype=complex))
        pi_indices = None
        pi_cost = None
        reason = "max_outer"

        for phase in range(1, cfg.max_outer + 1):
            state.phase = phase
            j_tilde = total_current(dec, None, state.beta, polarization, j_pi=j_pi)
            state.layout_indices = ems_update_indices(db, j_tilde, wave, basis, grid, self.workers)
            j_induced = layout_currents(state.layout_indices, db, wave, basis, centers)
            cost = cost_phi(j_induced, j_tilde)
            state.record("ems", cost)
            if pi_indices is None:
                pi_indices, pi_cost = state.layout_indices.copy(), cost
            if cost <= cfg.eta_phi:
                reason = "converged"
                break

            if mode_count > 0:
                state.beta, cost = ns_update(dec, j_induced, j_pi, state.beta, cfg.pso, cfg.seed,
                                             phase, polarization, self.workers)
                state.record("ns", cost)
                if cost <= cfg.eta_phi:
                    reason = "converged"
                    break
            elif cfg.ns_method == "none":
                reason = "pre_image_only"
                break
            else:
                # later phases would repeat the same layout update
                reason = "no_null_modes"
                break

            if self._stalled(state.cost_trace, phase):
                reason = "stalled"
                break

        j_final = layout_currents(state.layout_indices, db, wave, basis, centers)
        j_pi_layout = layout_currents(pi_indices, db, wave, basis, centers)
        j_ns = total_current(dec, None, state.beta, polarization, j_pi=j_pi) - j_pi
        field_pi_current = operator.radiate(j_pi)
        ns_ratio = float(np.linalg.norm(operator.radiate(j_ns)) / np.linalg.norm(field_pi_current))

        result = SynthesisResult(
            layout=db.descriptors[state.layout_indices].reshape(grid.shape),
            pi_layout=db.descriptors[pi_indices].reshape(grid.shape),
            layout_indices=state.layout_indices,
            pi_layout_indices=pi_indices,
            beta=state.beta,
            cost_trace=state.cost_trace,
            termination_reason=reason,
            outer_iterations=state.phase,
            final_cost=state.cost_trace[-1]["cost"],
            pi_cost=pi_cost,
            s_th=dec.s_th,
            mode_count=mode_count,
            target_scale=scale,
            seed=cfg.seed,
            target_field=target_field,
            field_opt=operator.radiate(j_final),
            field_pi=operator.radiate(j_pi_layout),
            field_reference=operator.radiate(j_pi + j_ns),
            j_pi=j_pi,
            j_ns=j_ns,
            ns_radiation_ratio=ns_ratio,
        )
        self.metadata = result.summary()
        logger.info(
            f"Synthesis finished ({reason}) after {state.phase} outer iterations: "
            f"cost {result.pi_cost:.6e} (pre-image layout) -> {result.final_cost:.6e}"
        )
        return result

    def get_metadata(self) -> Dict[str, Any]:
        return self.metadata


def run_alternating(scenario: Scenario, db: AtomDatabase, target: np.ndarray,
                    config: Any = None, workers: int = 1) -> SynthesisResult:
    """Convenience wrapper around LayoutSynthesizer.synthesize."""
    return LayoutSynthesizer(config, workers=workers).synthesize(scenario, db, target)
