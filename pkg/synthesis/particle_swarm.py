#!/usr/bin/env python
# -*- coding: utf-8 -*-

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from spectral.decomposition import DEFAULT_POLARIZATION, SpectralDecomposition, total_current
from synthesis.cost import cost_phi

logger = logging.getLogger(__name__)


@dataclass
class PsoConfig:
    """Particle swarm settings for one null-space update."""
    swarm_size: int = 40
    inertia: float = 0.7298
    cognitive: float = 1.49618
    social: float = 1.49618
    iterations: int = 50
    velocity_clamp: float = 0.2
    beta_bound: float = 1.0
    init_spread: float = 0.1

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be at least 2, got {self.swarm_size}")
        if not 0 < self.inertia < 1:
            raise ValueError(f"inertia must lie in (0, 1), got {self.inertia}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        if min(self.cognitive, self.social, self.velocity_clamp, self.beta_bound) <= 0:
            raise ValueError("PSO coefficients and bounds must be positive")
        if self.init_spread < 0:
            raise ValueError(f"init_spread must be non-negative, got {self.init_spread}")

    @classmethod
    def from_dict(cls, config: Dict[str, Any] = None) -> "PsoConfig":
        config = config or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config) - known)
        if unknown:
            raise ValueError(f"Unknown PSO parameters: {unknown}")
        return cls(**config)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def particle_rng(seed: int, stream: int, particle: int) -> np.random.Generator:
    """Counter-based generator private to one particle of one update."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, particle))))


def project_to_ball(x: np.ndarray, radius: float) -> np.ndarray:
    norm = np.linalg.norm(x)
    if norm > radius:
        return x * (radius / norm)
    return x


class ParticleSwarm:
    """
    Global-best particle swarm with constriction-equivalent coefficients.

    Particles live in a ball of the given radius; particle 0 starts at the
    supplied point, so the returned optimum is never worse than it. Extra
    seed points, when given, replace the random starts of particles 1, 2, ...
    """

    def __init__(self, config: PsoConfig = None, seed: int = 0, stream: int = 0, workers: int = 1):
        self.config = config or PsoConfig()
        self.seed = seed
        self.stream = stream
        self.workers = workers
        self.history: List[float] = []

    def _evaluate(self, objective: Callable[[np.ndarray], float], positions: np.ndarray) -> np.ndarray:
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                return np.array(list(executor.map(objective, positions)))
        return np.array([objective(x) for x in positions])

    def minimize(self, objective: Callable[[np.ndarray], float], x0: np.ndarray,
                 radius: float, seeds: Sequence[np.ndarray] = ()) -> Tuple[np.ndarray, float]:
        """
        Minimize an objective over the ball |x| <= radius.

        Args:
            objective: Real function of a real vector
            x0: Starting point, kept as particle 0
            radius: Ball radius
            seeds: Further starting points, projected into the ball

        Returns:
            Best position and its objective value
        """
        cfg = self.config
        x0 = np.asarray(x0, dtype=float)
        dimensions = len(x0)
        rngs = [particle_rng(self.seed, self.stream, i) for i in range(cfg.swarm_size)]
        v_max = cfg.velocity_clamp * radius

        positions = np.empty((cfg.swarm_size, dimensions))
        positions[0] = x0
        scale = cfg.init_spread * radius / np.sqrt(max(dimensions, 1))
        for i in range(1, cfg.swarm_size):
            positions[i] = project_to_ball(x0 + scale * rngs[i].standard_normal(dimensions), radius)
        for i, point in enumerate(seeds[:cfg.swarm_size - 1], start=1):
            positions[i] = project_to_ball(np.asarray(point, dtype=float), radius)
        velocities = np.zeros_like(positions)

        values = self._evaluate(objective, positions)
        best_positions, best_values = positions.copy(), values.copy()
        leader = int(np.argmin(best_values))
        self.history = [float(best_values[leader])]

        for iteration in range(cfg.iterations):
            for i in range(cfg.swarm_size):
                r1 = rngs[i].random(dimensions)
                r2 = rngs[i].random(dimensions)
                velocities[i] = (cfg.inertia * velocities[i]
                                 + cfg.cognitive * r1 * (best_positions[i] - positions[i])
                                 + cfg.social * r2 * (best_positions[leader] - positions[i]))
                velocities[i] = np.clip(velocities[i], -v_max, v_max)
                positions[i] = project_to_ball(positions[i] + velocities[i], radius)

            values = self._evaluate(objective, positions)
            improved = values < best_values
            best_positions[improved] = positions[improved]
            best_values[improved] = values[improved]
            leader = int(np.argmin(best_values))
            self.history.append(float(best_values[leader]))
            logger.debug(f"PSO iteration {iteration + 1}: best cost {best_values[leader]:.6e}")

        return best_positions[leader].copy(), float(best_values[leader])


def beta_to_vector(beta: np.ndarray) -> np.ndarray:
    beta = np.asarray(beta, dtype=complex)
    return np.concatenate([beta.real, beta.imag])


def vector_to_beta(x: np.ndarray) -> np.ndarray:
    half = len(x) // 2
    return x[:half] + 1j * x[half:]


def radiation_radius(dec: SpectralDecomposition, j_pi: np.ndarray) -> float:
    """
    Largest |beta| whose null-space field stays within eta_svd of the pre-image field.

    Null modes radiate at most sigma_{s_th+1} per unit coefficient, so the
    bound holds for any polarization and any mode subset.
    """
    if dec.null_count == 0:
        return 0.0
    sigma_null = float(dec.singular_values[dec.s_th])
    if sigma_null == 0:
        return np.inf
    r = dec.s_th
    coefficients = dec.right_basis[:, :r].conj().T @ np.asarray(j_pi, dtype=complex)
    field_norm = float(np.linalg.norm(dec.singular_values[:r, None] * coefficients))
    return dec.eta_svd * field_norm / sigma_null


def residual_projection_beta(dec: SpectralDecomposition, j_induced: np.ndarray, j_pi: np.ndarray,
                             mode_count: int, polarization: Sequence[float], radius: float) -> np.ndarray:
    """
    Null-space coefficients minimizing the mismatch for a fixed layout.

    The optimum points along the projection b of the residual J - J_PI onto
    the null modes; its length t solves m t^2 + (c - a) t - m c = 0 with
    a = |J - J_PI|^2, c = |J_PI|^2 and m = |b|, clipped to the ball.
    """
    p = np.asarray(polarization, dtype=float)
    residual = np.asarray(j_induced, dtype=complex) - np.asarray(j_pi, dtype=complex)
    b = dec.null_basis(mode_count).conj().T @ (residual @ p)
    m = float(np.linalg.norm(b))
    if m == 0 or radius == 0:
        return np.zeros(mode_count, dtype=complex)
    a = float(np.sum(np.abs(residual) ** 2))
    c = float(np.sum(np.abs(j_pi) ** 2))
    t = ((a - c) + np.sqrt((a - c) ** 2 + 4.0 * m * m * c)) / (2.0 * m)
    return b * (min(t, radius) / m)


def ns_update(dec: SpectralDecomposition, j_induced: np.ndarray, j_pi: np.ndarray,
              beta_prev: np.ndarray, pso: PsoConfig, seed: int, phase: int = 0,
              polarization: Sequence[float] = DEFAULT_POLARIZATION,
              workers: int = 1) -> Tuple[np.ndarray, float]:
    """
    Particle-swarm update of the null-space coefficients for a fixed layout.

    The search covers the first len(beta_prev) null modes, real and
    imaginary parts separately, inside |beta| <= beta_bound * |J_PI|,
    further capped so that the null-space field never exceeds eta_svd times
    the pre-image field. Particle 0 starts at beta_prev and particle 1 at
    the residual-projection optimum.

    Args:
        dec: Spectral decomposition
        j_induced: Current realized by the current layout (N, 2)
        j_pi: Pre-image current (N, 2)
        beta_prev: Coefficients from the previous update
        pso: Swarm settings
        seed: Run seed
        phase: Outer iteration, selects the random stream
        polarization: Transverse direction of null-space currents
        workers: Threads for particle evaluation

    Returns:
        New coefficients and the matching cost
    """
    beta_prev = np.asarray(beta_prev, dtype=complex)

    def objective(x: np.ndarray) -> float:
        return cost_phi(j_induced, total_current(dec, None, vector_to_beta(x), polarization, j_pi=j_pi))

    radius = min(pso.beta_bound * float(np.linalg.norm(j_pi)), radiation_radius(dec, j_pi))
    if len(beta_prev) == 0 or radius == 0:
        return beta_prev, objective(beta_to_vector(beta_prev))

    seeded = residual_projection_beta(dec, j_induced, j_pi, len(beta_prev), polarization, radius)
    swarm = ParticleSwarm(pso, seed=seed, stream=phase, workers=workers)
    best, value = swarm.minimize(objective, beta_to_vector(beta_prev), radius, seeds=[beta_to_vector(seeded)])
    logger.info(f"NS update {phase}: cost {swarm.history[0]:.6e} -> {value:.6e} over {len(beta_prev)} modes")
    return vector_to_beta(best), value
