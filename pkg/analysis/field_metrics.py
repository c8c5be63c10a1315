import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from scenario.observation import ObservationDomain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerMap:
    """Local power improvement of one design over another."""
    values: np.ndarray
    peak_value: float
    peak_index: int
    peak_location: Optional[Tuple[float, float]] = None

    def peak_location_deg(self) -> Optional[Tuple[float, float]]:
        if self.peak_location is None:
            return None
        return (float(np.rad2deg(self.peak_location[0])), float(np.rad2deg(self.peak_location[1])))


def field_magnitude(e):
    """
    Magnitude of a two-component field.

    Args:
        e: Field (M, 2)

    Returns:
        sqrt(|Ex|^2 + |Ey|^2) per sample
    """
    e = np.asarray(e)
    return np.sqrt(np.sum(np.abs(e) ** 2, axis=1))


def power_improvement_map(e_prime, e_doubleprime, obs: ObservationDomain = None) -> PowerMap:
    """
    Power improvement index (|E'|^2 - |E''|^2) / max |E''|^2.

    Args:
        e_prime: Field of the design under test (M, 2)
        e_doubleprime: Reference field (M, 2)
        obs: Observation domain, used to locate the peak

    Returns:
        PowerMap
    """
    power_prime = field_magnitude(e_prime) ** 2
    power_reference = field_magnitude(e_doubleprime) ** 2
    if power_prime.shape != power_reference.shape:
        raise ValueError(f"Field shapes differ: {power_prime.shape} vs {power_reference.shape}")
    reference_peak = np.max(power_reference)
    if reference_peak == 0:
        raise ValueError("Reference field is zero everywhere")

    values = (power_prime - power_reference) / reference_peak
    peak = int(np.argmax(values))
    location = None
    if obs is not None:
        location = tuple(float(v) for v in obs.sample_coordinates()[peak])
    return PowerMap(values=values, peak_value=float(values[peak]), peak_index=peak, peak_location=location)


def delta_e_db(e_prime, e_doubleprime, sample: int) -> float:
    """
    Field ratio 20 log10(|E'| / |E''|) at one sample.

    Args:
        e_prime: Field of the design under test (M, 2)
        e_doubleprime: Reference field (M, 2)
        sample: Sample index

    Returns:
        Ratio in dB
    """
    numerator = field_magnitude(np.asarray(e_prime)[sample:sample + 1])[0]
    denominator = field_magnitude(np.asarray(e_doubleprime)[sample:sample + 1])[0]
    if denominator == 0:
        raise ValueError(f"Reference field vanishes at sample {sample}")
    if numerator == 0:
        return float("-inf")
    return float(20.0 * np.log10(numerator / denominator))


def mean_power(e, mask) -> float:
    """
    Mean |E|^2 over the samples selected by a boolean mask.

    Raises:
        ValueError: If the mask selects no sample
    """
    mask = np.asarray(mask, dtype=bool)
    power = field_magnitude(e) ** 2
    if mask.shape != power.shape:
        raise ValueError(f"Mask shape {mask.shape} does not match {power.shape} samples")
    if not np.any(mask):
        raise ValueError("Mask selects no sample")
    return float(np.mean(power[mask]))


def _nearest_column(phi_values: np.ndarray, phi: float) -> Tuple[int, float]:
    gap = np.abs(np.angle(np.exp(1j * (phi_values - phi))))
    index = int(np.argmin(gap))
    return index, float(gap[index])


def field_cut(e, obs: ObservationDomain, phi_cut: float) -> List[Tuple[float, float]]:
    """
    Field magnitude along an azimuthal cut.

    Takes the phi column nearest phi_cut for positive theta and, when the
    grid holds it, the column nearest phi_cut + pi reported at negative theta.

    Args:
        e: Field (M, 2)
        obs: Angular observation domain
        phi_cut: Cut azimuth in radians

    Returns:
        (theta, magnitude) pairs with theta ascending
    """
    if not obs.is_angular:
        raise ValueError("Field cuts need an angular observation domain")
    magnitude = field_magnitude(e).reshape(obs.shape)
    theta, phi = obs.row_values, obs.column_values
    spacing = np.min(np.diff(phi)) if len(phi) > 1 else 0.0

    column, gap = _nearest_column(phi, phi_cut)
    if gap > max(spacing, 1e-9):
        raise ValueError(f"Cut at {np.rad2deg(phi_cut):.3f} deg lies outside the azimuth grid")
    if gap > 1e-9:
        logger.warning(f"Cut at {np.rad2deg(phi_cut):.3f} deg snapped to {np.rad2deg(phi[column]):.3f} deg")

    points = [(float(t), float(m)) for t, m in zip(theta, magnitude[:, column])]
    opposite, opposite_gap = _nearest_column(phi, phi_cut + np.pi)
    if len(phi) > 1 and opposite_gap <= spacing / 2 + 1e-9:
        points += [(-float(t), float(m)) for t, m in zip(theta, magnitude[:, opposite]) if t > 0]
    return sorted(points)


def map_frame(values, obs: ObservationDomain) -> pd.DataFrame:
    """Sample values as a grid frame: rows theta (or floor y), columns phi (or floor x)."""
    grid = np.asarray(values, dtype=float).reshape(obs.shape)
    return pd.DataFrame(grid, index=pd.Index(obs.row_values, name="row"), columns=obs.column_values)
