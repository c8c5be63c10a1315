import numpy as np
import pytest

from atomdb.atom_database import AtomDatabase, IncidenceKey
from atomdb.substrate_model import SubstrateModel, generate_synthetic_db
from scenario.ems_grid import EmsGrid
from scenario.incident_wave import IncidentWave
from scenario.observation import AngularGrid, build_observation
from scenario.scenario import Scenario

FREQUENCY_HZ = 5.5e9
CELL_M = 0.02725


@pytest.fixture
def broadside_wave():
    """Broadside TE wave of unit amplitude at 5.5 GHz."""
    return IncidentWave(frequency_hz=FREQUENCY_HZ)


@pytest.fixture
def paper_db():
    """Synthetic database of the lossy reference substrate."""
    model = SubstrateModel.from_preset("paper")
    return generate_synthetic_db(model, CELL_M, 1e-4, IncidenceKey(0.0, 0.0, FREQUENCY_HZ))


@pytest.fixture
def tiny_db():
    """Five-entry passive database with distinct currents."""
    descriptors = [0.0, 1e-3, 2e-3, 3e-3, 4e-3]
    gammas = [0.3 * np.exp(1j * 0.4), 0.9 * np.exp(1j * 2.0), 0.5 * np.exp(-1j * 1.2),
              0.95 * np.exp(1j * 3.0), 0.7 * np.exp(-1j * 2.6)]
    return AtomDatabase(IncidenceKey(0.0, 0.0, FREQUENCY_HZ), descriptors, gammas, gammas,
                        step_m=1e-3, cell_size_m=5e-3, name="tiny")


def make_scenario(p, q, theta_deg=(1.0, 33.0), phi_deg=(-180.0, 175.0), theta_count=33, phi_count=72):
    observation = build_observation(AngularGrid(
        theta_range_rad=tuple(np.deg2rad(theta_deg)),
        phi_range_rad=tuple(np.deg2rad(phi_deg)),
        theta_count=theta_count,
        phi_count=phi_count,
    ))
    return Scenario(
        wave=IncidentWave(frequency_hz=FREQUENCY_HZ),
        grid=EmsGrid(p, q, CELL_M),
        observation=observation,
    )


@pytest.fixture
def small_scenario():
    """6x6 skin observed on a coarse angular grid."""
    return make_scenario(6, 6, theta_count=12, phi_count=24, phi_deg=(-180.0, 165.0))


@pytest.fixture
def scenario_factory():
    """Builds angular-grid scenarios of any aperture."""
    return make_scenario
