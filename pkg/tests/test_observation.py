import numpy as np
import pytest

from scenario.ems_grid import EmsGrid
from scenario.observation import AngularGrid, FloorPlane, build_observation, nearest_sample
from scenario.scenario import Scenario


def test_grid_centers_regular_and_centered():
    """Atom centres form a centred lattice with the cell spacing."""
    grid = EmsGrid(3, 4, 0.01)
    centers = grid.centers()
    assert centers.shape == (12, 3)
    np.testing.assert_allclose(centers.mean(axis=0), 0.0, atol=1e-15)
    np.testing.assert_allclose(centers[1] - centers[0], [0.0, 0.01, 0.0])
    np.testing.assert_allclose(centers[4] - centers[0], [0.01, 0.0, 0.0])
    assert grid.aperture_m == pytest.approx((0.03, 0.04))


def test_grid_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        EmsGrid(0, 3, 0.01)
    with pytest.raises(ValueError):
        EmsGrid(3, 3, -0.01)


def test_angular_single_sample():
    """One sample at (30, -45) deg."""
    obs = build_observation(AngularGrid((np.deg2rad(30), np.deg2rad(30)), (np.deg2rad(-45), np.deg2rad(-45)), 1, 1))
    assert obs.sample_count == 1
    np.testing.assert_allclose(obs.directions[0], [0.35355339, -0.35355339, 0.8660254], atol=1e-8)
    assert obs.distances[0] == 1.0


def test_angular_sample_count_and_order():
    """M is the product of counts; theta is the slow index."""
    obs = build_observation(AngularGrid((0.0, 0.5), (-1.0, 1.0), 4, 5))
    assert obs.sample_count == 20
    assert obs.shape == (4, 5)
    coords = obs.sample_coordinates()
    assert coords[1, 0] == coords[0, 0]
    assert coords[5, 0] > coords[0, 0]
    np.testing.assert_allclose(np.linalg.norm(obs.directions, axis=1), 1.0)


def test_angular_rejects_lower_hemisphere():
    with pytest.raises(ValueError, match="theta must lie"):
        build_observation(AngularGrid((0.0, 2.0), (0.0, 1.0), 3, 3))


def test_angular_rejects_empty_range():
    with pytest.raises(ValueError, match="empty"):
        build_observation(AngularGrid((0.5, 0.1), (0.0, 1.0), 3, 3))


def test_floor_plane_distances():
    """Samples on a floor 5 m below the skin are at least 5 m away."""
    obs = build_observation(FloorPlane((-0.5, 0.5), (1.0, 2.0), 2, 2, 5.0))
    assert obs.sample_count == 4
    assert np.all(obs.distances >= 5.0)
    np.testing.assert_allclose(np.linalg.norm(obs.directions, axis=1), 1.0)
    np.testing.assert_allclose(obs.positions[:, 1], -5.0)
    assert np.all(obs.directions[:, 2] > 0)


def test_build_observation_is_deterministic():
    spec = AngularGrid((0.1, 0.6), (-3.0, 3.0), 7, 9)
    first, second = build_observation(spec), build_observation(spec)
    np.testing.assert_array_equal(first.directions, second.directions)


def test_nearest_sample_angular():
    obs = build_observation(AngularGrid((np.deg2rad(1), np.deg2rad(33)), (-np.pi, np.deg2rad(175)), 33, 72))
    index = nearest_sample(obs, np.deg2rad(30), np.deg2rad(-45))
    np.testing.assert_allclose(np.rad2deg(obs.sample_coordinates()[index]), [30.0, -45.0], atol=1e-9)


def test_scenario_from_config_half_wavelength_cell():
    """A null cell size means half a wavelength."""
    scenario = Scenario.from_config({
        "frequency_hz": 5.5e9,
        "incidence": {"theta_deg": 0.0, "phi_deg": 0.0, "e_te": [1.0, 0.0], "e_tm": [0.0, 0.0]},
        "grid": {"p": 5, "q": 5, "cell_size_m": None, "center_height_m": 0.0},
        "observation": {"kind": "angular", "theta_deg": [0.0, 30.0], "phi_deg": [0.0, 90.0],
                        "theta_count": 4, "phi_count": 3},
    })
    assert scenario.grid.cell_size_m == pytest.approx(scenario.wave.wavelength / 2)
    assert scenario.observation.sample_count == 12
    np.testing.assert_allclose(scenario.basis.e_te_hat, [0.0, 1.0, 0.0])


def test_scenario_floor_lies_skin_height_below():
    """The floor plane sits center_height_m below the skin centre."""
    scenario = Scenario.from_config({
        "frequency_hz": 5.5e9,
        "incidence": {"theta_deg": 0.0, "phi_deg": 0.0, "e_te": [1.0, 0.0], "e_tm": [0.0, 0.0]},
        "grid": {"p": 5, "q": 5, "cell_size_m": None, "center_height_m": 10.0},
        "observation": {"kind": "floor", "x_m": [-1.0, 1.0], "y_m": [2.0, 4.0], "x_count": 3, "y_count": 2},
    })
    obs = scenario.observation
    assert obs.kind.floor_height_m == 10.0
    np.testing.assert_allclose(obs.positions[:, 1], -10.0)
    assert np.all(obs.distances >= 10.0)
