import numpy as np
import pytest

from forward.radiation_operator import RadiationOperator, adjoint_radiate, assemble_operator, radiate
from scenario.ems_grid import EmsGrid
from scenario.observation import AngularGrid, build_observation

K0 = 2 * np.pi * 5.5e9 / 299792458.0
CELL_M = 0.02725


@pytest.fixture
def angular_obs():
    return build_observation(AngularGrid((0.0, np.deg2rad(60.0)), (-np.pi, np.deg2rad(170.0)), 13, 36))


def test_single_atom_entry(angular_obs):
    """A lone atom at the origin radiates the bare spreading factor."""
    op = assemble_operator(EmsGrid(1, 1, CELL_M), angular_obs, K0)
    expected = 1j * K0 / (4 * np.pi) * np.exp(-1j * K0) * CELL_M ** 2
    np.testing.assert_allclose(op.matrix[:, 0], expected, rtol=1e-12)


def test_cell_area_scaling(angular_obs):
    small = assemble_operator(EmsGrid(1, 1, CELL_M), angular_obs, K0)
    large = assemble_operator(EmsGrid(1, 1, 2 * CELL_M), angular_obs, K0)
    np.testing.assert_allclose(large.matrix, 4 * small.matrix, rtol=1e-12)


def test_symmetric_pair_array_factor(angular_obs):
    """Two in-phase atoms at +-d/2 along y give 2 cos(k0 d/2 sin(theta) sin(phi))."""
    op = assemble_operator(EmsGrid(1, 2, CELL_M), angular_obs, K0)
    field = radiate(op, np.ones((2, 2)))[:, 1]
    single = 1j * K0 / (4 * np.pi) * np.exp(-1j * K0) * CELL_M ** 2
    factor = 2 * np.cos(K0 * CELL_M / 2 * angular_obs.directions[:, 1])
    np.testing.assert_allclose(field, single * factor, rtol=1e-10, atol=1e-15)


def test_uniform_array_peaks_broadside(angular_obs):
    op = assemble_operator(EmsGrid(3, 3, CELL_M), angular_obs, K0)
    current = np.tile([0.0, 1.0], (9, 1))
    power = np.abs(radiate(op, current)[:, 1])
    broadside = power[angular_obs.directions[:, 2] > 1 - 1e-12]
    np.testing.assert_allclose(broadside, 9 * K0 / (4 * np.pi) * CELL_M ** 2, rtol=1e-12)
    assert np.max(power) == pytest.approx(broadside[0])


def dirichlet(count, psi):
    half = np.sin(psi / 2)
    safe = np.where(np.abs(half) < 1e-12, 1.0, half)
    return np.where(np.abs(half) < 1e-12, float(count), np.sin(count * psi / 2) / safe)


@pytest.mark.parametrize("size", [3, 7])
def test_uniform_current_matches_closed_form_array_factor(angular_obs, size):
    """Uniform current on a size x size skin radiates the product of two Dirichlet kernels."""
    op = assemble_operator(EmsGrid(size, size, CELL_M), angular_obs, K0)
    field = radiate(op, np.tile([0.0, 1.0], (size * size, 1)))

    psi_x = K0 * CELL_M * angular_obs.directions[:, 0]
    psi_y = K0 * CELL_M * angular_obs.directions[:, 1]
    single = 1j * K0 / (4 * np.pi) * np.exp(-1j * K0) * CELL_M ** 2
    expected = single * dirichlet(size, psi_x) * dirichlet(size, psi_y)
    assert np.linalg.norm(field[:, 1] - expected) <= 1e-10 * np.linalg.norm(expected)
    np.testing.assert_array_equal(field[:, 0], 0.0)


def test_radiate_is_linear(angular_obs):
    rng = np.random.default_rng(3)
    op = assemble_operator(EmsGrid(3, 2, CELL_M), angular_obs, K0)
    a = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    b = rng.normal(size=(6, 2)) + 1j * rng.normal(size=(6, 2))
    c = 0.4 - 2.1j
    np.testing.assert_allclose(radiate(op, a + c * b), radiate(op, a) + c * radiate(op, b), atol=1e-14)


def test_adjoint_identity(angular_obs):
    """<A j, e> equals <j, A^H e> under the plain inner products."""
    rng = np.random.default_rng(11)
    op = assemble_operator(EmsGrid(4, 3, CELL_M), angular_obs, K0)
    j = rng.normal(size=(12, 2)) + 1j * rng.normal(size=(12, 2))
    e = rng.normal(size=(op.sample_count, 2)) + 1j * rng.normal(size=(op.sample_count, 2))
    lhs = np.vdot(e, radiate(op, j))
    rhs = np.vdot(adjoint_radiate(op, e), j)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_workers_do_not_change_matrix():
    obs = build_observation(AngularGrid((0.0, 1.2), (-np.pi, 3.0), 30, 40))
    serial = assemble_operator(EmsGrid(5, 5, CELL_M), obs, K0, workers=1)
    threaded = assemble_operator(EmsGrid(5, 5, CELL_M), obs, K0, workers=4)
    np.testing.assert_array_equal(serial.matrix, threaded.matrix)


def test_operator_is_read_only(angular_obs):
    op = assemble_operator(EmsGrid(2, 2, CELL_M), angular_obs, K0)
    assert op.shape == (angular_obs.sample_count, 4)
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 0.0


def test_shape_mismatch_raises(angular_obs):
    op = assemble_operator(EmsGrid(2, 2, CELL_M), angular_obs, K0)
    with pytest.raises(ValueError, match="operator expects 4"):
        op.radiate(np.zeros((3, 2)))
    with pytest.raises(ValueError, match="Field has 5 samples"):
        op.adjoint_radiate(np.zeros((5, 2)))


def test_invalid_inputs(angular_obs):
    with pytest.raises(ValueError, match="Wavenumber must be positive"):
        assemble_operator(EmsGrid(2, 2, CELL_M), angular_obs, 0.0)
    with pytest.raises(ValueError, match="must be 2-D"):
        RadiationOperator(np.zeros(4))
