import math

import numpy as np
import pytest

import graphsync as gs
from graphsync.errors import BoundarySingularityError, DimensionError, DomainError

ENTROPY_POTENTIALS = [
    gs.ShannonPotential(),
    gs.RenyiPotential(alpha=2.0),
    gs.RenyiPotential(alpha=0.5),
    gs.TsallisPotential(q=2.0),
    gs.TsallisPotential(q=3.0),
]


def test_kuramoto_values():
    pot = gs.KuramotoQuadratic(kappa=1.0)
    assert gs.potential_value(pot, [1.0, 0.0, 0.0]) == pytest.approx(-0.5)
    np.testing.assert_allclose(
        gs.potential_grad(gs.KuramotoQuadratic(2.0), [0.5, 0.3, 0.2]),
        [-1.0, -0.6, -0.4],
    )
    np.testing.assert_allclose(
        gs.potential_hess(pot, [0.2, 0.3, 0.5]), -np.eye(3)
    )


def test_kuramoto_reduction_consistency():
    pot = gs.KuramotoQuadratic(kappa=1.5)
    for r in [0.1, 0.5, 0.8]:
        rho = np.array([r, 1 - r])
        assert pot.value_r(r) == pytest.approx(pot.value(rho))
        g = pot.grad(rho)
        assert pot.grad_r(r) == pytest.approx(g[0] - g[1])


def test_shannon_values():
    sh = gs.ShannonPotential()
    assert gs.potential_value(sh, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert gs.potential_grad(sh, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert gs.potential_grad(sh, 0.75) == pytest.approx(math.log(3.0))
    assert gs.potential_hess(sh, 0.5) == pytest.approx(4.0)
    # 0 log 0 = 0 at the corners
    assert sh.value_r(0.0) == pytest.approx(math.log(2.0))
    assert sh.value_r(1.0) == pytest.approx(math.log(2.0))


def test_tsallis_plug_in():
    assert gs.TsallisPotential(q=2.0).value_r(1.0) == pytest.approx(0.5)


def test_renyi_hessian_against_second_difference():
    pot = gs.RenyiPotential(alpha=2.0)
    h = 1e-5
    fd = (pot.value_r(0.5 + h) - 2 * pot.value_r(0.5) + pot.value_r(0.5 - h)) / h**2
    assert pot.hess_r(0.5) == pytest.approx(fd, rel=1e-5)
    assert pot.hess_r(0.5) == pytest.approx(8.0, rel=1e-12)


@pytest.mark.parametrize("pot", ENTROPY_POTENTIALS, ids=repr)
def test_entropy_gradient_matches_central_difference(pot):
    h = 1e-6
    for r in [0.05, 0.2, 0.5, 0.8, 0.95]:
        fd = (pot.value_r(r + h) - pot.value_r(r - h)) / (2 * h)
        assert pot.grad_r(r) == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("pot", ENTROPY_POTENTIALS, ids=repr)
def test_entropy_symmetry_and_positivity(pot):
    grid = np.linspace(0.0, 1.0, 101)
    vals = pot.value_r(grid)
    np.testing.assert_allclose(vals, vals[::-1], atol=1e-12)
    assert np.min(vals) >= -1e-15
    assert pot.value_r(0.5) == pytest.approx(0.0, abs=1e-15)
    off_half = np.abs(grid - 0.5) > 1e-9
    assert np.min(vals[off_half]) > 0.0


@pytest.mark.parametrize("r", [0.1, 0.3, 0.7, 0.9])
def test_renyi_limit_to_shannon(r):
    sh = gs.ShannonPotential().value_r(r)
    for alpha in (1.0 - 1e-4, 1.0 + 1e-4):
        assert abs(gs.RenyiPotential(alpha=alpha).value_r(r) - sh) < 1e-3


@pytest.mark.parametrize("r", [0.1, 0.3, 0.7, 0.9])
def test_tsallis_limit_to_shannon(r):
    sh = gs.ShannonPotential().value_r(r)
    assert abs(gs.TsallisPotential(q=1.0 + 1e-4).value_r(r) - sh) < 1e-3


def test_boundary_gradients_raise():
    with pytest.raises(BoundarySingularityError):
        gs.ShannonPotential().grad_r(0.0)
    with pytest.raises(BoundarySingularityError):
        gs.RenyiPotential(alpha=0.5).grad_r(1.0)
    with pytest.raises(BoundarySingularityError):
        gs.TsallisPotential(q=1.5).hess_r(0.0)


def test_entropy_needs_two_nodes():
    with pytest.raises(DimensionError):
        gs.potential_value(gs.ShannonPotential(), [0.5, 0.3, 0.2])
    with pytest.raises(DomainError):
        gs.potential_value(gs.ShannonPotential(), [0.7, 0.7])


def test_bad_parameters_rejected():
    with pytest.raises(DomainError):
        gs.RenyiPotential(alpha=1.0)
    with pytest.raises(DomainError):
        gs.RenyiPotential(alpha=-0.5)
    with pytest.raises(DomainError):
        gs.RenyiPotential(alpha=0.0)  # degenerate: vanishes everywhere
    with pytest.raises(DomainError):
        gs.TsallisPotential(q=1.0)
    with pytest.raises(DomainError):
        gs.KuramotoQuadratic(kappa=0.0)


def test_potential_from_config():
    assert gs.potential_from_config({"kind": "kuramoto", "kappa": 2.0}) == gs.KuramotoQuadratic(2.0)
    assert gs.potential_from_config({"kind": "shannon"}) == gs.ShannonPotential()
    assert gs.potential_from_config({"kind": "renyi", "alpha": 2.0}) == gs.RenyiPotential(2.0)
    assert gs.potential_from_config({"kind": "tsallis", "q": 2.0}) == gs.TsallisPotential(2.0)
    with pytest.raises(DomainError):
        gs.potential_from_config({"kind": "gibbs"})
