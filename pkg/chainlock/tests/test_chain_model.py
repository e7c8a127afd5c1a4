"""
test_chain_model.py
"""
import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from chainlock.chain_model import (ChainConfig, ChainError, ProjectionError, dart, is_simple, lift, make_chain,
                                   project, random_nonconvex_polygon, random_simple_planar_chain,
                                   random_simple_polygon, regular_polygon, shape_classify, SubchainRange, unit_square)


def test_make_chain_records_lengths():
    triangle = make_chain([(0, 0), (3, 0), (0, 4)], closed=True)
    assert triangle.num_vertices == 3 and triangle.num_edges == 3
    assert np.allclose(triangle.link_lengths(), [3., 5., 4.])
    assert np.isclose(triangle.perimeter(), 12.)
    assert np.allclose(triangle.vertices[:, 2], 0.)


@pytest.mark.parametrize("vertices, closed", [
    ([(0, 0)], False),
    ([(0, 0), (1, 0)], True),
    ([(0, 0), (0, 0), (1, 0)], False),
    ([(0, 0), (1, 0), (0, 0, np.inf)], False),
])
def test_make_chain_rejects(vertices, closed):
    with pytest.raises(ChainError):
        make_chain(vertices, closed)


def test_is_simple():
    assert is_simple(unit_square())
    bowtie = make_chain([(0, 0), (1, 1), (1, 0), (0, 1)], closed=True)
    result = is_simple(bowtie)
    assert not result
    assert result.witness == (0, 2)


def test_is_simple_margin():
    """links passing 5e-4 apart are simple only below that margin"""
    chain = make_chain([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0), (1, -1, 1e-3)])
    assert is_simple(chain)
    assert not is_simple(chain, tol=1e-2)


def test_shape_classify():
    assert shape_classify(make_chain([(0, 0, 0), (1, 1, 1), (2, 2, 2)])) == 'straight'
    assert shape_classify(make_chain([(0, 0), (1, 0), (1, 1)])) == 'other'
    assert shape_classify(unit_square()) == 'convex-planar'
    assert shape_classify(regular_polygon(7)) == 'convex-planar'
    assert shape_classify(dart()) == 'other'
    tilted = make_chain([(0, 0, 0), (1, 0, 0), (1, 1, 0.5), (0, 1, 0.)], closed=True)
    assert shape_classify(tilted) == 'other'


def test_joint_angles():
    angles = unit_square().joint_angles()
    assert np.allclose(angles, np.pi / 2.)
    straight = make_chain([(0, 0), (1, 0), (2, 0)])
    assert np.allclose(straight.joint_angles(), [np.pi])


def test_project_lifted_chain():
    planar = random_simple_planar_chain(6, seed=2)
    chain = lift(planar, 0.1, seed=2)
    flat, certificate = project(chain, (0., 0., 1.))
    assert certificate is not None
    assert np.allclose(flat.vertices[:, :2], planar.vertices[:, :2])
    assert np.allclose(flat.vertices[:, 2], 0.)
    assert certificate.min_projected_clearance > 0.


def test_project_not_simple():
    crossing = make_chain([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0), (1, -1, 1.)])
    _, certificate = project(crossing, (0., 0., 1.))
    assert certificate is None


def test_project_degenerate():
    chain = make_chain([(0, 0, 0), (1, 0, 0), (1, 1, 0)])
    with pytest.raises(ProjectionError):
        project(chain, (1., 0., 0.))


def test_config_dict_roundtrip():
    chain = lift(random_simple_planar_chain(4, seed=1), 0.2, seed=1)
    again = ChainConfig.from_dict(chain.to_dict())
    assert np.array_equal(again.vertices, chain.vertices)
    assert again.closed == chain.closed
    with pytest.raises(ChainError):
        ChainConfig.from_dict({'vertices': [[0, 0], [1, 0]]})


@pytest.mark.parametrize("seed", range(5))
def test_random_generators_simple(seed):
    assert is_simple(random_simple_planar_chain(10, seed=seed))
    polygon = random_simple_polygon(12, seed=seed)
    assert polygon.closed and is_simple(polygon)


def test_transformed_keeps_lengths():
    chain = random_simple_planar_chain(5, seed=3)
    c, s = np.cos(0.3), np.sin(0.3)
    moved = chain.transformed(np.array([[c, -s, 0.], [s, c, 0.], [0., 0., 1.]]), (1., 2., 3.))
    assert np.allclose(np.linalg.norm(np.diff(moved.vertices, axis=0), axis=1), chain.link_lengths())


def test_subchain_range():
    assert SubchainRange(1, 4).indices(6) == [1, 2, 3, 4]
    assert SubchainRange(1, 4, include_i=False, include_j=False).indices(6) == [2, 3]
    assert SubchainRange(4, 1).indices(6, closed=True) == [4, 5, 0, 1]
    assert SubchainRange(4, 5, include_i=False, include_j=False).indices(6) == []
    with pytest.raises(ChainError):
        SubchainRange(4, 1).indices(6)
    with pytest.raises(ChainError):
        SubchainRange(2, 6).indices(6)


def _rigid_motions(count, seed):
    rng = np.random.default_rng(seed)
    for rotation in Rotation.random(count, random_state=seed).as_matrix():
        yield rotation, rng.uniform(-10., 10., size=3)


@pytest.mark.parametrize("chain", [
    lift(random_simple_planar_chain(7, seed=3), 0.1, seed=3),
    random_simple_polygon(9, seed=2),
    make_chain([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0), (1, -1, 0)]),
])
def test_is_simple_invariant_under_rigid_motions(chain):
    base = is_simple(chain)
    for rotation, translation in _rigid_motions(5, seed=chain.num_vertices):
        moved = is_simple(chain.transformed(rotation, translation))
        assert bool(moved) == bool(base)
        assert np.isclose(moved.clearance, base.clearance, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("direction", [(0., 0., 1.), (0.1, -0.05, 1.), (1., 2., 3.)])
def test_project_idempotent(direction):
    chain = lift(random_simple_planar_chain(6, seed=9), 0.1, seed=9)
    planar, certificate = project(chain, direction)
    again, repeated = project(planar, (0., 0., 1.))
    assert np.array_equal(again.vertices, planar.vertices)
    assert (certificate is None) == (repeated is None)
    if certificate is not None:
        assert np.isclose(repeated.min_projected_clearance, certificate.min_projected_clearance)


@pytest.mark.parametrize("n", [4, 5, 6, 8, 12, 16])
def test_random_nonconvex_polygon(n):
    for seed in range(20):
        polygon = random_nonconvex_polygon(n, seed=seed)
        assert polygon.closed and polygon.num_vertices == n
        assert is_simple(polygon)
        assert shape_classify(polygon) == 'other'
        V = polygon.vertices[:, :2]
        before, after = V - np.roll(V, 1, axis=0), np.roll(V, -1, axis=0) - V
        turns = before[:, 0] * after[:, 1] - before[:, 1] * after[:, 0]
        assert np.sum(turns < 0.) >= max(1, n // 3)
    assert np.array_equal(random_nonconvex_polygon(8, seed=4).vertices, random_nonconvex_polygon(8, seed=4).vertices)


def test_random_nonconvex_polygon_needs_four_vertices():
    with pytest.raises(ChainError):
        random_nonconvex_polygon(3)
