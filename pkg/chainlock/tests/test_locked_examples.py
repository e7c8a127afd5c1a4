"""
test_locked_examples.py
"""
import numpy as np
import pytest

from chainlock.chain_model import ChainError, is_simple, lift, make_chain, random_simple_planar_chain, regular_polygon
from chainlock.motion import apply, validate
from chainlock.locked_examples import (STRAIGHT_TOL, KnotError, NeedleParams, complete_exterior, doubled,
                                       endpoint_exclusion_check, figure_eight, knot_determinant, knot_diagram,
                                       knot_diagrams, make_knitting_needles, make_locked_closed,
                                       random_straighten_attempt, standard_trefoil, turning)


def test_needles_chain():
    params = NeedleParams()
    needles = make_knitting_needles(params)
    assert needles.num_vertices == 6 and not needles.closed
    assert np.allclose(needles.link_lengths(), params.lengths)
    assert np.allclose(needles.vertices[1], 0.)
    assert is_simple(needles, tol=0.05)
    # the cord stays inside the ball, the needle tips outside
    distances = np.linalg.norm(needles.vertices, axis=1)
    assert np.all(distances[2:5] <= params.r)
    assert distances[0] > params.r and distances[5] > params.r


@pytest.mark.parametrize("changes", [
    {'l4': 3.},
    {'l0': 2.},
    {'r': 2.},
    {'l1': 0.},
])
def test_needle_params_rejected(changes):
    with pytest.raises(ChainError):
        NeedleParams(**changes)


def test_needles_scale():
    base = make_knitting_needles()
    scaled = make_knitting_needles(NeedleParams().scaled(2.))
    assert np.allclose(scaled.vertices, 2. * base.vertices)


def test_endpoint_exclusion():
    report = endpoint_exclusion_check(trials=2000, seed=1)
    assert report.passed and report.violations == 0
    assert np.isclose(report.min_margin_first, 0.5)
    # |v_5 - v_1| >= l_4 - L
    assert report.min_margin_last >= 0.5 - 1e-12


def test_endpoint_exclusion_boundary():
    """with l_4 just above r + L the last margin can get arbitrarily close to zero"""
    params = NeedleParams(l4=6. + 1e-6)
    report = endpoint_exclusion_check(params, trials=500, seed=2)
    assert report.passed
    assert report.min_margin_last > 0.


def test_doubled_needles_is_simple_and_unknotted():
    closed = make_locked_closed()
    assert closed.closed and closed.num_vertices == 12
    assert is_simple(closed)
    assert knot_determinant(closed) == 1


def test_doubling_rejects_bad_offsets():
    with pytest.raises(ChainError):
        make_locked_closed(offset=0.)
    with pytest.raises(ChainError):
        doubled(regular_polygon(5), 0.01)


def test_completed_needles_is_knotted():
    completed = complete_exterior(make_knitting_needles())
    assert completed.closed and completed.num_vertices == 9
    assert is_simple(completed)
    assert knot_determinant(completed) == 3


def test_completed_needles_diagram_from_above():
    diagram = knot_diagram(complete_exterior(make_knitting_needles()), (0., 0., 1.))
    assert len(diagram.crossings) == 3
    assert abs(diagram.writhe) == 3
    assert diagram.determinant() == 3


@pytest.mark.parametrize("polygon, expected", [
    (regular_polygon(6), 1),
    (standard_trefoil(96), 3),
    (figure_eight(128), 5),
])
def test_reference_determinants(polygon, expected):
    assert knot_determinant(polygon) == expected


def test_diagrams_use_distinct_directions():
    diagrams = knot_diagrams(standard_trefoil(), count=3)
    directions = np.array([d.direction for d in diagrams])
    assert len(diagrams) == 3
    assert not np.allclose(directions[0], directions[1]) and not np.allclose(directions[1], directions[2])


def test_knot_determinant_needs_closed_simple_chain():
    with pytest.raises(KnotError):
        knot_determinant(make_chain([(0, 0), (1, 1), (1, 0), (0, 1)], closed=True))
    with pytest.raises(KnotError):
        knot_diagram(make_knitting_needles(), (0., 0., 1.))


def test_complete_straight_chain():
    completed = complete_exterior(make_chain([(0, 0, 0), (1, 0, 0), (2, 0, 0)]))
    assert is_simple(completed)
    assert knot_determinant(completed) == 1
    with pytest.raises(ChainError):
        complete_exterior(regular_polygon(4))


def test_turning():
    assert np.isclose(turning(make_chain([(0, 0), (1, 0), (2, 0)])), 0.)
    assert np.isclose(turning(make_chain([(0, 0), (1, 0), (1, 1)])), np.pi / 2.)


def test_random_straighten_straight_chain():
    attempt = random_straighten_attempt(make_chain([(0, 0), (1, 0), (2, 0), (3, 0)]), budget=10)
    assert attempt.straightened
    assert attempt.proposals == 0 and attempt.accepted == 0


def test_random_straighten_reduces_turning():
    chain = random_simple_planar_chain(4, seed=7)
    attempt = random_straighten_attempt(chain, budget=200, seed=7)
    assert attempt.best < attempt.initial
    assert attempt.accepted >= 1
    assert validate(attempt.plan).certified
    assert np.isclose(turning(apply(attempt.plan)), attempt.best)


@pytest.mark.parametrize("params", [NeedleParams(), NeedleParams(l0=4.5, l4=7.5, r=4.)])
def test_endpoint_exclusion_full_trials(params):
    report = endpoint_exclusion_check(params, trials=10**4, seed=3)
    assert report.trials == 10**4
    assert report.violations == 0
    assert report.min_margin_first >= params.l0 - params.r - 1e-12
    assert report.min_margin_last >= params.l4 - params.cord - params.r - 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_random_straighten_needles_vs_control(seed):
    """greedy unbending stalls on the needles but straightens an unlocked chain of the same size"""
    needles = random_straighten_attempt(make_knitting_needles(), budget=300, seed=seed)
    assert not needles.straightened
    assert validate(needles.plan).certified
    control = lift(random_simple_planar_chain(5, seed=seed), 0.1, seed=seed)
    attempt = random_straighten_attempt(control, seed=seed)
    assert attempt.straightened, (attempt.initial, attempt.best)
    assert validate(attempt.plan).certified
    assert turning(apply(attempt.plan)) < STRAIGHT_TOL
