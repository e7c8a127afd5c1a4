"""
test_motion.py
"""
import numpy as np
import pytest

from chainlock.geom_core import pair_clearances
from chainlock.chain_model import is_simple, make_chain, shape_classify, unit_square
from chainlock.motion import (DEFAULT_SAMPLES, CoupledLift, FourBarMove, Move, MoveError, MotionPlan, RigidMove,
                              SingleJointMove, SubchainRotation, ValidationPolicy, apply, configurations,
                              frame_clearances, pose_at, resample_check, sample_frames, validate, validate_move)


def _l_chain():
    return make_chain([(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0)])


def test_single_joint_move_pose():
    chain = _l_chain()
    move = SingleJointMove(joint=2, axis=(0., 0., 1.), side='suffix', angle=np.pi / 2.)
    moved = pose_at(move, chain, 1.)
    assert np.allclose(moved.vertices[3], [1., 2., 0.])
    assert np.allclose(moved.vertices[:3], chain.vertices[:3])
    half = pose_at(move, chain, 0.5)
    assert np.allclose(half.vertices[3], [1. + np.cos(np.pi / 4.), 1. + np.sin(np.pi / 4.), 0.])
    prefix = pose_at(SingleJointMove(joint=1, axis=(0., 0., 1.), side='prefix', angle=np.pi), chain, 1.)
    assert np.allclose(prefix.vertices[0], [2., 0., 0.])


def test_move_rejects_bad_input():
    with pytest.raises(MoveError):
        pose_at(SingleJointMove(joint=1, angle=0.1), _l_chain(), 1.5)
    with pytest.raises(MoveError):
        pose_at(SingleJointMove(joint=1, angle=0.1), unit_square(), 1.)
    with pytest.raises(MoveError):
        pose_at(SingleJointMove(joint=1, side='middle', angle=0.1), _l_chain(), 1.)
    with pytest.raises(MoveError):
        pose_at(FourBarMove(joints=(0, 2, 1, 3), angle=0.1), unit_square(), 1.)


def test_subchain_rotation_flips_vertex():
    square = unit_square()
    move = SubchainRotation(a=0, b=2, angle=np.pi)
    flipped = pose_at(move, square, 1.)
    # vertex 1 is mirrored through the diagonal
    assert np.allclose(flipped.vertices[1], [0., 1., 0.], atol=1e-12)
    assert np.allclose(flipped.vertices[[0, 2, 3]], square.vertices[[0, 2, 3]])
    top = pose_at(move, square, 0.5)
    assert np.isclose(abs(top.vertices[1, 2]), np.sqrt(0.5))


def test_coupled_lift_keeps_suffix_vertical():
    chain = make_chain([(0, 0, 0), (1, 0, 0), (1, 0, 1)])
    move = CoupledLift(joint=1, angle=np.pi / 2.)
    lifted = pose_at(move, chain, 1.)
    assert np.allclose(lifted.vertices, [[0., 0., 0.], [0., 0., 1.], [0., 0., 2.]])
    assert shape_classify(lifted) == 'straight'
    with pytest.raises(MoveError):
        pose_at(move, _l_chain(), 0.5)


@pytest.mark.parametrize("driver", ['first', 'last'])
def test_four_bar_parallelogram(driver):
    """driving either side of a square shears it into the same parallelogram"""
    square = unit_square()
    move = FourBarMove(joints=(0, 1, 2, 3), angle=0.2, driver=driver)
    moved = pose_at(move, square, 1.)
    c, s = np.cos(0.2), np.sin(0.2)
    assert np.allclose(moved.vertices[1], [c, s, 0.])
    assert np.allclose(moved.vertices[2], [c, 1. + s, 0.])
    assert np.allclose(moved.vertices[[0, 3]], square.vertices[[0, 3]])
    lengths = np.linalg.norm(np.roll(moved.vertices, -1, axis=0) - moved.vertices, axis=1)
    assert np.allclose(lengths, 1.)


def test_four_bar_unreachable():
    quad = make_chain([(0, 0), (2, 0), (2, 1), (1, 1)], closed=True)
    move = FourBarMove(joints=(0, 1, 2, 3), angle=np.pi)
    assert pose_at(move, quad, 0.) is not None
    with pytest.raises(MoveError):
        pose_at(move, quad, 1.)


def test_rigid_move():
    chain = _l_chain()
    move = RigidMove(center=(0., 0., 0.), axis=(0., 0., 1.), angle=np.pi, translation=(0., 0., 1.))
    moved = pose_at(move, chain, 1.)
    assert np.allclose(moved.vertices[3], [-2., -1., 1.])


def test_validate_certifies_plan():
    plan = MotionPlan(unit_square(), [FourBarMove(joints=(0, 1, 2, 3), angle=0.2),
                                      SubchainRotation(a=1, b=3, angle=0.5)])
    report = validate(plan)
    assert report.certified
    assert report.failure is None
    assert len(report.records) == 2
    assert 0. < report.min_clearance <= 1.
    assert report.max_drift < 1e-9
    assert resample_check(plan, 16) > 0.
    assert all(r.margin > 0. for r in report.records)


def test_validate_rejects_collision():
    """folding the last link back onto its neighbour is caught"""
    chain = make_chain([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0)])
    plan = MotionPlan(chain, [SingleJointMove(joint=2, axis=(0., 0., 1.), side='suffix', angle=np.pi / 2.)])
    report = validate(plan)
    assert not report.certified
    assert "move 0" in report.failure
    assert not report.records[0].passed


def test_validate_move_respects_tolerance():
    square = unit_square()
    move = SubchainRotation(a=0, b=2, angle=0.1)
    assert validate_move(move, square).passed
    assert not validate_move(move, square, ValidationPolicy(tol=2.)).passed


def test_configurations_and_apply():
    square = unit_square()
    moves = [SubchainRotation(a=0, b=2, angle=0.3), SubchainRotation(a=0, b=2, angle=-0.3)]
    plan = MotionPlan(square, moves)
    assert len(configurations(plan)) == 3
    assert np.allclose(apply(plan).vertices, square.vertices)


def test_plan_dict_roundtrip():
    plan = MotionPlan(unit_square(), [FourBarMove(joints=(0, 1, 2, 3), angle=0.2, driver='last'),
                                      RigidMove(translation=(0., 0., 1.))])
    again = MotionPlan.from_dict(plan.to_dict())
    assert again.moves == plan.moves
    assert np.array_equal(again.initial.vertices, plan.initial.vertices)
    with pytest.raises(MoveError):
        Move.from_dict({'kind': 'teleport'})
    with pytest.raises(MoveError):
        Move.from_dict({'kind': 'rigid', 'speed': 2.})


def test_sample_frames():
    plan = MotionPlan(unit_square(), [SubchainRotation(a=0, b=2, angle=0.3), RigidMove(translation=(1., 0., 0.))])
    frames = sample_frames(plan, per_move=4)
    assert len(frames.times) == 9
    assert np.allclose(frames.times, np.linspace(0., 2., 9))
    assert np.allclose(frames.configs[-1].vertices, apply(plan).vertices)
    data = frames.to_dict()
    assert len(data['frames']) == 9 and data['frames'][4]['t'] == 1.


def _pentagon_with_pocket():
    return make_chain([(0, 0), (4, 0), (4, 4), (2, 1), (0, 4)], closed=True)


CROSSING_MOTIONS = {
    'suffix-folds-onto-neighbour': (make_chain([(0, 0), (2, 0), (2, 1), (1, 1)]),
                                    SingleJointMove(joint=2, axis=(0., 0., 1.), side='suffix', angle=np.pi / 2.)),
    'prefix-folds-onto-neighbour': (make_chain([(1, 1), (2, 1), (2, 0), (0, 0)]),
                                    SingleJointMove(joint=1, axis=(0., 0., 1.), side='prefix', angle=np.pi / 2.)),
    'suffix-sweeps-across-first-edge': (make_chain([(0, 0), (2, 0), (2, 2), (-1, 2)]),
                                        SingleJointMove(joint=2, axis=(0., 0., 1.), side='suffix',
                                                        angle=np.pi / 3.)),
    'suffix-swings-up-through-edge': (make_chain([(1, -1, 1), (1, 1, 1), (0, 1, 0), (0, 0, 0), (2, 0, 0)]),
                                      SingleJointMove(joint=3, axis=(0., 1., 0.), side='suffix',
                                                      angle=-np.pi / 2.)),
    'dart-flipped-about-wrong-diagonal': (make_chain([(0, 0), (4, 0), (2, 1), (2, 4)], closed=True),
                                          SubchainRotation(a=0, b=2, angle=np.pi)),
    'square-flipped-onto-itself': (unit_square(), SubchainRotation(a=0, b=2, angle=np.pi)),
    'pentagon-flipped-about-wrong-chord': (_pentagon_with_pocket(), SubchainRotation(a=1, b=3, angle=np.pi)),
    'open-corner-flipped-onto-start': (make_chain([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)]),
                                       SubchainRotation(a=1, b=3, angle=np.pi)),
    'lifted-link-hits-overhead-edge': (make_chain([(0.5, -1, 0.5), (0.5, 1, 0.5), (0, 0, 0), (1, 0, 0), (1, 0, 1)]),
                                       CoupledLift(joint=3, angle=np.pi / 2.)),
    'lifted-suffix-hits-overhead-edge': (make_chain([(0.8, -1, 1.2), (0.8, 1, 1.2), (0, 0, 0), (1, 0, 0),
                                                     (1, 0, 1)]),
                                         CoupledLift(joint=3, angle=np.pi / 2.)),
}


@pytest.mark.parametrize("name", sorted(CROSSING_MOTIONS))
def test_crossing_motions_rejected(name):
    chain, move = CROSSING_MOTIONS[name]
    assert is_simple(chain)
    report = validate(MotionPlan(chain, [move]))
    assert not report.certified
    assert "move 0" in report.failure


def _turn_about(before, after, origin, axis):
    """signed rotation taking `before` to `after` about the line origin + s*axis"""
    a = np.asarray(axis, dtype=float) / np.linalg.norm(axis)
    u, w = before - origin, after - origin
    u, w = u - (u @ a) * a, w - (w @ a) * a
    return float(np.arctan2(np.cross(u, w) @ a, u @ w))


def _inclination(link):
    return float(np.arctan2(link[2], np.hypot(link[0], link[1])))


MOVE_KINDS = {
    'single-joint': (_l_chain(), SingleJointMove(joint=2, axis=(0.3, -0.2, 1.), side='suffix', angle=1.2),
                     lambda V0, V: [_turn_about(V0[3], V[3], V0[2], (0.3, -0.2, 1.))]),
    'subchain-about-line': (unit_square(), SubchainRotation(a=0, b=2, angle=0.8),
                            lambda V0, V: [_turn_about(V0[1], V[1], V0[0], V0[2] - V0[0])] * 2),
    'coupled-lift': (make_chain([(0, 0, 0), (1, 0, -0.2), (1, 0, 0.8)]), CoupledLift(joint=1, angle=1.7),
                     lambda V0, V: [_inclination(V[1] - V[0]), np.pi / 2. + _inclination(V[1] - V[0])]),
    'four-bar': (unit_square(), FourBarMove(joints=(0, 1, 2, 3), angle=0.4),
                 lambda V0, V: [_turn_about(V0[1], V[1], V0[0], (0., 0., 1.)), 0.,
                                _turn_about(V0[2], V[2], V0[3], (0., 0., 1.))]),
    'rigid': (_l_chain(), RigidMove(center=(1., 1., 0.), axis=(1., 1., 1.), angle=2., translation=(0., 1., 0.)),
              lambda V0, V: []),
}


@pytest.mark.parametrize("kind", sorted(MOVE_KINDS))
def test_moves_preserve_link_lengths(kind):
    chain, move, _ = MOVE_KINDS[kind]
    rng = np.random.default_rng(11)
    for t in rng.uniform(0., 1., 100):
        V = pose_at(move, chain, float(t)).vertices
        ends = np.roll(V, -1, axis=0) if chain.closed else V[1:]
        lengths = np.linalg.norm(ends[:chain.num_edges] - V[:chain.num_edges], axis=1)
        assert np.allclose(lengths, chain.link_lengths(), rtol=1e-12, atol=0.)


@pytest.mark.parametrize("kind", sorted(MOVE_KINDS))
def test_joint_angles_monotone_and_measured(kind):
    """the driven joint angles match the poses and change monotonically in t"""
    chain, move, measure = MOVE_KINDS[kind]
    ts = np.sort(np.random.default_rng(12).uniform(0., 1., 100))
    start = np.asarray(move.joint_angles(chain, 0.), dtype=float)
    series = []
    for t in ts:
        driven = np.asarray(move.joint_angles(chain, float(t)), dtype=float)
        measured = np.asarray(measure(chain.vertices, pose_at(move, chain, float(t)).vertices), dtype=float)
        if kind == 'coupled-lift':
            assert np.allclose(driven, measured, atol=1e-9)
        else:
            assert np.allclose(driven - start, measured, atol=1e-9)
        series.append(driven)
    series = np.array(series)
    for column in series.T:
        steps = np.diff(column)
        assert np.all(steps >= -1e-12) or np.all(steps <= 1e-12)


@pytest.mark.parametrize("kind", sorted(MOVE_KINDS))
def test_poses_match_pose(kind):
    chain, move, _ = MOVE_KINDS[kind]
    ts = np.linspace(0., 1., 7)
    batch = move.poses(chain, ts)
    assert batch.shape == (7, chain.num_vertices, 3)
    for t, frame in zip(ts, batch):
        assert np.allclose(frame, pose_at(move, chain, float(t)).vertices, atol=1e-12)


@pytest.mark.parametrize("kind", sorted(MOVE_KINDS))
def test_frame_clearances_match_full_measure(kind):
    """skipping the pairs a move keeps rigid does not change the clearance"""
    chain, move, _ = MOVE_KINDS[kind]
    ts = np.linspace(0., 1., 9)
    frames = move.poses(chain, ts)
    clearances, witnesses = frame_clearances(move, chain, frames)
    for frame, clearance, witness in zip(frames, clearances, witnesses):
        pairs, full = pair_clearances(frame, chain.closed)
        assert np.isclose(clearance, full.min(), rtol=1e-9, atol=1e-12)
        assert np.isclose(full[pairs.index(witness)], full.min(), rtol=1e-9, atol=1e-12)


def test_validate_move_grid_then_adaptive():
    """a move that ends close to a contact is finished by the adaptive walk"""
    chain = make_chain([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0)])
    easy = validate_move(SubchainRotation(a=0, b=3, angle=0.1), chain)
    assert easy.passed and easy.samples == DEFAULT_SAMPLES + 1
    close = validate_move(SingleJointMove(joint=2, axis=(0., 0., 1.), side='suffix', angle=0.45 * np.pi), chain)
    assert close.passed
    assert close.samples > DEFAULT_SAMPLES + 1
    assert 0. < close.min_clearance < 0.02


@pytest.mark.parametrize("fields, message", [
    ({'joint': 'x'}, "joint"),
    ({'joint': 1.5}, "integer"),
    ({'joint': True}, "joint"),
    ({'angle': float('nan')}, "finite"),
    ({'axis': [0., 1.]}, "3 entries"),
    ({'axis': [0., 'up', 1.]}, "axis"),
    ({'side': 3}, "string"),
])
def test_move_from_dict_checks_types(fields, message):
    data = {'kind': 'single-joint', 'joint': 1, 'axis': [0., 0., 1.], 'side': 'suffix', 'angle': 0.5}
    data.update(fields)
    with pytest.raises(MoveError, match=message):
        Move.from_dict(data)


def test_move_from_dict_coerces_numbers():
    move = Move.from_dict({'kind': 'single-joint', 'joint': 2.0, 'axis': [0, 0, 1], 'side': 'prefix', 'angle': 1})
    assert move == SingleJointMove(joint=2, axis=(0., 0., 1.), side='prefix', angle=1.)
    assert isinstance(move.joint, int) and isinstance(move.axis[2], float)
    with pytest.raises(MoveError, match="missing fields"):
        Move.from_dict({'kind': 'coupled-lift', 'joint': 1})
    with pytest.raises(MoveError):
        MotionPlan.from_dict({'initial': {'closed': False, 'vertices': [[0, 0], [1, 0]]}, 'moves': {}})
