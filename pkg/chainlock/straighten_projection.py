"""
straighten_projection.py
straighten an open chain that has a simple orthogonal projection, in at most n moves
"""

#IMPORTS
import itertools

import numpy as np

from chainlock.geom_core import PlanningError, segment_distances
from chainlock.chain_model import ChainError, ProjectionError, is_simple, project
from chainlock.motion import CoupledLift, MotionPlan, RigidMove, SingleJointMove, pose_at

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.straighten_projection")
_logger.setLevel(logging.INFO)
###########################################

DEFAULT_BUDGET = 500


def candidate_directions(budget, seed=0):
    """+z, then the 26 axis/diagonal directions, then seeded random unit vectors"""
    yield np.array([0., 0., 1.])
    lattice = [np.array(d, dtype=float) for d in itertools.product((-1, 0, 1), repeat=3) if any(d)]
    for d in sorted(lattice, key=lambda d: (-d[2], tuple(-d))):
        yield d / np.linalg.norm(d)
    rng = np.random.default_rng(seed)
    for _ in range(max(budget - 27, 0)):
        d = rng.normal(size=3)
        yield d / np.linalg.norm(d)


def simple_projections(config, budget=DEFAULT_BUDGET, seed=0):
    """
    every candidate direction whose orthogonal projection of the chain is simple

    arguments
        config : ChainConfig
            open, simple chain
        budget : int
            number of candidate directions tried
        seed : int
            orders the random candidates
    yields
        direction : np.ndarray
        certificate : ProjectionCertificate
    """
    if config.closed:
        raise ChainError("projection straightening needs an open chain")
    if not is_simple(config):
        raise ChainError("input chain is not simple")
    for k, direction in enumerate(itertools.islice(candidate_directions(budget, seed), budget)):
        try:
            _, certificate = project(config, direction)
        except ProjectionError as e:
            _logger.debug(f"direction {k} rejected: {e}")
            continue
        if certificate is not None:
            _logger.debug(f"simple projection along {np.round(direction, 6)} at candidate {k + 1}")
            yield direction, certificate


def find_simple_projection(config, budget=DEFAULT_BUDGET, seed=0):
    """
    first candidate direction whose orthogonal projection of the chain is simple

    returns
        found : (np.ndarray, ProjectionCertificate) or None
    """
    found = next(simple_projections(config, budget, seed), None)
    if found is None:
        _logger.info(f"no simple projection within {budget} candidates")
    else:
        _logger.info(f"simple projection found along {np.round(found[0], 6)}")
    return found


def straighten_chain(config, budget=DEFAULT_BUDGET, seed=0, target=None):
    """
    straighten along the first simple projection direction the planner can use

    A direction is passed over when a descending link would sweep its shadow into the
    projected prefix.

    returns
        plan : MotionPlan or None
            None when no candidate direction works
    """
    for direction, _ in simple_projections(config, budget, seed):
        try:
            return straighten(config, direction, target)
        except PlanningError as e:
            _logger.info(f"direction {np.round(direction, 6)} passed over: {e}")
    return None


def straighten(config, direction=(0., 0., 1.), target=None):
    """
    plan the straightening of an open chain with a simple projection along `direction`

    The chain is first rotated so that `direction` is +z (one rigid move, omitted when it is
    already +z). The last link is swung to vertical above v_{n-1}; then for i = n-1 down to 1
    a coupled lift raises e_{i-1} to vertical while the straightened suffix rides above it.
    The result is a vertical segment rising from v_0.

    arguments
        config : ChainConfig
        direction : 3-sequence of float
            direction of a simple orthogonal projection
        target : RigidMove, optional
            appended rigid reorientation of the straightened chain
    returns
        plan : MotionPlan
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    _, certificate = project(config, direction)
    if certificate is None:
        raise PlanningError(f"projection along {direction} is not simple")

    moves = []
    current = config
    if not np.allclose(direction, [0., 0., 1.], rtol=0., atol=1e-15):
        axis, angle = _axis_angle_to_z(direction)
        reorient = RigidMove(center=tuple(config.vertices[0]), axis=tuple(axis), angle=angle)
        moves.append(reorient)
        current = pose_at(reorient, current, 1.)

    n = current.num_edges
    if n == 1:
        return MotionPlan(config, moves)

    V = current.vertices
    last = V[-1] - V[-2]
    horizontal = np.hypot(last[0], last[1])
    heading = np.array([last[0], last[1], 0.]) / horizontal
    axis = np.cross(heading, [0., 0., 1.])
    swing = SingleJointMove(joint=n - 1, axis=tuple(axis), side='suffix',
                            angle=float(np.pi / 2. - np.arctan2(last[2], horizontal)))
    _check_reach(current, n, certificate)
    moves.append(swing)
    current = pose_at(swing, current, 1.)

    for i in range(n - 1, 0, -1):
        rel = current.vertices[i] - current.vertices[i - 1]
        inclination = np.arctan2(rel[2], np.hypot(rel[0], rel[1]))
        lift = CoupledLift(joint=i, angle=float(np.pi / 2. - inclination))
        _check_reach(current, i, certificate)
        moves.append(lift)
        current = pose_at(lift, current, 1.)
        _logger.debug(f"link {i - 1} raised; suffix of length {current.lengths[i - 1:].sum():.6g} is vertical")

    if target is not None:
        moves.append(target)
    joint_moves = sum(1 for m in moves if m.kind != 'rigid')
    assert joint_moves <= n, f"straightening used {joint_moves} moves for {n} links"
    _logger.info(f"straightened {n} links in {joint_moves} moves")
    return MotionPlan(config, moves)


def _check_reach(config, i, certificate):
    """
    raising a descending link e_{i-1} passes it through horizontal, so the shadow of v_i
    runs past its projected end out to the full link length; that overshoot must clear
    the projected prefix e_0..e_{i-2}
    """
    V = config.vertices
    rel = V[i] - V[i - 1]
    if rel[2] >= 0. or i < 2:
        return
    reach = V[i - 1, :2] + rel[:2] * (config.lengths[i - 1] / np.hypot(rel[0], rel[1]))
    start, end = np.append(V[i, :2], 0.), np.append(reach, 0.)
    prefix = V[:i].copy()
    prefix[:, 2] = 0.
    gaps = segment_distances(np.tile(start, (i - 1, 1)), np.tile(end, (i - 1, 1)), prefix[:-1], prefix[1:])
    k = int(np.argmin(gaps))
    if gaps[k] <= config.eta():
        raise PlanningError(f"link {i - 1} descends and its shadow overshoots into edge {k} "
                            f"(gap {gaps[k]:.3e}, projection clearance {certificate.min_projected_clearance:.3e})")


def _axis_angle_to_z(direction):
    """axis and angle of the rotation taking a unit direction to +z (the one used by frame_to_z)"""
    axis = np.cross(direction, [0., 0., 1.])
    s = np.linalg.norm(axis)
    if s < 1e-15:
        return np.array([1., 0., 0.]), np.pi
    return axis / s, float(np.arctan2(s, direction[2]))
