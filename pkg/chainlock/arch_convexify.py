"""
arch_convexify.py
convexify a planar simple polygon by picking its vertices up one at a time into a convex arch

The polygon starts in the horizontal plane z = h. Every vertex is lifted to the plane
z = h + epsilon; the lifted part is kept as a convex polygon standing vertically on its
base v'_0 v'_i (the arch). Each round lifts the next ground vertex, lays the arch down
into the upper plane, convexifies the resulting barbed polygon in that plane with
four-bar moves, and stands it up again on the new base.
"""

#IMPORTS
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from chainlock.geom_core import PlanningError, min_clearance, polygon_area2
from chainlock.chain_model import ChainError, is_simple, make_chain, shape_classify
from chainlock.flip_convexify import MAX_FLIPS, Pocket, flip, pockets
from chainlock.motion import (FourBarMove, MotionPlan, MoveError, RigidMove, SubchainRotation, ValidationPolicy,
                              pose_at, validate_move)

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.arch_convexify")
_logger.setLevel(logging.INFO)
###########################################

EPSILON_FRACTION = 0.1 # first epsilon as a fraction of the polygon's clearance
EPSILON_HALVINGS = 40
ANGLE_TOL = 1e-9
BARBED_MOVE_FACTOR = 2 # four-bar moves allowed per convex-part vertex
_SCAN = 64
_Z = np.array([0., 0., 1.])


class ArchPhaseError(PlanningError):
    """a phase of the arch algorithm could not be planned or certified"""

    def __init__(self, phase, message):
        super().__init__(f"{phase}: {message}")
        self.phase = phase


@dataclass
class ArchState:
    """
    configuration between phases of the arch algorithm

    config : ChainConfig
        the whole closed chain
    epsilon : float
        height of the upper plane above the input plane
    plane : float
        z of the input plane
    step : int
        vertices 0..step are lifted; step+1..n-1 are still on the ground
    raised : bool
        whether the lifted part stands vertically on its base v'_0 v'_step (otherwise it lies flat in the upper plane)
    """
    config: object
    epsilon: float
    plane: float
    step: int
    raised: bool = True

    @property
    def height(self):
        return self.plane + self.epsilon

    @property
    def lifted(self):
        return list(range(self.step + 1))

    @property
    def ground(self):
        return list(range(self.step + 1, self.config.num_vertices))


@dataclass(frozen=True)
class BarbedPolygon:
    """
    a planar polygon that becomes convex once its ear at `apex` is cut off

    config : ChainConfig
        closed chain holding the polygon
    apex : int
        vertex index of the ear apex
    members : tuple of int, optional
        vertex indices of the polygon in cyclic order, ending at the apex; defaults to the
        whole chain. When they are a proper part of the chain, the edge apex -> members[0]
        is virtual and both of its ends are held fixed.
    """
    config: object
    apex: int
    members: tuple = None

    def ordered(self):
        if self.members is not None:
            members = tuple(self.members)
            if members[-1] != self.apex:
                raise ChainError(f"barbed members must end at the apex {self.apex}")
            return members
        n = self.config.num_vertices
        return tuple((self.apex + 1 + k) % n for k in range(n))

    def planar(self):
        return self.config.vertices[list(self.ordered()), :2]


@dataclass
class BarbedRun:
    moves: list
    fallback: bool = False


@dataclass
class ArchReport:
    epsilon: float = None
    attempts: int = 0
    rounds: int = 0
    moves_per_round: list = field(default_factory=list)
    fallback_rounds: list = field(default_factory=list)
    total_moves: int = 0
    min_clearance: float = float('inf')


def _interior_angle(prev, at, nxt, orientation):
    """interior angle at `at` of a polygon of the given orientation (+1 counterclockwise)"""
    u, v = prev - at, nxt - at
    cross = v[0] * u[1] - v[1] * u[0]
    return float(np.arctan2(orientation * cross, v @ u) % (2. * np.pi))


def _interior_angles(W):
    o = np.sign(polygon_area2(W))
    m = W.shape[0]
    return np.array([_interior_angle(W[k - 1], W[k], W[(k + 1) % m], o) for k in range(m)])


def _offset(p, q, x):
    """twice the signed area of (p, q, x)"""
    return (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0])


def _side(p, q, x):
    return np.sign(_offset(p, q, x))


def _meet(p, rp, q, rq, side):
    delta = q - p
    d = np.linalg.norm(delta)
    along = (d**2 + rp**2 - rq**2) / (2. * d)
    e = delta / d
    return p + along * e + side * np.sqrt(max(rp**2 - along**2, 0.)) * np.array([-e[1], e[0]])


def _rotate2(points, center, angle):
    c, s = np.cos(angle), np.sin(angle)
    rel = np.atleast_2d(points) - center
    return center + rel @ np.array([[c, s], [-s, c]])


def _turn(u, v):
    """signed angle taking direction u to direction v"""
    return float(np.arctan2(u[0] * v[1] - u[1] * v[0], u @ v))


def _check_barbed(W):
    core = W[:-1]
    if core.shape[0] >= 3 and np.any(_interior_angles(core) > np.pi + ANGLE_TOL):
        raise ChainError("removing the ear does not leave a convex polygon")


def _opening_move(W, members, k):
    """
    four-bar move (A, K, C, B) opening joint K until the polygon is convex or K is straight

    W are the planar member positions with A = W[0], C = W[-2], B = W[-1]. Returns the
    move, or None when opening K cannot make progress.
    """
    A, K, C, B = W[0], W[k], W[-2], W[-1]
    m = W.shape[0]
    o = np.sign(polygon_area2(W))
    a, c, r = np.linalg.norm(K - A), np.linalg.norm(C - K), np.linalg.norm(C - B)
    side_c, side_k = _side(A, B, C), _side(A, C, K)
    theta0 = float(np.arccos(np.clip((A - K) @ (C - K) / (a * c), -1., 1.)))
    opening = np.pi - _interior_angle(W[k - 1], K, W[k + 1], o)
    reach = np.linalg.norm(B - A) + r
    cos_reach = (a**2 + c**2 - reach**2) / (2. * a * c)
    theta_reach = float(np.arccos(cos_reach)) if cos_reach >= -1. else np.pi
    theta_hi = min(theta0 + opening, theta_reach)
    if theta_hi <= theta0 + ANGLE_TOL:
        return None
    first, before_c = W[1], W[-3]

    def place(theta):
        x = np.sqrt(a**2 + c**2 - 2. * a * c * np.cos(theta))
        C2 = _meet(A, x, B, r, side_c)
        K2 = _meet(A, a, C2, c, side_k)
        driver = _turn(K - A, K2 - A)
        coupler = _turn(C - K, C2 - K2)
        w1 = K2 if k == 1 else _rotate2(first, A, driver)[0]
        wc = K2 if k == m - 3 else (_rotate2(before_c, K, coupler)[0] - K + K2)
        return C2, w1, wc

    def excess(theta):
        C2, w1, wc = place(theta)
        return max(_interior_angle(B, A, w1, o), _interior_angle(wc, C2, B, o)) - np.pi

    # stop just short of the reach limit, where A, B, C are collinear
    if theta_hi == theta_reach:
        theta_hi = theta0 + (theta_reach - theta0) * (1. - 1e-9)
    grid = np.linspace(theta0, theta_hi, _SCAN + 1)
    target = theta_hi
    previous = theta0
    for theta in grid[1:]:
        if excess(theta) <= 0.:
            root = brentq(excess, previous, theta, xtol=1e-14) if excess(previous) > 0. else previous
            target = root + 1e-3 * (theta - root)
            break
        previous = theta
    else:
        if theta_hi < theta0 + opening - ANGLE_TOL:
            return None
    C2 = place(target)[0]
    angle = _turn(C - B, C2 - B)
    return FourBarMove(joints=(members[0], members[k], members[-2], members[-1]), angle=angle, driver='last')


def _flip_fallback(barbed, config, members):
    """
    pocket flips in the plane of the barbed polygon

    With a virtual edge, members[0] and the apex stay put. A pocket whose chain runs
    through the virtual edge is replaced by the complementary chain on the same lid;
    turning that over instead gives a congruent polygon, so the flip sequence still ends.
    """
    moves = []
    virtual = len(members) != config.num_vertices
    for _ in range(MAX_FLIPS):
        local = make_chain(config.vertices[list(members)], closed=True)
        found = pockets(local)
        if not found:
            return moves, config
        pocket = found[0]
        a, b = pocket.lid
        if virtual and a > b:
            pocket = Pocket((b, a), tuple(range(b, a + 1)))
        move, _ = flip(local, pocket)
        move = SubchainRotation(a=members[move.a], b=members[move.b], angle=move.angle)
        moves.append(move)
        config = pose_at(move, config, 1.)
    raise PlanningError(f"barbed polygon at apex {barbed.apex} not convex after {MAX_FLIPS} flips")


def convexify_barbed(barbed):
    """
    in-plane convexification of a barbed polygon

    The convex part is opened one joint at a time: a four-bar move with joints
    (A, K, C, B), where B is the ear apex with neighbours C (before) and A (after), and
    K is the convex-part vertex farthest from the chord AC, is driven until the polygon
    is convex or K is straight. An ear pointing into the convex part is first flipped
    out about its chord; pocket flips take over if the four-bar search stalls.

    arguments
        barbed : BarbedPolygon
    returns
        run : BarbedRun
            moves on barbed.config, and whether flips were needed
    """
    members = barbed.ordered()
    config = barbed.config
    W = barbed.planar()
    m = len(members)
    _check_barbed(W)
    moves, fallback = [], False
    if m < 3 or np.all(_interior_angles(W) <= np.pi + ANGLE_TOL):
        return BarbedRun(moves)

    A, C, B = W[0], W[-2], W[-1]
    if m > 3:
        far = max(range(1, m - 2), key=lambda j: abs(_offset(A, C, W[j])))
        if np.sign(_offset(A, C, B)) == np.sign(_offset(A, C, W[far])) != 0:
            if m != config.num_vertices:
                # the apex is pinned by its ground link
                _logger.debug(f"inward ear at {barbed.apex} behind a virtual edge; flipping pockets")
                flips, config = _flip_fallback(barbed, config, members)
                return BarbedRun(flips, True)
            # ear points inward: flip the apex out about its chord
            move = SubchainRotation(a=members[-2], b=members[0], angle=float(np.sign(_offset(C, A, B)) * np.pi))
            moves.append(move)
            config = pose_at(move, config, 1.)
            fallback = True
            _logger.debug(f"inward ear at {barbed.apex} flipped out")

    budget = BARBED_MOVE_FACTOR * m + 2
    while len(moves) < budget:
        W = config.vertices[list(members), :2]
        angles = _interior_angles(W)
        if np.all(angles <= np.pi + ANGLE_TOL):
            return BarbedRun(moves, fallback)
        A, C = W[0], W[-2]
        candidates = [j for j in range(1, m - 2) if angles[j] < np.pi - ANGLE_TOL]
        if not candidates:
            break
        k = max(candidates, key=lambda j: (abs(_offset(A, C, W[j])), -j))
        try:
            move = _opening_move(W, members, k)
            opened = pose_at(move, config, 1.) if move is not None else None
        except (MoveError, ValueError) as e:
            _logger.debug(f"opening joint {members[k]} failed: {e}")
            move = None
        if move is None:
            break
        moves.append(move)
        config = opened
        _logger.debug(f"opened joint {members[k]} by driving {move.angle:.6g} at the apex")

    _logger.info(f"four-bar convexification stalled at apex {barbed.apex}; falling back to flips")
    flips, config = _flip_fallback(barbed, config, members)
    return BarbedRun(moves + flips, True)


def _lift_angle(config, a, b, k, target):
    """rotation about the line v_a v_b that raises v_k to height target, turning upward"""
    V = config.vertices
    origin = V[a]
    u = (V[b] - origin) / np.linalg.norm(V[b] - origin)
    rel = V[k] - origin
    foot = origin + (rel @ u) * u
    w = V[k] - foot
    A, B = w[2], np.cross(u, w)[2]
    if abs(B) <= 1e-15 * max(np.linalg.norm(w), 1.):
        raise PlanningError(f"vertex {k} cannot rise about the line ({a}, {b})")
    s = np.sign(B)
    top = float(np.arctan2(s * B, A) % (2. * np.pi))

    def height(t):
        return foot[2] + A * np.cos(t) + s * B * np.sin(t) - target

    if height(top) < 0.:
        raise PlanningError(f"vertex {k} cannot reach height {target:.6g} about the line ({a}, {b})")
    if height(0.) >= 0.:
        raise PlanningError(f"vertex {k} already at or above height {target:.6g}")
    return float(s * brentq(height, 0., top, xtol=1e-15))


def _certify(moves, config, policy, phase, report=None):
    """validate moves in order and return the final configuration"""
    for move in moves:
        record = validate_move(move, config, policy)
        if not record.passed:
            raise ArchPhaseError(phase, record.failure)
        if report is not None:
            report.min_clearance = min(report.min_clearance, record.min_clearance)
        config = pose_at(move, config, 1.)
    return config


def _lower_arch(state, apex):
    """rotation laying the raised arch over base v'_0 v'_step down on the side away from `apex`"""
    V, i = state.config.vertices, state.step
    u = V[i] - V[0]
    u = u / np.linalg.norm(u)
    away = V[apex] - V[0]
    away = away - (away @ u) * u
    angle = np.pi / 2. if np.cross(u, _Z) @ away < 0. else -np.pi / 2.
    return SubchainRotation(a=0, b=i, angle=float(angle))


def lift_step(state, policy=ValidationPolicy(), report=None):
    """
    lift the next ground vertex to the upper plane and lay the arch down beside it

    arguments
        state : ArchState
            raised arch over v'_0 v'_i with ground vertices left
        policy : ValidationPolicy
    returns
        moves : list of Move
        state : ArchState
            flat state whose lifted part is a barbed polygon with apex v'_{i+1}
    """
    if not state.raised or not state.ground:
        raise PlanningError("lift_step needs a raised arch and a nonempty ground")
    n, i = state.config.num_vertices, state.step
    k = i + 1
    try:
        lift = SubchainRotation(a=i, b=(k + 1) % n, angle=_lift_angle(state.config, i, (k + 1) % n, k, state.height))
    except PlanningError as e:
        raise ArchPhaseError(f"lift of vertex {k}", str(e))
    moves = [lift]
    config = pose_at(lift, state.config, 1.)
    if i >= 2:
        lowered = _lower_arch(ArchState(config, state.epsilon, state.plane, i), k)
        moves.append(lowered)
    config = _certify(moves, state.config, policy, f"lift of vertex {k}", report)
    return moves, ArchState(config, state.epsilon, state.plane, k, raised=False)


def raise_arch(state, policy=ValidationPolicy(), report=None):
    """
    stand the flat convex lifted part up on its base v'_0 v'_i

    returns
        move : SubchainRotation or None
            None when the base has no interior vertices
        state : ArchState
    """
    if state.raised:
        raise PlanningError("arch is already raised")
    V, i = state.config.vertices, state.step
    if i < 2:
        return None, ArchState(state.config, state.epsilon, state.plane, i, raised=True)
    u = V[i] - V[0]
    offsets = V[1:i] - V[0]
    lever = offsets[:, 0] * u[1] - offsets[:, 1] * u[0]
    w = offsets[int(np.argmax(np.abs(lever)))]
    angle = np.sign(u[0] * w[1] - u[1] * w[0]) * np.pi / 2.
    move = SubchainRotation(a=0, b=i, angle=float(angle))
    config = _certify([move], state.config, policy, f"raise of arch {i}", report)
    arch = make_chain(config.vertices[:i + 1], closed=True)
    assert shape_classify(arch, tol=100. * config.eta()) == 'convex-planar', f"raised arch {i} is not convex"
    return move, ArchState(config, state.epsilon, state.plane, i, raised=True)


def _prelude(polygon, epsilon, plane, policy, report):
    n = polygon.num_vertices
    try:
        lift = SubchainRotation(a=n - 1, b=1, angle=_lift_angle(polygon, n - 1, 1, 0, plane + epsilon))
    except PlanningError as e:
        raise ArchPhaseError("lift of vertex 0", str(e))
    config = _certify([lift], polygon, policy, "lift of vertex 0", report)
    return lift, ArchState(config, epsilon, plane, 0)


def _run(polygon, epsilon, policy):
    """plan and certify every phase at one epsilon"""
    n = polygon.num_vertices
    plane = float(polygon.vertices[0, 2])
    original = polygon.vertices.copy()
    report = ArchReport(epsilon=epsilon)
    lift, state = _prelude(polygon, epsilon, plane, policy, report)
    moves = [lift]

    for i in range(n - 2):
        round_moves, state = lift_step(state, policy, report)
        barbed = convexify_barbed(BarbedPolygon(state.config, i + 1, tuple(range(i + 2))))
        state.config = _certify(barbed.moves, state.config, policy, f"barbed round {i}", report)
        raised, state = raise_arch(state, policy, report)
        round_moves = round_moves + barbed.moves + ([raised] if raised is not None else [])
        if barbed.fallback:
            report.fallback_rounds.append(i)
        report.moves_per_round.append(len(round_moves))
        moves.extend(round_moves)
        ground = state.ground
        assert np.array_equal(state.config.vertices[ground], original[ground]), f"ground moved in round {i}"
        _logger.debug(f"round {i}: {len(round_moves)} moves, {len(ground)} ground vertices left")
    report.rounds = n - 2
    assert state.step == n - 2, f"{state.step + 1} vertices lifted after {n - 2} rounds"

    final, state = lift_step(state, policy, report)
    barbed = convexify_barbed(BarbedPolygon(state.config, n - 1))
    state.config = _certify(barbed.moves, state.config, policy, "final barbed phase", report)
    if barbed.fallback:
        report.fallback_rounds.append(n - 2)
    moves.extend(final + barbed.moves)
    report.moves_per_round.append(len(final) + len(barbed.moves))
    return moves, state, report


def _search(polygon, policy, epsilon=None):
    if not polygon.closed:
        raise ChainError("the arch algorithm needs a closed polygon")
    if np.ptp(polygon.vertices[:, 2]) > polygon.eta():
        raise ChainError("the arch algorithm needs a polygon in a horizontal plane")
    if not is_simple(polygon):
        raise ChainError("input polygon is not simple")
    epsilon = EPSILON_FRACTION * min_clearance(polygon) if epsilon is None else epsilon
    failure = None
    for attempt in range(EPSILON_HALVINGS + 1):
        try:
            moves, state, report = _run(polygon, epsilon, policy)
        except (PlanningError, MoveError) as e:
            failure = e
            _logger.debug(f"epsilon {epsilon:.3e} rejected: {e}")
            epsilon *= 0.5
            continue
        report.attempts = attempt + 1
        _logger.info(f"epsilon {epsilon:.3e} accepted after {attempt + 1} attempts")
        return epsilon, moves, state, report
    raise PlanningError(f"no valid epsilon within {EPSILON_HALVINGS} halvings; last failure: {failure}")


def choose_epsilon(polygon, policy=ValidationPolicy()):
    """
    height of the upper plane for which every phase of the arch algorithm certifies

    Starts at a tenth of the polygon's clearance and halves on any failure.
    """
    return _search(polygon, policy)[0]


def convexify_arch(polygon, policy=ValidationPolicy(), descend=False, epsilon=None):
    """
    convexify a planar simple polygon with the arch algorithm

    arguments
        polygon : ChainConfig
            closed simple polygon in a horizontal plane
        policy : ValidationPolicy
        descend : bool
            append a translation bringing the convex result back to the input plane
        epsilon : float, optional
            first height tried; defaults to a tenth of the clearance
    returns
        plan : MotionPlan
        report : ArchReport
    """
    if shape_classify(polygon) == 'convex-planar':
        _logger.info("polygon is already convex")
        return MotionPlan(polygon, []), ArchReport(attempts=0, min_clearance=min_clearance(polygon))
    epsilon, moves, state, report = _search(polygon, policy, epsilon)
    if descend:
        moves.append(RigidMove(translation=(0., 0., -float(epsilon))))
    report.total_moves = len(moves)
    final = make_chain(state.config.vertices, closed=True)
    assert shape_classify(final, tol=100. * final.eta()) == 'convex-planar', "arch algorithm ended non-convex"
    _logger.info(f"convexified {polygon.num_vertices}-gon in {len(moves)} moves over {report.rounds} rounds "
                 f"(epsilon {epsilon:.3e})")
    return MotionPlan(polygon, moves), report


def fit_move_exponent(ns, counts):
    """slope of the least-squares line through (log n, log moves)"""
    slope, _ = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(np.asarray(counts, dtype=float)), 1)
    return float(slope)
