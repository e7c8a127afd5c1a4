"""
locked_examples.py
the knitting-needles chain, its doubled closed version, and knot-determinant certificates
"""

#IMPORTS
import bisect
from dataclasses import dataclass, field

import numpy as np
import sympy

from chainlock.geom_core import ChainlockError, ContactClass, seg_seg_contact2
from chainlock.chain_model import MIN_PROJECTED_EDGE, ChainError, frame_to_z, is_simple, make_chain
from chainlock.motion import MotionPlan, SingleJointMove, ValidationPolicy, pose_at, validate_move
from chainlock.straighten_projection import candidate_directions

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.locked_examples")
_logger.setLevel(logging.INFO)
###########################################

DEFAULT_OFFSET = 0.02 # fraction of the shortest link
DIAGRAM_BUDGET = 64
DIAGRAM_CHECKS = 3
STRAIGHT_TOL = 0.1 # radians of total turning

# unit directions of e_0..e_4; with v_1 at the origin and viewed down the z-axis, e_3
# passes under e_0 and e_4 threads the cord, over e_1 and under e_2
_NEEDLE_DIRECTIONS = np.array([
    np.array([1., 0., -2.]) / np.sqrt(5.),
    [0.4, -0.3, np.sqrt(0.75)],
    [-0.95, 0.2, -np.sqrt(0.0575)],
    [0.65, 0.45, -np.sqrt(0.375)],
    np.array([0., -1., 1.]) / np.sqrt(2.),
])


class KnotError(ChainlockError):
    """no usable knot diagram"""


@dataclass(frozen=True)
class NeedleParams:
    """
    link lengths l_0..l_4 of the needles chain and the radius of the ball about v_1

    The cord v_1..v_4 has length L = l_1 + l_2 + l_3. The inequalities r >= L, l_0 > r
    and l_4 > r + L keep v_2, v_3, v_4 inside the ball and v_0, v_5 outside it under
    every motion.
    """
    l0: float = 3.5
    l1: float = 1.
    l2: float = 1.
    l3: float = 1.
    l4: float = 6.5
    r: float = 3.

    def __post_init__(self):
        if min(self.lengths) <= 0. or self.r <= 0.:
            raise ChainError(f"needle lengths and radius must be positive, got {self.lengths}, r={self.r}")
        if self.r < self.cord:
            raise ChainError(f"ball radius {self.r} is shorter than the cord {self.cord}")
        if self.l0 <= self.r:
            raise ChainError(f"first needle {self.l0} does not leave the ball of radius {self.r}")
        if self.l4 <= self.r + self.cord:
            raise ChainError(f"last needle {self.l4} must exceed r + L = {self.r + self.cord}")

    @property
    def lengths(self):
        return (self.l0, self.l1, self.l2, self.l3, self.l4)

    @property
    def cord(self):
        return self.l1 + self.l2 + self.l3

    def scaled(self, factor):
        return NeedleParams(*(factor * l for l in self.lengths), r=factor * self.r)


def make_knitting_needles(params=NeedleParams()):
    """
    the open six-vertex needles chain with v_1 at the origin

    arguments
        params : NeedleParams
    returns
        config : ChainConfig
    """
    steps = np.asarray(params.lengths)[:, None] * _NEEDLE_DIRECTIONS
    V = np.zeros((6, 3))
    V[0] = -steps[0]
    V[2:] = np.cumsum(steps[1:], axis=0)
    config = make_chain(V, closed=False)
    simple = is_simple(config, tol=1e-3 * min(params.lengths))
    if not simple:
        raise ChainError(f"needles chain is not simple for {params}: edges {simple.witness} "
                         f"(clearance {simple.clearance})")
    return config


def complete_exterior(config):
    """
    close an open chain by a path that stays far outside it

    Seen down the z-axis, the path extends the last link outward by one chain diameter,
    swings around at twice that distance from the centroid, and comes back in along the
    extension of the first link. When both end links point away from the rest of the
    chain in that view the closure adds no crossings.

    returns
        closed : ChainConfig
    """
    if config.closed:
        raise ChainError("chain is already closed")
    V = config.vertices
    reach = max(config.diameter(), 1.)

    def outward(tip, base):
        d = (tip - base)[:2]
        size = np.linalg.norm(d)
        return d / size if size > 1e-9 * reach else np.array([1., 0.])

    a, b = outward(V[-1], V[-2]), outward(V[0], V[1])
    middle = a + b
    if np.linalg.norm(middle) < 1e-6:
        middle = np.array([-a[1], a[0]])
    middle /= np.linalg.norm(middle)
    centre = V.mean(axis=0)
    corners = [
        (*(V[-1, :2] + reach * a), V[-1, 2]),
        (*(centre[:2] + 2. * reach * middle), 0.5 * (V[0, 2] + V[-1, 2])),
        (*(V[0, :2] + reach * b), V[0, 2]),
    ]
    return make_chain(np.vstack([V, corners]), closed=True)


def _offset_direction(V):
    """unit vector far from every link direction and from every joint plane"""
    edges = np.diff(V, axis=0)
    edges /= np.linalg.norm(edges, axis=1)[:, None]
    normals = np.cross(edges[:-1], edges[1:])
    size = np.linalg.norm(normals, axis=1)
    normals = normals[size > 1e-12] / size[size > 1e-12, None]

    def score(w):
        along = np.abs(edges @ w).max()
        inplane = np.abs(normals @ w).min() if normals.size else 1.
        return min(np.sqrt(1. - min(along, 1.)**2), inplane)

    return max(candidate_directions(DIAGRAM_BUDGET, seed=1), key=score)


def doubled(config, offset):
    """
    the boundary of a thin ribbon along an open chain

    The chain is followed by a translated copy traversed backwards, with the two pairs
    of endpoints joined.

    arguments
        config : ChainConfig
            open chain
        offset : float
            length of the translation
    returns
        closed : ChainConfig
    """
    if config.closed:
        raise ChainError("only open chains can be doubled")
    if offset <= 0.:
        raise ChainError(f"offset must be positive, got {offset}")
    V = config.vertices
    w = offset * _offset_direction(V)
    closed = make_chain(np.vstack([V, (V + w)[::-1]]), closed=True)
    simple = is_simple(closed)
    if not simple:
        raise ChainError(f"offset {offset} makes the copy collide with the chain at edges {simple.witness}")
    return closed


def make_locked_closed(params=NeedleParams(), offset=None):
    """the doubled needles chain; offset defaults to a small fraction of the shortest link"""
    offset = DEFAULT_OFFSET * min(params.lengths) if offset is None else offset
    return doubled(make_knitting_needles(params), offset)


@dataclass
class ExclusionReport:
    trials: int
    violations: int
    min_margin_first: float # min |v_0 - v_1| - r
    min_margin_last: float # min |v_5 - v_1| - r

    @property
    def passed(self):
        return self.violations == 0


def endpoint_exclusion_check(params=NeedleParams(), trials=10**4, seed=0):
    """
    sample random needles configurations and measure how far v_0 and v_5 stay outside the ball

    arguments
        params : NeedleParams
        trials : int
        seed : int
    returns
        report : ExclusionReport
    """
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(trials, 5, 3))
    directions /= np.linalg.norm(directions, axis=2)[:, :, None]
    steps = directions * np.asarray(params.lengths)[None, :, None]
    # v_1 at the origin
    first = -steps[:, 0]
    last = steps[:, 1:].sum(axis=1)
    margin_first = np.linalg.norm(first, axis=1) - params.r
    margin_last = np.linalg.norm(last, axis=1) - params.r
    violations = int(np.count_nonzero((margin_first <= 0.) | (margin_last <= 0.)))
    report = ExclusionReport(trials, violations, float(margin_first.min()), float(margin_last.min()))
    _logger.info(f"{trials} needle samples: {violations} violations, margins "
                 f"{report.min_margin_first:.6g} / {report.min_margin_last:.6g}")
    return report


@dataclass(frozen=True)
class Crossing:
    """a crossing of a knot diagram; positions are edge index plus parameter along the edge"""
    over: float
    under: float
    sign: int


@dataclass
class KnotDiagram:
    """crossings of a regular projection of a closed chain, viewed from `direction`"""
    direction: tuple
    num_edges: int
    crossings: list = field(default_factory=list)

    @property
    def writhe(self):
        return sum(c.sign for c in self.crossings)

    def coloring_matrix(self):
        """
        one row per crossing: 2 at the over arc, -1 at each of the two under arcs

        Arc k runs from the k-th undercrossing (in traversal order) to the next one.
        """
        n = len(self.crossings)
        order = sorted(range(n), key=lambda k: self.crossings[k].under)
        starts = [self.crossings[k].under for k in order]
        outgoing = {k: a for a, k in enumerate(order)}
        rows = []
        for k, crossing in enumerate(self.crossings):
            row = [0] * n
            over = (bisect.bisect_left(starts, crossing.over) - 1) % n
            row[over] += 2
            row[outgoing[k]] -= 1
            row[(outgoing[k] - 1) % n] -= 1
            rows.append(row)
        return rows

    def determinant(self):
        if len(self.crossings) < 2:
            return 1
        minor = sympy.Matrix(self.coloring_matrix())[:-1, :-1]
        return abs(int(minor.det(method='bareiss')))


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def knot_diagram(config, direction):
    """
    diagram of a closed chain projected along direction

    arguments
        config : ChainConfig
            closed simple chain
        direction : 3-sequence of float
    returns
        diagram : KnotDiagram
    raises
        KnotError if the projection is not regular
    """
    if not config.closed:
        raise KnotError("knot diagrams need a closed chain")
    P = config.vertices @ frame_to_z(direction).T
    flat = P.copy()
    flat[:, 2] = 0.
    m = config.num_vertices
    shadows = np.linalg.norm(np.roll(flat, -1, axis=0) - flat, axis=1)
    if shadows.min() <= MIN_PROJECTED_EDGE * max(config.diameter(), 1.):
        raise KnotError(f"edge {int(np.argmin(shadows))} is parallel to the view direction")
    diagram = KnotDiagram(tuple(float(c) for c in direction), m)
    for i in range(m):
        a, b = flat[i], flat[(i + 1) % m]
        for j in range(i + 1, m):
            c, d = flat[j], flat[(j + 1) % m]
            contact = seg_seg_contact2((a, b), (c, d))
            if j == i + 1 or (i == 0 and j == m - 1):
                if contact is not ContactClass.SHARED_ENDPOINT:
                    raise KnotError(f"edges {i} and {j} fold onto each other in projection")
                continue
            if contact is ContactClass.DISJOINT:
                continue
            if contact is not ContactClass.PROPER_CROSSING:
                raise KnotError(f"edges {i} and {j} meet in a {contact.value} contact in projection")
            r, s, w = b - a, d - c, c - a
            denom = _cross2(r, s)
            t, u = _cross2(w, s) / denom, _cross2(w, r) / denom
            zi = P[i, 2] + t * (P[(i + 1) % m, 2] - P[i, 2])
            zj = P[j, 2] + u * (P[(j + 1) % m, 2] - P[j, 2])
            if zi == zj:
                raise KnotError(f"edges {i} and {j} intersect")
            if zi > zj:
                over, under, sign = i + t, j + u, np.sign(_cross2(r, s))
            else:
                over, under, sign = j + u, i + t, np.sign(_cross2(s, r))
            diagram.crossings.append(Crossing(float(over), float(under), int(sign)))
    return diagram


def knot_diagrams(config, count=DIAGRAM_CHECKS, budget=DIAGRAM_BUDGET, seed=0):
    """the first `count` regular diagrams among the candidate projection directions"""
    found = []
    for direction in candidate_directions(budget, seed):
        if any(np.allclose(direction, d.direction) for d in found):
            continue
        try:
            found.append(knot_diagram(config, direction))
        except KnotError as e:
            _logger.debug(f"direction {direction} rejected: {e}")
            continue
        if len(found) == count:
            return found
    raise KnotError(f"only {len(found)} regular projections among {budget} directions")


def knot_determinant(config, checks=DIAGRAM_CHECKS, budget=DIAGRAM_BUDGET, seed=0):
    """
    knot determinant of a closed simple chain, computed on several regular projections

    arguments
        config : ChainConfig
        checks : int
            number of independent projections that must agree
        budget : int
            projection directions to try
        seed : int
    returns
        determinant : int
    """
    if not is_simple(config):
        raise KnotError("knot determinant needs a simple closed chain")
    values = [diagram.determinant() for diagram in knot_diagrams(config, checks, budget, seed)]
    if len(set(values)) != 1:
        raise KnotError(f"projections disagree on the determinant: {values}")
    _logger.debug(f"knot determinant {values[0]} ({checks} projections)")
    return values[0]


def _sampled(curve, samples):
    t = 2. * np.pi * np.arange(samples) / samples
    return make_chain(np.stack(curve(t), axis=1), closed=True)


def standard_trefoil(samples=48):
    return _sampled(lambda t: (np.sin(t) + 2. * np.sin(2. * t), np.cos(t) - 2. * np.cos(2. * t),
                               -np.sin(3. * t)), samples)


def figure_eight(samples=64):
    return _sampled(lambda t: ((2. + np.cos(2. * t)) * np.cos(3. * t), (2. + np.cos(2. * t)) * np.sin(3. * t),
                               np.sin(4. * t)), samples)


def turning(config):
    """total exterior angle of an open chain; 0 iff straight"""
    return float(np.sum(np.pi - config.joint_angles()))


@dataclass
class StraightenAttempt:
    initial: float
    best: float
    proposals: int
    plan: MotionPlan

    @property
    def accepted(self):
        return len(self.plan.moves)

    @property
    def straightened(self):
        return self.best < STRAIGHT_TOL


def random_straighten_attempt(config, budget=2000, seed=0, noise=0.1, policy=ValidationPolicy()):
    """
    greedy random unbending by certified single-joint moves

    Each proposal picks a joint and a side, and rotates that side about the joint's bending
    axis (tilted by `noise`) by a random fraction of the joint's exterior angle. Proposals
    that lower the total turning and pass validation are kept.

    arguments
        config : ChainConfig
            open simple chain
        budget : int
            number of proposals
        seed : int
    returns
        attempt : StraightenAttempt
    """
    if config.closed:
        raise ChainError("straightening needs an open chain")
    rng = np.random.default_rng(seed)
    current, moves = config, []
    initial = best = turning(config)
    proposals = 0
    while proposals < budget and best >= STRAIGHT_TOL and config.num_vertices > 2:
        proposals += 1
        V = current.vertices
        joint = int(rng.integers(1, current.num_vertices - 1))
        u, w = V[joint] - V[joint - 1], V[joint + 1] - V[joint]
        bend = np.cross(u, w)
        if np.linalg.norm(bend) < 1e-12 * np.linalg.norm(u) * np.linalg.norm(w):
            continue
        axis = bend / np.linalg.norm(bend) + noise * rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        side = 'prefix' if rng.random() < 0.5 else 'suffix'
        fraction = 1. if rng.random() < 0.5 else rng.uniform(0.2, 1.)
        exterior = np.pi - float(current.joint_angles()[joint - 1])
        angle = fraction * exterior * (1. if side == 'prefix' else -1.)
        move = SingleJointMove(joint=joint, axis=tuple(float(c) for c in axis), side=side, angle=float(angle))
        candidate = pose_at(move, current, 1.)
        value = turning(candidate)
        if value >= best:
            continue
        if not validate_move(move, current, policy, len(moves)).passed:
            continue
        moves.append(move)
        current, best = candidate, value
    _logger.info(f"random straightening: turning {initial:.4g} -> {best:.4g} "
                 f"({len(moves)} moves, {proposals} proposals)")
    return StraightenAttempt(initial, best, proposals, MotionPlan(config, moves))
