"""
chain_model.py
chain/polygon representation, simplicity and shape classification, orthogonal projection
"""

#IMPORTS
from dataclasses import dataclass, field

import numpy as np

from chainlock.geom_core import (ChainlockError, ETA_REL, as_point, pair_clearances,
                                 rotation_matrix, seg_seg_contact2, ContactClass)

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.chain_model")
_logger.setLevel(logging.INFO)
###########################################

MIN_PROJECTED_EDGE = 1e-6 # fraction of the chain diameter
EXACT_CHECK_MARGIN = 1e3 # multiples of eta below which a projected clearance is re-checked exactly
MAX_REFLEX_SPAN = 0.75 * np.pi # angle subtended by the two neighbours of a generated reflex vertex


class ChainError(ChainlockError, ValueError):
    """invalid chain configuration"""


class ProjectionError(ChainlockError):
    """orthogonal projection is degenerate"""


@dataclass(frozen=True)
class SubchainRange:
    """vertex range P[i, j] (ends inclusive) or P(i, j) (ends exclusive), in traversal order"""
    i: int
    j: int
    include_i: bool = True
    include_j: bool = True

    def indices(self, num_vertices, closed=False):
        """
        vertex indices of the range; closed chains wrap around past v_{n-1}

        arguments
            num_vertices : int
            closed : bool
        returns
            indices : list of int
        """
        if not (0 <= self.i < num_vertices and 0 <= self.j < num_vertices) or self.i == self.j:
            raise ChainError(f"range ({self.i}, {self.j}) invalid for {num_vertices} vertices")
        if not closed and self.i > self.j:
            raise ChainError(f"open-chain range needs i < j, got ({self.i}, {self.j})")
        span = (self.j - self.i) % num_vertices
        out = [(self.i + k) % num_vertices for k in range(span + 1)]
        return out[(0 if self.include_i else 1):(len(out) if self.include_j else -1)]


@dataclass(frozen=True)
class ProjectionCertificate:
    direction: np.ndarray
    min_projected_clearance: float
    min_projected_edge_length: float


@dataclass(frozen=True, eq=False)
class ChainConfig:
    """
    an embedded polygonal chain v_0..v_n; closed chains store no duplicate of v_0

    Use :func:`make_chain` to build validated instances.
    """
    vertices: np.ndarray
    closed: bool = False
    lengths: np.ndarray = field(default=None, repr=False)

    @property
    def num_vertices(self):
        return self.vertices.shape[0]

    @property
    def num_edges(self):
        return self.num_vertices if self.closed else self.num_vertices - 1

    def edges(self):
        """list of (start, end) vertex pairs"""
        return [(self.vertices[i], self.vertices[(i + 1) % self.num_vertices]) for i in range(self.num_edges)]

    def link_lengths(self):
        return self.lengths.copy()

    def perimeter(self):
        return float(self.lengths.sum())

    def diameter(self):
        """diagonal of the axis-aligned bounding box"""
        return float(np.linalg.norm(self.vertices.max(axis=0) - self.vertices.min(axis=0)))

    def eta(self):
        return ETA_REL * max(self.diameter(), 1.)

    def joint_angles(self):
        """angle at every interior joint (every vertex for closed chains); pi is straight"""
        V, n = self.vertices, self.num_vertices
        joints = range(n) if self.closed else range(1, n - 1)
        out = []
        for k in joints:
            u, w = V[k - 1] - V[k], V[(k + 1) % n] - V[k]
            out.append(float(np.arccos(np.clip(u @ w / (np.linalg.norm(u) * np.linalg.norm(w)), -1., 1.))))
        return np.array(out)

    def with_vertices(self, vertices):
        """same chain type and recorded link lengths with new vertex positions"""
        return ChainConfig(np.asarray(vertices, dtype=float), self.closed, self.lengths)

    def transformed(self, rotation, translation):
        return self.with_vertices(self.vertices @ np.asarray(rotation).T + np.asarray(translation))

    def to_dict(self):
        return {'closed': bool(self.closed), 'vertices': [[float(c) for c in v] for v in self.vertices]}

    @classmethod
    def from_dict(cls, data):
        try:
            return make_chain(data['vertices'], data['closed'])
        except KeyError as e:
            raise ChainError(f"chain object is missing field {e}")


def _edge_lengths(vertices, closed):
    ends = np.roll(vertices, -1, axis=0) if closed else vertices[1:]
    starts = vertices if closed else vertices[:-1]
    return np.linalg.norm(ends - starts, axis=1)


def make_chain(vertices, closed=False):
    """
    validate vertex positions and record the link lengths

    arguments
        vertices : sequence of 2- or 3-sequences
            v_0..v_n; z defaults to 0
        closed : bool
            whether the edge v_n v_0 is implied
    returns
        config : ChainConfig
    """
    try:
        V = np.array([as_point(v) for v in vertices], dtype=float)
    except ChainlockError as e:
        raise ChainError(f"invalid vertex: {e}")
    minimum = 3 if closed else 2
    if V.shape[0] < minimum:
        raise ChainError(f"{'closed' if closed else 'open'} chain needs at least {minimum} vertices, got {V.shape[0]}")
    lengths = _edge_lengths(V, closed)
    zero = np.flatnonzero(lengths == 0.)
    if zero.size:
        raise ChainError(f"zero-length link {int(zero[0])}: consecutive vertices coincide at {V[zero[0]]}")
    return ChainConfig(V, bool(closed), lengths)


@dataclass(frozen=True)
class SimplicityResult:
    simple: bool
    witness: tuple = None
    clearance: float = float('inf')

    def __bool__(self):
        return self.simple


def is_simple(config, tol=None):
    """
    simplicity test with a margin

    arguments
        config : ChainConfig
        tol : float, optional
            clearance threshold, defaults to the chain's eta
    returns
        result : SimplicityResult
            truthy iff simple; witness is the offending edge pair otherwise
    """
    tol = config.eta() if tol is None else tol
    pairs, clearances = pair_clearances(config.vertices, config.closed)
    if not clearances.size:
        return SimplicityResult(True)
    k = int(np.argmin(clearances))
    clearance = float(clearances[k])
    if clearance <= tol:
        _logger.debug(f"edges {pairs[k]} violate simplicity (clearance {clearance})")
        return SimplicityResult(False, pairs[k], clearance)
    return SimplicityResult(True, None, clearance)


def best_fit_plane(points):
    """centroid and unit normal of the least-squares plane"""
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid)
    return centroid, vt[-1]


def shape_classify(config, tol=None):
    """
    classify a chain as 'straight', 'convex-planar' or 'other'

    arguments
        config : ChainConfig
        tol : float, optional
    returns
        shape : str
    """
    tol = config.eta() if tol is None else tol
    V = config.vertices
    if not config.closed:
        axis = V[-1] - V[0]
        length = np.linalg.norm(axis)
        if length == 0.:
            return 'other'
        axis = axis / length
        rel = V - V[0]
        along = rel @ axis
        off = np.linalg.norm(rel - np.outer(along, axis), axis=1)
        monotone = np.all(np.diff(along) > 0.)
        return 'straight' if monotone and np.all(off <= tol) else 'other'

    centroid, normal = best_fit_plane(V)
    if np.any(np.abs((V - centroid) @ normal) > tol):
        return 'other'
    # rotate the plane to xy and test turn signs, zeros allowed at tolerance
    planar = to_plane_frame(V - centroid, normal)
    n = V.shape[0]
    signs = []
    for k in range(n):
        a, b, c = planar[k - 1], planar[k], planar[(k + 1) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        scale = np.linalg.norm(b - a) * np.linalg.norm(c - b)
        if abs(cross) <= tol * scale / max(config.diameter(), 1e-300):
            continue
        signs.append(np.sign(cross))
    if len(set(signs)) > 1:
        return 'other'
    # a convex polygon turns once in total
    turning = np.sum(np.pi - config.joint_angles())
    return 'convex-planar' if np.isclose(turning, 2. * np.pi, atol=1e-6) else 'other'


def frame_to_z(direction):
    """rotation matrix taking the unit direction to +z"""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    z = np.array([0., 0., 1.])
    axis = np.cross(d, z)
    s = np.linalg.norm(axis)
    if s < 1e-15:
        return np.eye(3) if d[2] > 0 else np.diag([1., -1., -1.])
    return rotation_matrix(axis / s, np.arctan2(s, d @ z))


def to_plane_frame(points, normal):
    return np.asarray(points) @ frame_to_z(normal).T


def project(config, direction):
    """
    orthogonal projection onto the plane normal to direction, re-embedded at z = 0

    arguments
        config : ChainConfig
        direction : 3-sequence of float
            unit projection direction
    returns
        planar : ChainConfig
        certificate : ProjectionCertificate or None
            None when the projected chain is not simple
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    rotated = config.vertices @ frame_to_z(direction).T
    rotated[:, 2] = 0.
    threshold = MIN_PROJECTED_EDGE * max(config.diameter(), 1e-300)
    lengths = _edge_lengths(rotated, config.closed)
    k = int(np.argmin(lengths))
    if lengths[k] <= threshold:
        raise ProjectionError(f"edge {k} projects to a near-point (projected length {lengths[k]:.3e})")
    planar = ChainConfig(rotated, config.closed, lengths)

    result = is_simple(planar)
    if result.simple and result.clearance <= EXACT_CHECK_MARGIN * planar.eta():
        # exact contact check backs the metric test for near-touching images
        edges = planar.edges()
        for i, j in _nonadjacent(planar):
            if seg_seg_contact2(edges[i], edges[j]) is not ContactClass.DISJOINT:
                result = SimplicityResult(False, (i, j), 0.)
                break
    if not result.simple:
        _logger.debug(f"projection along {direction} is not simple: edges {result.witness}")
        return planar, None
    return planar, ProjectionCertificate(direction, result.clearance, float(lengths.min()))


def _nonadjacent(config):
    n = config.num_edges
    for i in range(n):
        for j in range(i + 2, n):
            if config.closed and i == 0 and j == n - 1:
                continue
            yield i, j


def lift(config, height, seed=0):
    """add independent uniform z offsets in [0, height) to a planar chain"""
    rng = np.random.default_rng(seed)
    V = config.vertices.copy()
    V[:, 2] += rng.uniform(0., height, size=V.shape[0])
    return make_chain(V, config.closed)


def random_simple_planar_chain(n, seed=0, min_turn=0.3):
    """
    a random simple open planar chain of n links (x-monotone, so always simple)

    arguments
        n : int
            number of links
        seed : int
    returns
        config : ChainConfig
    """
    rng = np.random.default_rng(seed)
    angles = rng.uniform(-1.2, 1.2, size=n)
    # headings stay at least min_turn away from the x-axis
    angles = np.where(np.abs(angles) < min_turn, np.sign(angles + 1e-12) * min_turn, angles)
    steps = rng.uniform(0.5, 1.5, size=n)
    V = np.zeros((n + 1, 3))
    V[1:, 0] = np.cumsum(steps * np.cos(angles))
    V[1:, 1] = np.cumsum(steps * np.sin(angles))
    return make_chain(V, closed=False)


def random_simple_polygon(n, seed=0, irregularity=0.6):
    """
    a random simple polygon: star-shaped about the origin with sorted angles

    arguments
        n : int
            number of vertices
        seed : int
    returns
        config : ChainConfig
    """
    rng = np.random.default_rng(seed)
    # keep angular gaps bounded away from zero and pi
    gaps = np.full(n, 2. * np.pi / n) * (1. + irregularity * rng.uniform(-0.5, 0.5, size=n))
    angles = np.cumsum(gaps)
    angles = angles * (2. * np.pi / angles[-1])
    radii = rng.uniform(1. - irregularity, 1., size=n)
    V = np.stack([radii * np.cos(angles), radii * np.sin(angles), np.zeros(n)], axis=1)
    config = make_chain(V, closed=True)
    assert is_simple(config), f"star-shaped generator produced a non-simple polygon (seed {seed})"
    return config


def random_nonconvex_polygon(n, seed=0, irregularity=0.6):
    """
    a random simple polygon with max(1, n // 3) reflex vertices

    The polygon is star-shaped about the origin. Every third vertex from a random start is
    pushed inward past the line through its two neighbours, so those vertices are reflex.

    arguments
        n : int
            number of vertices, at least 4
        seed : int
    returns
        config : ChainConfig
    """
    if n < 4:
        raise ChainError(f"a nonconvex polygon needs at least 4 vertices, got {n}")
    rng = np.random.default_rng(seed)
    gaps = np.full(n, 2. * np.pi / n) * (1. + irregularity * rng.uniform(-0.5, 0.5, size=n))
    gaps *= 2. * np.pi / gaps.sum()
    start = int(rng.integers(n))
    reflex = [(start + 3 * k) % n for k in range(max(1, n // 3))]
    # gaps[k] runs from vertex k to vertex k + 1
    bound = np.zeros(n, dtype=bool)
    for k in reflex:
        span = gaps[k - 1] + gaps[k]
        if span > MAX_REFLEX_SPAN:
            gaps[[k - 1, k]] *= MAX_REFLEX_SPAN / span
        bound[[k - 1, k]] = True
    gaps[~bound] *= (2. * np.pi - gaps[bound].sum()) / gaps[~bound].sum()
    angles = rng.uniform(0., 2. * np.pi) + np.concatenate([[0.], np.cumsum(gaps[:-1])])
    radii = rng.uniform(0.7, 1., size=n)
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    for k in reflex:
        p, q = radii[k - 1] * directions[k - 1], radii[(k + 1) % n] * directions[(k + 1) % n]
        u, span = directions[k], q - p
        # distance from the origin along u to the line pq
        reach = (p[0] * span[1] - p[1] * span[0]) / (u[0] * span[1] - u[1] * span[0])
        radii[k] = rng.uniform(0.35, 0.75) * reach
    V = np.concatenate([radii[:, None] * directions, np.zeros((n, 1))], axis=1)
    config = make_chain(V, closed=True)
    assert is_simple(config), f"star-shaped generator produced a non-simple polygon (seed {seed})"
    return config


def unit_square():
    return make_chain([(0, 0), (1, 0), (1, 1), (0, 1)], closed=True)


def regular_polygon(n, radius=1.):
    t = 2. * np.pi * np.arange(n) / n
    return make_chain(np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1), closed=True)


def dart():
    """a simple nonconvex quadrilateral with one reflex vertex"""
    return make_chain([(0, 0), (4, 0), (2, 1), (2, 4)], closed=True)
