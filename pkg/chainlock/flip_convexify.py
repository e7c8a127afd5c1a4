"""
flip_convexify.py
convexification of planar simple polygons by flipping pockets through 3D
"""

#IMPORTS
from dataclasses import dataclass, field

import numpy as np

from chainlock.geom_core import PlanningError, convex_hull2, orient, polygon_area2
from chainlock.chain_model import ChainError, is_simple, make_chain
from chainlock.motion import MotionPlan, SubchainRotation, pose_at

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.flip_convexify")
_logger.setLevel(logging.INFO)
###########################################

MAX_FLIPS = 10**5
QUAD_STRETCH = 1.1


@dataclass(frozen=True)
class Pocket:
    """
    a pocket: the boundary chain between two consecutive hull vertices that are not joined by an edge

    lid : (int, int)
        hull vertices (a, b) such that walking the polygon forward from a reaches b through the pocket
    chain : tuple of int
        polygon vertex indices from a to b inclusive, in traversal order
    """
    lid: tuple
    chain: tuple

    @property
    def interior(self):
        return self.chain[1:-1]


def _check_planar(polygon):
    if not polygon.closed:
        raise ChainError("flips need a closed polygon")
    if np.ptp(polygon.vertices[:, 2]) > polygon.eta():
        raise ChainError("flips need a polygon in a horizontal plane")


def _walk(a, b, n):
    out, k = [a], a
    while k != b:
        k = (k + 1) % n
        out.append(k)
    return out


def pockets(polygon):
    """
    pockets of a planar simple polygon, in deterministic order

    The first pocket is the one whose lid touches the lexicographically least hull
    vertex; ties go to the smaller other lid index.

    arguments
        polygon : ChainConfig
    returns
        pockets : list of Pocket
            empty iff the polygon is convex
    """
    _check_planar(polygon)
    V, n = polygon.vertices, polygon.num_vertices
    hull = convex_hull2(V)
    ccw = polygon_area2(V) > 0.
    rank = {h: k for k, h in enumerate(sorted(hull, key=lambda i: (V[i][0], V[i][1], i)))}
    found = []
    for k, h in enumerate(hull):
        nxt = hull[(k + 1) % len(hull)]
        a, b = (h, nxt) if ccw else (nxt, h)
        chain = _walk(a, b, n)
        if len(chain) <= 2:
            continue
        # flat stretches along a hull edge are not pockets
        if all(orient(V[a], V[b], V[i]) == 0 for i in chain[1:-1]):
            continue
        found.append(Pocket((a, b), tuple(chain)))
    found.sort(key=lambda p: (min(rank[p.lid[0]], rank[p.lid[1]]), max(rank[p.lid[0]], rank[p.lid[1]]),
                              min(p.lid), max(p.lid)))
    return found


def flip(polygon, pocket):
    """
    flip a pocket: rotate its chain by pi about the lid line, sweeping through z > plane

    arguments
        polygon : ChainConfig
        pocket : Pocket
    returns
        move : SubchainRotation
        flipped : ChainConfig
    """
    V = polygon.vertices
    a, b = pocket.lid
    u = V[b] - V[a]
    offsets = [V[i] - V[a] for i in pocket.interior]
    w = max(offsets, key=lambda o: abs(u[0] * o[1] - u[1] * o[0]))
    upward = np.sign(u[0] * w[1] - u[1] * w[0])
    assert upward != 0, f"pocket {pocket.lid} lies on its lid line"
    move = SubchainRotation(a=int(a), b=int(b), angle=float(upward * np.pi))
    flipped = pose_at(move, polygon, 1.)

    before, after = abs(polygon_area2(V)), abs(polygon_area2(flipped.vertices))
    if not is_simple(flipped):
        raise PlanningError(f"flipping pocket {pocket.lid} produced a non-simple polygon")
    assert after > before, f"flip of pocket {pocket.lid} did not grow the area ({before} -> {after})"
    _logger.debug(f"flipped pocket {pocket.lid}: area {before:.9g} -> {after:.9g}")
    return move, flipped


@dataclass
class FlipRun:
    plan: MotionPlan
    convex: bool
    areas: list = field(default_factory=list)

    @property
    def flips(self):
        return len(self.plan.moves)


def convexify_flips(polygon, max_flips=MAX_FLIPS):
    """
    flip the first pocket until the polygon is convex or the flip budget is spent

    arguments
        polygon : ChainConfig
            planar simple polygon in a horizontal plane
        max_flips : int
    returns
        run : FlipRun
            plan, convexity flag of the terminal configuration, area after every flip
    """
    if not is_simple(polygon):
        raise ChainError("input polygon is not simple")
    moves, current = [], polygon
    areas = [abs(polygon_area2(polygon.vertices))]
    found = pockets(current)
    while found and len(moves) < max_flips:
        move, current = flip(current, found[0])
        moves.append(move)
        areas.append(abs(polygon_area2(current.vertices)))
        found = pockets(current)
    convex = not found
    if convex:
        _logger.info(f"convexified {polygon.num_vertices}-gon in {len(moves)} flips")
    else:
        _logger.warning(f"flip budget {max_flips} exhausted before convexity")
    return FlipRun(MotionPlan(polygon, moves), convex, areas)


def quadrilateral_family(delta, stretch=QUAD_STRETCH):
    """
    a flat nonconvex quadrilateral whose smallest joint angle is about 2 delta; it needs
    more flips as delta shrinks

    The vertices (0, 0), (s, h), (1, r h), (1 + s, 0) fold back along the x-axis, with
    h = 2 s delta / r so that the joint at (1 + s, 0) opens by atan(2 delta). To first order
    in h a flip reflects the height of v_1 or v_2 through the line of its neighbours, so two
    flips scale the heights by lam, the larger root of lam + 1/lam = 4 s^2 - 2. With
    r = 2 s / (lam + 1) the polygon starts on the growing direction, and convexity takes
    about 2 log(1/delta) / log(lam) flips.

    arguments
        delta : float
            in (0, 1)
        stretch : float
            s > 1
    returns
        polygon : ChainConfig
    """
    if not 0. < delta < 1.:
        raise ChainError(f"delta must lie in (0, 1), got {delta}")
    if stretch <= 1.:
        raise ChainError(f"stretch must exceed 1, got {stretch}")
    product = stretch**2
    lam = 2. * product - 1. + 2. * np.sqrt(product**2 - product)
    ratio = 2. * stretch / (lam + 1.)
    height = 2. * stretch * delta / ratio
    polygon = make_chain([(0., 0.), (stretch, height), (1., ratio * height), (1. + stretch, 0.)], closed=True)
    if not (is_simple(polygon) and pockets(polygon)):
        raise PlanningError(f"delta={delta} gives no simple nonconvex quadrilateral")
    return polygon


def flip_count_experiment(deltas, max_flips=MAX_FLIPS):
    """flip counts of the quadrilateral family for each delta"""
    counts = {}
    for delta in deltas:
        run = convexify_flips(quadrilateral_family(delta), max_flips)
        counts[delta] = run.flips if run.convex else None
        _logger.info(f"delta={delta:.1e}: {counts[delta]} flips")
    return counts
