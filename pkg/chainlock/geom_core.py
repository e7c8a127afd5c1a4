"""
geom_core.py
robust geometric primitives and predicates shared by the planners and the validator
"""

#IMPORTS
import enum
import functools
import itertools

import numpy as np
import sympy

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.geom_core")
_logger.setLevel(logging.INFO)
###########################################

ETA_REL = 1e-9 # relative tolerance, scaled by bounding-box diameter
FOLD_BACK_ANGLE = 1e-6 # radians; joint angle at or below this is a doubled-back joint

# forward error bounds of the float determinants (unit roundoff based)
_EPS = np.finfo(float).eps / 2.
_ORIENT2_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
_ORIENT3_ERRBOUND = (7.0 + 56.0 * _EPS) * _EPS


class ChainlockError(Exception):
    """base class of every error raised by chainlock"""


class GeometryError(ChainlockError, ValueError):
    """invalid geometric input (non-finite, degenerate, collinear hull input)"""


class PlanningError(ChainlockError):
    """a planner could not produce a valid plan"""


class ContactClass(enum.Enum):
    DISJOINT = 'disjoint'
    SHARED_ENDPOINT = 'shared-endpoint'
    PROPER_CROSSING = 'proper-crossing'
    OVERLAP = 'overlap'
    ENDPOINT_ON_INTERIOR = 'endpoint-on-interior'


def as_point(p):
    """
    coerce a 2- or 3-sequence to a float 3-vector (planar input gets z = 0)

    arguments
        p : sequence of float
            coordinates
    returns
        point : np.ndarray of shape (3,)
    """
    arr = np.asarray(p, dtype=float).ravel()
    if arr.shape[0] == 2:
        arr = np.array([arr[0], arr[1], 0.])
    if arr.shape[0] != 3:
        raise GeometryError(f"a point needs 2 or 3 coordinates, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"non-finite coordinates in point {arr}")
    return arr


def as_segment(s):
    a, b = as_point(s[0]), as_point(s[1])
    if np.array_equal(a, b):
        raise GeometryError(f"degenerate segment at {a}")
    return a, b


def orient(p, q, r, s=None):
    """
    exact orientation sign of three planar points or four spatial points

    The float determinant is used when its magnitude exceeds a forward error bound;
    otherwise the determinant is re-evaluated in exact rational arithmetic, so the
    returned sign is never wrong for the given double-precision input.

    arguments
        p, q, r : sequence of float
            points; only x and y are used in the planar case
        s : sequence of float, optional
            fourth point; selects the spatial predicate
    returns
        sign : int
            +1 for counterclockwise (planar) or right-handed (spatial), -1 for the opposite, 0 if degenerate
    """
    pts = [as_point(x) for x in ((p, q, r) if s is None else (p, q, r, s))]
    dim = 2 if s is None else 3
    base = pts[0][:dim]
    rows = np.array([pt[:dim] - base for pt in pts[1:]])
    if dim == 3:
        det = float(rows[0] @ np.cross(rows[1], rows[2]))
    else:
        det = rows[0, 0] * rows[1, 1] - rows[0, 1] * rows[1, 0]
    permanent = abs(rows[0, 0] * rows[1, 1]) + abs(rows[0, 1] * rows[1, 0]) if dim == 2 else \
        sum(abs(rows[0, i] * rows[1, j] * rows[2, k]) for i, j, k in itertools.permutations(range(3)))
    bound = (_ORIENT2_ERRBOUND if dim == 2 else _ORIENT3_ERRBOUND) * permanent * 4.
    if abs(det) > bound:
        return int(np.sign(det))

    # escalate: the subtraction of the base point is redone exactly too
    exact_rows = [[sympy.Rational(float(c)) - sympy.Rational(float(b)) for c, b in zip(pt[:dim], pts[0][:dim])]
                  for pt in pts[1:]]
    exact = sympy.Matrix(exact_rows).det(method='bareiss')
    _logger.debug(f"orientation escalated to exact arithmetic: {exact}")
    return int(sympy.sign(exact))


def point_segment_distances(P, A, B):
    """vectorized distances from points P[k] to closed segments A[k]B[k]"""
    d = B - A
    denom = np.einsum('ij,ij->i', d, d)
    with np.errstate(divide='ignore', invalid='ignore'):
        t = np.where(denom > 0., np.einsum('ij,ij->i', P - A, d) / np.where(denom > 0., denom, 1.), 0.)
    gap = P - (A + np.clip(t, 0., 1.)[:, None] * d)
    return np.sqrt(np.einsum('ij,ij->i', gap, gap))


def segment_distances(P0, P1, Q0, Q1):
    """
    vectorized minimum distances between closed segments P0P1[k] and Q0Q1[k]

    arguments
        P0, P1, Q0, Q1 : np.ndarray of shape (m, 3)
    returns
        distances : np.ndarray of shape (m,)
    """
    d1, d2, r = P1 - P0, Q1 - Q0, P0 - Q0
    a = np.einsum('ij,ij->i', d1, d1)
    e = np.einsum('ij,ij->i', d2, d2)
    b = np.einsum('ij,ij->i', d1, d2)
    c = np.einsum('ij,ij->i', d1, r)
    f = np.einsum('ij,ij->i', d2, r)
    denom = a * e - b * b
    parallel = denom <= 1e-14 * a * e
    with np.errstate(divide='ignore', invalid='ignore'):
        s = np.where(parallel, 0., np.clip((b * f - c * e) / np.where(parallel, 1., denom), 0., 1.))
        t = (b * s + f) / e
        s = np.where(t < 0., np.clip(-c / a, 0., 1.), np.where(t > 1., np.clip((b - c) / a, 0., 1.), s))
    t = np.clip(t, 0., 1.)
    gap = (P0 + s[:, None] * d1) - (Q0 + t[:, None] * d2)
    return np.sqrt(np.einsum('ij,ij->i', gap, gap))


def seg_seg_distance3(s1, s2):
    """
    minimum Euclidean distance between two closed, nondegenerate 3D segments

    arguments
        s1, s2 : pair of points
    returns
        distance : float
    """
    a1, b1 = as_segment(s1)
    a2, b2 = as_segment(s2)
    return float(segment_distances(a1[None], b1[None], a2[None], b2[None])[0])


def _on_closed_segment(p, a, b):
    """p is known collinear with ab; test whether it lies within the bounding box of ab"""
    return all(min(a[k], b[k]) <= p[k] <= max(a[k], b[k]) for k in range(2))


def seg_seg_contact2(s1, s2):
    """
    classify the contact of two planar segments with exact orientation tests

    arguments
        s1, s2 : pair of points with z = 0
    returns
        contact : ContactClass
    """
    a, b = as_segment(s1)
    c, d = as_segment(s2)
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)

    if o1 == o2 == o3 == o4 == 0:
        # collinear: compare the parameter intervals along the common line
        axis = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
        lo1, hi1 = sorted((a[axis], b[axis]))
        lo2, hi2 = sorted((c[axis], d[axis]))
        lo, hi = max(lo1, lo2), min(hi1, hi2)
        if lo > hi:
            return ContactClass.DISJOINT
        if lo < hi:
            return ContactClass.OVERLAP
        return ContactClass.SHARED_ENDPOINT

    if o1 * o2 < 0 and o3 * o4 < 0:
        return ContactClass.PROPER_CROSSING

    shared = [(p, q) for p in (a, b) for q in (c, d) if np.array_equal(p[:2], q[:2])]
    if shared:
        return ContactClass.SHARED_ENDPOINT
    touching = (o1 == 0 and _on_closed_segment(c, a, b)) or (o2 == 0 and _on_closed_segment(d, a, b)) or \
        (o3 == 0 and _on_closed_segment(a, c, d)) or (o4 == 0 and _on_closed_segment(b, c, d))
    return ContactClass.ENDPOINT_ON_INTERIOR if touching else ContactClass.DISJOINT


def convex_hull2(points):
    """
    counterclockwise convex hull indices (monotone chain with exact orientation)

    The hull starts at the lexicographically least point (x, then y); points lying on
    a hull edge are dropped.

    arguments
        points : list of points
    returns
        hull : list of int
    """
    pts = [as_point(p) for p in points]
    if len(pts) < 3:
        raise GeometryError(f"a hull needs at least 3 points, got {len(pts)}")
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1], i))
    # coincident points keep only their first index
    unique = [i for k, i in enumerate(order) if k == 0 or not np.array_equal(pts[i][:2], pts[order[k - 1]][:2])]

    def half(indices):
        out = []
        for i in indices:
            while len(out) >= 2 and orient(pts[out[-2]], pts[out[-1]], pts[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower, upper = half(unique), half(unique[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise GeometryError("all points are collinear; the hull is degenerate")
    return hull


def polygon_area2(vertices):
    """signed shoelace area of the xy-projection (positive for counterclockwise)"""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def rotation_matrix(direction, angle):
    """
    Rodrigues rotation matrix about a unit direction

    arguments
        direction : 3-sequence of float
        angle : float or np.ndarray of shape (k,)
    returns
        R : np.ndarray of shape (3, 3), or (k, 3, 3) for an array of angles
    """
    k = np.asarray(direction, dtype=float)
    k = k / np.linalg.norm(k)
    K = np.array([[0., -k[2], k[1]], [k[2], 0., -k[0]], [-k[1], k[0], 0.]])
    angle = np.asarray(angle, dtype=float)[..., None, None]
    return np.eye(3) + np.sin(angle) * K + (1. - np.cos(angle)) * (K @ K)


def rotate_about_axis(points, origin, direction, angle):
    """rotate an (m, 3) array of points by angle about the line origin + s*direction; (k, m, 3) for k angles"""
    R = rotation_matrix(direction, angle)
    origin = np.asarray(origin, dtype=float)
    return np.einsum('...ij,mj->...mi', R, np.asarray(points, dtype=float) - origin) + origin


@functools.lru_cache(maxsize=128)
def edge_pairs(num_vertices, closed):
    """
    all edge pairs of a chain, non-adjacent pairs first

    The result is cached per chain size; the arrays are read-only.

    returns
        pairs : tuple of (int, int)
            for adjacent pairs the shared vertex is the start of the second edge
        first, second : np.ndarray of int
            edge indices of every pair
        adjacent : np.ndarray of bool
    """
    num_edges = num_vertices if closed else num_vertices - 1
    nonadjacent, adjacent = [], []
    for i, j in itertools.combinations(range(num_edges), 2):
        if j == i + 1:
            adjacent.append((i, j))
        elif closed and i == 0 and j == num_edges - 1:
            if num_edges > 2:
                adjacent.append((j, i))
        else:
            nonadjacent.append((i, j))
    pairs = tuple(nonadjacent + adjacent)
    first = np.array([p[0] for p in pairs], dtype=int)
    second = np.array([p[1] for p in pairs], dtype=int)
    flags = np.arange(len(pairs)) >= len(nonadjacent)
    for arr in (first, second, flags):
        arr.setflags(write=False)
    return pairs, first, second, flags


def pair_clearances(vertices, closed, fold_back=FOLD_BACK_ANGLE, select=None):
    """
    clearance of every edge pair of a chain

    Non-adjacent pairs contribute their segment distance. Adjacent pairs share a vertex,
    so the neighbourhood of that vertex is excluded: the pair contributes the distance
    from each far endpoint to the other link, and 0 when the joint is folded back.

    arguments
        vertices : np.ndarray of shape (n, 3), or (k, n, 3) for k poses of one chain
        closed : bool
        select : np.ndarray of bool, optional
            mask over the pairs of `edge_pairs`; only those pairs are measured
    returns
        pairs : list of (int, int)
        clearances : np.ndarray of shape (m,), or (k, m)
    """
    V = np.asarray(vertices, dtype=float)
    pairs, first, second, adjacent = edge_pairs(V.shape[-2], closed)
    if select is not None:
        pairs = [p for p, keep in zip(pairs, select) if keep]
        first, second, adjacent = first[select], second[select], adjacent[select]
    ends = np.roll(V, -1, axis=-2)
    A, B = V[..., first, :], ends[..., first, :]
    C, D = V[..., second, :], ends[..., second, :]
    shape = A.shape[:-1]
    clearances = segment_distances(A.reshape(-1, 3), B.reshape(-1, 3), C.reshape(-1, 3),
                                   D.reshape(-1, 3)).reshape(shape)
    if adjacent.any():
        # B is the shared vertex, A and D the far endpoints
        a, v, b = A[..., adjacent, :], B[..., adjacent, :], D[..., adjacent, :]
        u, w = a - v, b - v
        cosine = np.sum(u * w, axis=-1) / (np.linalg.norm(u, axis=-1) * np.linalg.norm(w, axis=-1))
        folded = np.arccos(np.clip(cosine, -1., 1.)) <= fold_back
        a, v, b = a.reshape(-1, 3), v.reshape(-1, 3), b.reshape(-1, 3)
        d = np.minimum(point_segment_distances(a, v, b), point_segment_distances(b, a, v)).reshape(folded.shape)
        clearances[..., adjacent] = np.where(folded, 0., d)
    return list(pairs), clearances


def min_clearance(config):
    """
    minimum clearance over all edge pairs of a chain; +inf for chains of at most one edge

    arguments
        config : ChainConfig
    returns
        clearance : float
    """
    _, clearances = pair_clearances(config.vertices, config.closed)
    return float(clearances.min()) if clearances.size else float('inf')
