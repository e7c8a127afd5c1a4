"""
motion.py
moves (the unit of reconfiguration), pose evaluation and certified validation of motion plans
"""

#IMPORTS
import numbers
from dataclasses import dataclass, field, fields, asdict
from typing import ClassVar

import numpy as np

from chainlock.geom_core import ChainlockError, edge_pairs, pair_clearances, rotate_about_axis, rotation_matrix
from chainlock.chain_model import ChainConfig, ChainError, SubchainRange

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.motion")
_logger.setLevel(logging.INFO)
###########################################

DEFAULT_SAMPLES = 64
MAX_STEPS = 2**16
LENGTH_TOL = 1e-9 # relative link-length drift allowed at any sample
_Z = np.array([0., 0., 1.])


class MoveError(ChainlockError):
    """a move is not applicable to a configuration, or its closure fails"""


def _check_t(t):
    if not 0. <= t <= 1.:
        raise MoveError(f"move time {t} outside [0, 1]")


def _strictly_between(a, b, num_vertices, closed):
    """vertex indices strictly between a and b in traversal order (cyclic for closed chains)"""
    try:
        return SubchainRange(a, b, include_i=False, include_j=False).indices(num_vertices, closed=closed)
    except ChainError as e:
        raise MoveError(str(e)) from e


def _plain(value):
    """numpy scalars to builtin numbers so moves serialize with json"""
    return value.item() if isinstance(value, np.generic) else value


def _coerce(name, value, default):
    """a deserialized field value checked against the type of the field's default"""
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(default):
            raise MoveError(f"field {name!r} needs {len(default)} entries, got {value!r}")
        return tuple(_coerce(name, v, d) for v, d in zip(value, default))
    if isinstance(default, str):
        if not isinstance(value, str):
            raise MoveError(f"field {name!r} needs a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise MoveError(f"field {name!r} needs a finite number, got {value!r}")
    if isinstance(default, int):
        if not float(value).is_integer():
            raise MoveError(f"field {name!r} needs an integer, got {value!r}")
        return int(value)
    return float(value)


def _frames(config, ts):
    ts = np.asarray(ts, dtype=float)
    return ts, np.repeat(config.vertices[None], ts.shape[0], axis=0)


@dataclass(frozen=True)
class Move:
    """
    base class of the move kinds; a move maps (config, t) to a configuration

    Subclasses implement `poses` (or `pose`), a conservative displacement bound over a
    time window and the monotone joint angles they drive (`joint_angles`). Moves whose
    vertices move at a constant rate report it as `speed`, and `edge_groups` labels the
    edges that stay rigid relative to each other.
    """
    kind: ClassVar[str] = None
    registry: ClassVar[dict] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        Move.registry[cls.kind] = cls

    def pose(self, config, t):
        _check_t(t)
        return config.with_vertices(self.poses(config, [t])[0])

    def poses(self, config, ts):
        """vertex positions at every time of ts, shape (k, n, 3)"""
        return np.stack([self.pose(config, float(t)).vertices for t in ts])

    def speed(self, config):
        """upper bound on the displacement rate of any vertex, or None if the move has no constant rate"""
        return None

    def window_bound(self, config, t0, t1):
        return self.speed(config) * (t1 - t0)

    def edge_groups(self, config):
        """
        rigid-group label of every edge, or None

        Two edges with the same label >= 0 keep their relative position over the whole move;
        -1 marks an edge that deforms relative to everything else.
        """
        return None

    def to_dict(self):
        out = {'kind': self.kind}
        for key, value in asdict(self).items():
            out[key] = [_plain(v) for v in value] if isinstance(value, (tuple, list, np.ndarray)) else _plain(value)
        return out

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise MoveError(f"a move must be an object, got {type(data).__name__}")
        data = dict(data)
        kind = data.pop('kind', None)
        if kind not in cls.registry:
            raise MoveError(f"unknown move kind {kind!r}")
        move_cls = cls.registry[kind]
        defaults = {f.name: f.default for f in fields(move_cls)}
        unknown, missing = set(data) - set(defaults), set(defaults) - set(data)
        if unknown or missing:
            raise MoveError(f"malformed {kind} move: unexpected fields {sorted(unknown)}, "
                            f"missing fields {sorted(missing)}")
        return move_cls(**{name: _coerce(name, data[name], default) for name, default in defaults.items()})


def _max_radius(points, origin, direction):
    """largest distance of points from the line origin + s*direction"""
    if len(points) == 0:
        return 0.
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    rel = np.asarray(points) - origin
    return float(np.max(np.linalg.norm(rel - np.outer(rel @ d, d), axis=1)))


@dataclass(frozen=True)
class SingleJointMove(Move):
    """rotate the prefix or suffix of an open chain about an axis through joint v_i"""
    kind: ClassVar[str] = 'single-joint'
    joint: int = 0
    axis: tuple = (0., 0., 1.)
    side: str = 'suffix'
    angle: float = 0.

    def _moving(self, config):
        if config.closed:
            raise MoveError("single-joint moves apply to open chains only")
        if not 0 <= self.joint < config.num_vertices:
            raise MoveError(f"joint {self.joint} out of range")
        if self.side == 'suffix':
            return list(range(self.joint + 1, config.num_vertices))
        if self.side == 'prefix':
            return list(range(0, self.joint))
        raise MoveError(f"side must be 'prefix' or 'suffix', got {self.side!r}")

    def poses(self, config, ts):
        moving = self._moving(config)
        ts, V = _frames(config, ts)
        if moving and self.angle != 0.:
            V[:, moving] = rotate_about_axis(config.vertices[moving], config.vertices[self.joint], self.axis,
                                             self.angle * ts)
        return V

    def speed(self, config):
        moving = self._moving(config)
        return abs(self.angle) * _max_radius(config.vertices[moving], config.vertices[self.joint], self.axis)

    def edge_groups(self, config):
        self._moving(config)
        edges = np.arange(config.num_edges)
        # the joint itself sits on the axis, so both links at it ride with their side
        return (edges >= self.joint if self.side == 'suffix' else edges < self.joint).astype(int)

    def joint_angles(self, config, t):
        return [self.angle * t]


@dataclass(frozen=True)
class SubchainRotation(Move):
    """rotate the vertices strictly between v_a and v_b about the line through them"""
    kind: ClassVar[str] = 'subchain-about-line'
    a: int = 0
    b: int = 2
    angle: float = 0.

    def _moving(self, config):
        n = config.num_vertices
        if not (0 <= self.a < n and 0 <= self.b < n) or self.a == self.b:
            raise MoveError(f"subchain ({self.a}, {self.b}) invalid for {n} vertices")
        return _strictly_between(self.a, self.b, n, config.closed)

    def _axis(self, config):
        origin, other = config.vertices[self.a], config.vertices[self.b]
        return origin, other - origin

    def poses(self, config, ts):
        moving = self._moving(config)
        ts, V = _frames(config, ts)
        if moving and self.angle != 0.:
            origin, direction = self._axis(config)
            V[:, moving] = rotate_about_axis(config.vertices[moving], origin, direction, self.angle * ts)
        return V

    def speed(self, config):
        origin, direction = self._axis(config)
        return abs(self.angle) * _max_radius(config.vertices[self._moving(config)], origin, direction)

    def edge_groups(self, config):
        groups = np.zeros(config.num_edges, dtype=int)
        groups[[self.a] + self._moving(config)] = 1
        return groups

    def joint_angles(self, config, t):
        # the two dihedral joints at v_a and v_b turn together
        return [self.angle * t, self.angle * t]


@dataclass(frozen=True)
class CoupledLift(Move):
    """
    raise link e_{i-1} about v_{i-1} within its vertical plane while the suffix v_i..v_n
    is carried as an exactly vertical segment above v_i
    """
    kind: ClassVar[str] = 'coupled-lift'
    joint: int = 1
    angle: float = 0.

    def _frame(self, config):
        i, V = self.joint, config.vertices
        if config.closed or not 1 <= i < config.num_vertices:
            raise MoveError(f"coupled-lift joint {i} invalid")
        rel = V[i] - V[i - 1]
        horizontal = np.hypot(rel[0], rel[1])
        if horizontal <= config.eta():
            raise MoveError(f"link {i - 1} is vertical; its lifting plane is undefined")
        heading = np.array([rel[0], rel[1], 0.]) / horizontal
        suffix = V[i:] - V[i]
        if np.any(np.abs(suffix[:, :2]) > config.eta()) or np.any(np.diff(suffix[:, 2]) <= 0.):
            raise MoveError(f"suffix above joint {i} is not a rising vertical segment")
        return heading, float(np.arctan2(rel[2], horizontal))

    def poses(self, config, ts):
        i = self.joint
        heading, inclination = self._frame(config)
        ts, V = _frames(config, ts)
        phi = (inclination + self.angle * ts)[:, None]
        tip = config.vertices[i - 1] + config.lengths[i - 1] * (np.cos(phi) * heading + np.sin(phi) * _Z)
        heights = np.concatenate([[0.], np.cumsum(config.lengths[i:])])
        V[:, i:] = tip[:, None, :] + heights[None, :, None] * _Z
        return V

    def speed(self, config):
        # every moving vertex translates with v_i, which moves on a circle of radius l_{i-1}
        self._frame(config)
        return abs(self.angle) * config.lengths[self.joint - 1]

    def edge_groups(self, config):
        groups = np.zeros(config.num_edges, dtype=int)
        groups[self.joint - 1] = -1
        groups[self.joint:] = 1
        return groups

    def joint_angles(self, config, t):
        _, inclination = self._frame(config)
        phi = inclination + self.angle * t
        return [phi, np.pi / 2. + phi]


def _cross2(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _angle_of(v):
    return float(np.arctan2(v[1], v[0]))


def _wrap(a):
    return (a + np.pi) % (2. * np.pi) - np.pi


def _circle_meet(p, rp, q, rq, side):
    """point x with |x - p| = rp, |x - q| = rq on the given side of the line p -> q; None if the circles miss"""
    delta = q - p
    d = np.linalg.norm(delta)
    along = (d**2 + rp**2 - rq**2) / (2. * d)
    h2 = rp**2 - along**2
    if h2 < -1e-12 * max(rp, rq, d)**2:
        return None
    e = delta / d
    normal = np.array([-e[1], e[0]])
    return p + along * e + side * np.sqrt(max(h2, 0.)) * normal


@dataclass(frozen=True)
class FourBarMove(Move):
    """
    one-degree-of-freedom in-plane motion of a closed chain

    The joints (j0, j1, j2, j3) split the polygon into four rigid blocks. The block
    j3..j0 is held fixed; the vertices j0..j3 must share a horizontal plane. With
    driver='first' the block j0..j1 is rotated about j0 by `angle * t`, with
    driver='last' the block j2..j3 is rotated about j3. The two remaining blocks follow
    by closure (circle-circle intersection), keeping the branch of the initial
    configuration.
    """
    kind: ClassVar[str] = 'four-bar'
    joints: tuple = (0, 1, 2, 3)
    angle: float = 0.
    driver: str = 'first'

    def _blocks(self, config):
        if not config.closed:
            raise MoveError("four-bar moves apply to closed chains only")
        n = config.num_vertices
        j0, j1, j2, j3 = self.joints
        if len({j0, j1, j2, j3}) != 4 or not all(0 <= j < n for j in self.joints):
            raise MoveError(f"four-bar joints {self.joints} invalid for {n} vertices")
        # cyclic order check: walking from j0 must meet j1, j2, j3 in that order
        steps = [(j - j0) % n for j in self.joints]
        if not steps[1] < steps[2] < steps[3]:
            raise MoveError(f"four-bar joints {self.joints} are not in cyclic order")
        if self.driver not in ('first', 'last'):
            raise MoveError(f"driver must be 'first' or 'last', got {self.driver!r}")
        moving = [j0] + _strictly_between(j0, j3, n, True) + [j3]
        if np.ptp(config.vertices[moving, 2]) > config.eta():
            raise MoveError("four-bar moves need the moving joints in a horizontal plane")
        driver = _strictly_between(j0, j1, n, True)
        coupler = _strictly_between(j1, j2, n, True)
        follower = _strictly_between(j2, j3, n, True)
        return driver, coupler, follower

    def _solve(self, config, t):
        """positions of j1, j2 and the rotation angles of the three moving blocks at time t"""
        j0, j1, j2, j3 = self.joints
        V = config.vertices[:, :2]
        alpha = self.angle * t
        R = rotation_matrix(_Z, alpha)[:2, :2]
        r12 = np.linalg.norm(V[j2] - V[j1])
        if self.driver == 'first':
            branch = np.sign(_cross2(V[j2] - V[j1], V[j3] - V[j1]))
            p1 = V[j0] + R @ (V[j1] - V[j0])
            p2 = _circle_meet(p1, r12, V[j3], np.linalg.norm(V[j2] - V[j3]), -branch)
            pivot, free = j3, p2
        else:
            branch = np.sign(_cross2(V[j1] - V[j2], V[j0] - V[j2]))
            p2 = V[j3] + R @ (V[j2] - V[j3])
            p1 = _circle_meet(p2, r12, V[j0], np.linalg.norm(V[j1] - V[j0]), -branch)
            pivot, free = j0, p1
        if branch == 0:
            raise MoveError(f"four-bar starts at a singular configuration (joints {self.joints})")
        if free is None:
            raise MoveError(f"four-bar closure unreachable at t={t:.6g}: driving angle {alpha:.6g} "
                            f"at joint {j0 if self.driver == 'first' else j3} cannot be closed through joint {pivot}")
        driver_turn = _wrap(_angle_of(p1 - V[j0]) - _angle_of(V[j1] - V[j0]))
        coupler_turn = _wrap(_angle_of(p2 - p1) - _angle_of(V[j2] - V[j1]))
        follower_turn = _wrap(_angle_of(p2 - V[j3]) - _angle_of(V[j2] - V[j3]))
        return p1, p2, driver_turn, coupler_turn, follower_turn

    def pose(self, config, t):
        _check_t(t)
        driver, coupler, follower = self._blocks(config)
        j0, j1, j2, j3 = self.joints
        V = config.vertices.copy()
        if self.angle == 0.:
            return config.with_vertices(V)
        p1, p2, driver_turn, coupler_turn, follower_turn = self._solve(config, t)
        z = V[j0, 2]
        if driver:
            V[driver] = rotate_about_axis(V[driver], V[j0], _Z, driver_turn)
        if coupler:
            moved = rotate_about_axis(V[coupler], V[j1], _Z, coupler_turn)
            V[coupler] = moved + np.array([p1[0] - V[j1, 0], p1[1] - V[j1, 1], 0.])
        if follower:
            V[follower] = rotate_about_axis(V[follower], V[j3], _Z, follower_turn)
        V[j1] = [p1[0], p1[1], z]
        V[j2] = [p2[0], p2[1], z]
        return config.with_vertices(V)

    def window_bound(self, config, t0, t1):
        driver, coupler, follower = self._blocks(config)
        j0, j1, j2, j3 = self.joints
        V = config.vertices
        ends = [self._solve(config, s) for s in (t0, 0.5 * (t0 + t1), t1)]
        turns = [[e[k] for e in ends] for k in (2, 3, 4)]
        # the followed angles must be monotone over the window, otherwise it is refined
        for series in turns:
            if not (min(series[0], series[2]) - 1e-12 <= series[1] <= max(series[0], series[2]) + 1e-12):
                return float('inf')
        d_driver, d_coupler, d_follower = (abs(s[2] - s[0]) for s in turns)
        driver_r = _max_radius(V[driver + [j1]], V[j0], _Z)
        follower_r = _max_radius(V[follower + [j2]], V[j3], _Z)
        coupler_r = _max_radius(V[coupler + [j2]], V[j1], _Z)
        driver_bound = d_driver * driver_r
        coupler_bound = d_driver * np.linalg.norm(V[j1] - V[j0]) + d_coupler * coupler_r
        follower_bound = d_follower * follower_r
        return float(max(driver_bound, coupler_bound, follower_bound))

    def joint_angles(self, config, t):
        _, _, driver_turn, coupler_turn, follower_turn = self._solve(config, t)
        return [driver_turn, coupler_turn, follower_turn]


@dataclass(frozen=True)
class RigidMove(Move):
    """rigid-body motion of the whole chain (no joint angle changes)"""
    kind: ClassVar[str] = 'rigid'
    center: tuple = (0., 0., 0.)
    axis: tuple = (0., 0., 1.)
    angle: float = 0.
    translation: tuple = (0., 0., 0.)

    def poses(self, config, ts):
        ts, V = _frames(config, ts)
        if self.angle != 0.:
            V = rotate_about_axis(config.vertices, self.center, self.axis, self.angle * ts)
        return V + ts[:, None, None] * np.asarray(self.translation, dtype=float)

    def speed(self, config):
        radius = _max_radius(config.vertices, np.asarray(self.center, dtype=float), self.axis)
        return abs(self.angle) * radius + float(np.linalg.norm(self.translation))

    def edge_groups(self, config):
        return np.zeros(config.num_edges, dtype=int)

    def joint_angles(self, config, t):
        return []


@dataclass
class MotionPlan:
    initial: ChainConfig
    moves: list = field(default_factory=list)

    def to_dict(self):
        return {'initial': self.initial.to_dict(), 'moves': [m.to_dict() for m in self.moves]}

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise MoveError(f"a plan must be an object, got {type(data).__name__}")
        try:
            initial = ChainConfig.from_dict(data['initial'])
            moves = data['moves']
        except KeyError as e:
            raise MoveError(f"plan object is missing field {e}")
        if not isinstance(moves, list):
            raise MoveError(f"plan moves must be a list, got {type(moves).__name__}")
        return cls(initial, [Move.from_dict(m) for m in moves])


def pose_at(move, config, t):
    """
    configuration reached by `move` from `config` at time t in [0, 1]

    arguments
        move : Move
        config : ChainConfig
        t : float
    returns
        config_t : ChainConfig
    """
    return move.pose(config, t)


def configurations(plan):
    """start configuration of every move followed by the final configuration"""
    out = [plan.initial]
    for move in plan.moves:
        out.append(move.pose(out[-1], 1.))
    return out


def apply(plan):
    """compose every move of the plan at t = 1"""
    return configurations(plan)[-1]


@dataclass(frozen=True)
class ValidationPolicy:
    tol: float = None # clearance threshold; defaults to the chain's eta
    samples: int = DEFAULT_SAMPLES
    max_steps: int = MAX_STEPS
    length_tol: float = LENGTH_TOL


@dataclass
class MoveRecord:
    index: int
    kind: str
    samples: int = 0
    min_clearance: float = float('inf')
    max_drift: float = 0.
    margin: float = float('inf')
    passed: bool = True
    failure: str = None
    witness: tuple = None


@dataclass
class ValidationReport:
    certified: bool
    records: list
    failure: str = None

    @property
    def min_clearance(self):
        return min((r.min_clearance for r in self.records), default=float('inf'))

    @property
    def max_drift(self):
        return max((r.max_drift for r in self.records), default=0.)


def _length_drift(vertices, config):
    """largest relative link-length drift of a pose (n, 3), or of every pose of a batch (k, n, 3)"""
    V = np.asarray(vertices)
    ends = np.roll(V, -1, axis=-2) if config.closed else V[..., 1:, :]
    starts = V if config.closed else V[..., :-1, :]
    current = np.linalg.norm(ends - starts, axis=-1)
    return np.max(np.abs(current - config.lengths) / config.lengths, axis=-1)


def _clearance(config):
    pairs, clearances = pair_clearances(config.vertices, config.closed)
    if not clearances.size:
        return float('inf'), None
    k = int(np.argmin(clearances))
    return float(clearances[k]), pairs[k]


def frame_clearances(move, config, frames):
    """
    clearance and witness edge pair of every pose of a move

    Pairs the move keeps rigid (same edge group) are measured once on the start
    configuration; only the remaining pairs are measured per pose.

    arguments
        move : Move
        config : ChainConfig
            start configuration of the move
        frames : np.ndarray of shape (k, n, 3)
    returns
        clearances : np.ndarray of shape (k,)
        witnesses : list of (int, int) or None
    """
    pairs, first, second, _ = edge_pairs(config.num_vertices, config.closed)
    k = frames.shape[0]
    if not pairs:
        return np.full(k, np.inf), [None] * k
    groups = move.edge_groups(config)
    if groups is None:
        rigid = np.zeros(len(pairs), dtype=bool)
    else:
        rigid = (groups[first] == groups[second]) & (groups[first] >= 0)
    fixed_pairs, fixed = pair_clearances(config.vertices, config.closed, select=rigid)
    varying_pairs, varying = pair_clearances(frames, config.closed, select=~rigid)
    table = np.concatenate([np.broadcast_to(fixed, (k, fixed.size)), varying], axis=1)
    names = fixed_pairs + varying_pairs
    best = np.argmin(table, axis=1)
    return table[np.arange(k), best], [names[b] for b in best]


def _record_sample(record, t, clearance, pair, drift, tol, policy):
    """account one sampled pose; False once the move has failed"""
    record.samples += 1
    record.min_clearance = min(record.min_clearance, clearance)
    record.max_drift = max(record.max_drift, drift)
    if clearance <= tol:
        record.passed, record.witness = False, pair
        record.failure = f"move {record.index} ({record.kind}): clearance {clearance:.3e} between edges {pair} " \
                         f"at t={t:.6g}"
        return False
    if drift > policy.length_tol:
        record.passed = False
        record.failure = f"move {record.index} ({record.kind}): link length drift {drift:.3e} at t={t:.6g}"
        return False
    return True


def _grid_walk(move, config, policy, tol, record):
    """
    certify the uniform grid of a constant-rate move in one batch

    returns
        t : float or None
            time the adaptive walk resumes from, None once the record is final
    """
    speed = move.speed(config)
    if speed is None:
        return 0.
    ts = np.arange(policy.samples + 1) / policy.samples
    frames = move.poses(config, ts)
    clearances, witnesses = frame_clearances(move, config, frames)
    drifts = _length_drift(frames, config)
    window = speed / policy.samples
    for t, clearance, pair, drift in zip(ts.tolist(), clearances.tolist(), witnesses, drifts.tolist()):
        if not _record_sample(record, t, clearance, pair, drift, tol, policy) or t >= 1.:
            return None
        if not window < 0.5 * clearance:
            # the adaptive walk measures this pose again
            record.samples -= 1
            return t
        record.margin = min(record.margin, 0.5 * clearance - window)
    return None


def validate_move(move, config, policy=ValidationPolicy(), index=0):
    """
    conservative-advancement certification of a single move

    At every step the displacement bound of the window must stay below half of the
    clearance at the window start; the window is halved until it does. Constant-rate
    moves are first checked on the uniform grid in one batch, and the adaptive walk
    takes over at the first window the grid cannot certify.

    returns
        record : MoveRecord
    """
    tol = config.eta() if policy.tol is None else policy.tol
    record = MoveRecord(index, move.kind)
    try:
        t = _grid_walk(move, config, policy, tol, record)
    except MoveError as e:
        record.passed, record.failure = False, f"move {index} ({move.kind}) failed at t=0: {e}"
        return record
    if t is None:
        return record
    h_max = 1. / policy.samples
    h_min = 1. / policy.max_steps
    h = h_max
    while True:
        try:
            current = move.pose(config, t)
        except MoveError as e:
            record.passed, record.failure = False, f"move {index} ({move.kind}) failed at t={t:.6g}: {e}"
            return record
        clearance, pair = _clearance(current)
        if not _record_sample(record, t, clearance, pair, float(_length_drift(current.vertices, config)), tol,
                              policy):
            return record
        if t >= 1.:
            return record
        h = min(2. * h, h_max, 1. - t)
        while True:
            try:
                bound = move.window_bound(config, t, t + h)
            except MoveError:
                bound = float('inf')
            if bound < 0.5 * clearance:
                break
            h *= 0.5
            if h < h_min:
                record.passed = False
                record.failure = f"move {index} ({move.kind}): step budget exhausted at t={t:.6g} " \
                                 f"(clearance {clearance:.3e})"
                return record
        record.margin = min(record.margin, 0.5 * clearance - bound)
        if record.samples >= policy.max_steps:
            record.passed = False
            record.failure = f"move {index} ({move.kind}): more than {policy.max_steps} steps"
            return record
        t = min(1., t + h)


def validate(plan, policy=ValidationPolicy()):
    """
    certify that every move of a plan keeps the chain simple with fixed link lengths

    arguments
        plan : MotionPlan
        policy : ValidationPolicy
    returns
        report : ValidationReport
            uncertified reports carry the first failure; this never raises for a failing plan
    """
    records, failure = [], None
    config = plan.initial
    for index, move in enumerate(plan.moves):
        record = validate_move(move, config, policy, index)
        records.append(record)
        if not record.passed:
            failure = record.failure
            _logger.warning(f"plan not certified: {failure}")
            break
        _logger.debug(f"move {index} ({move.kind}) certified in {record.samples} samples, "
                      f"min clearance {record.min_clearance:.3e}")
        config = move.pose(config, 1.)
    return ValidationReport(failure is None, records, failure)


def resample_check(plan, samples_per_move):
    """
    uniform dense re-sampling audit of a plan

    returns
        min_clearance : float
            smallest clearance seen over all uniform samples of all moves
    """
    lowest = float('inf')
    for config, move in zip(configurations(plan), plan.moves):
        frames = move.poses(config, np.linspace(0., 1., samples_per_move + 1))
        lowest = min(lowest, float(frame_clearances(move, config, frames)[0].min()))
    return lowest


@dataclass
class SceneFrames:
    times: list
    configs: list

    def to_dict(self):
        frames = zip(self.times, self.configs)
        return {'frames': [{'t': float(t), 'vertices': c.to_dict()['vertices']} for t, c in frames]}


def sample_frames(plan, per_move=16):
    """snapshots of a plan; move k covers the global time interval [k, k + 1]"""
    times, configs = [0.], [plan.initial]
    for k, (config, move) in enumerate(zip(configurations(plan), plan.moves)):
        for t in np.linspace(0., 1., per_move + 1)[1:]:
            times.append(k + float(t))
            configs.append(move.pose(config, float(t)))
    return SceneFrames(times, configs)
