"""
cli.py
command-line entry point: planners, generators, the validator and frame export
"""

#IMPORTS
import argparse
import json
import sys

import numpy as np

from chainlock.geom_core import ChainlockError, GeometryError, PlanningError
from chainlock.chain_model import (ChainError, ProjectionError, lift, project, random_nonconvex_polygon,
                                   random_simple_planar_chain, random_simple_polygon)
from chainlock.motion import MoveError, ValidationPolicy, DEFAULT_SAMPLES, sample_frames, validate
from chainlock.straighten_projection import DEFAULT_BUDGET, find_simple_projection, straighten_chain
from chainlock.flip_convexify import MAX_FLIPS, convexify_flips
from chainlock.arch_convexify import convexify_arch
from chainlock.locked_examples import (KnotError, complete_exterior, knot_determinant, make_knitting_needles,
                                       make_locked_closed)
from chainlock.utils import read_chain, read_plan, serialize

#######LOGGING#############################
import logging
_logger = logging.getLogger("chainlock.cli")
_logger.setLevel(logging.INFO)
###########################################

EXIT_OK, EXIT_FAILED, EXIT_MALFORMED = 0, 1, 2

SHAPES = ('needles-open', 'needles-closed', 'needles-completed', 'random-polygon', 'random-nonconvex', 'random-chain')


class MalformedInput(ChainlockError):
    """unreadable or invalid input file"""


def _load(reader, filename):
    try:
        return reader(filename)
    except (OSError, json.JSONDecodeError, TypeError, ValueError, ChainError, GeometryError, MoveError) as e:
        raise MalformedInput(f"cannot read {filename}: {e}")


def _policy(args):
    return ValidationPolicy(tol=args.tol, samples=args.samples)


def _certify(plan, args):
    report = validate(plan, _policy(args))
    if not report.certified:
        print(f"plan not certified: {report.failure}")
        return False
    print(f"certified {len(plan.moves)} moves, min clearance {report.min_clearance:.6g}, "
          f"max length drift {report.max_drift:.3e}")
    return True


def cmd_straighten(args):
    config = _load(read_chain, args.input)
    if config.closed:
        raise MalformedInput("straighten needs an open chain")
    plan = straighten_chain(config, args.budget, args.seed)
    if plan is None:
        print(f"no usable simple projection among {args.budget} directions")
        return EXIT_FAILED
    if not _certify(plan, args):
        return EXIT_FAILED
    serialize(plan, args.out)
    return EXIT_OK


def cmd_convexify(args):
    polygon = _load(read_chain, args.input)
    if not polygon.closed:
        raise MalformedInput("convexify needs a closed polygon")
    if args.method == 'flips':
        run = convexify_flips(polygon, args.max_flips)
        plan, convex = run.plan, run.convex
        print(f"{run.flips} flips, area {run.areas[0]:.6g} -> {run.areas[-1]:.6g}")
    else:
        plan, report = convexify_arch(polygon, _policy(args))
        convex = True
        if report.epsilon is None:
            print("polygon is already convex")
        else:
            print(f"{report.rounds} rounds, {report.total_moves} moves, epsilon {report.epsilon:.3e}")
    certified = _certify(plan, args)
    serialize(plan, args.out)
    if not convex:
        print("flip budget exhausted before the polygon became convex")
    return EXIT_OK if certified and convex else EXIT_FAILED


def cmd_gen(args):
    if args.shape == 'needles-open':
        config = make_knitting_needles()
    elif args.shape == 'needles-closed':
        config = make_locked_closed()
    elif args.shape == 'needles-completed':
        config = complete_exterior(make_knitting_needles())
    elif args.shape == 'random-polygon':
        config = random_simple_polygon(args.n, seed=args.seed)
    elif args.shape == 'random-nonconvex':
        config = random_nonconvex_polygon(args.n, seed=args.seed)
    else:
        config = lift(random_simple_planar_chain(args.n, seed=args.seed), 0.1, seed=args.seed)
    serialize(config, args.out)
    print(f"wrote {'closed' if config.closed else 'open'} chain of {config.num_vertices} vertices to {args.out}")
    return EXIT_OK


def cmd_validate(args):
    plan = _load(read_plan, args.plan)
    return EXIT_OK if _certify(plan, args) else EXIT_FAILED


def cmd_project(args):
    config = _load(read_chain, args.input)
    if args.direction is None:
        found = find_simple_projection(config, args.budget, args.seed)
        if found is None:
            print(f"no simple projection among {args.budget} directions")
            return EXIT_FAILED
        direction = found[0]
    else:
        direction = np.asarray(args.direction, dtype=float)
    try:
        planar, certificate = project(config, direction)
    except ProjectionError as e:
        print(f"degenerate projection: {e}")
        return EXIT_FAILED
    serialize(planar, args.out)
    if certificate is None:
        print(f"projection along {direction.tolist()} is not simple")
        return EXIT_FAILED
    print(f"simple projection along {direction.tolist()}: clearance {certificate.min_projected_clearance:.6g}, "
          f"shortest edge {certificate.min_projected_edge_length:.6g}")
    return EXIT_OK


def cmd_knot_det(args):
    config = _load(read_chain, args.input)
    if not config.closed:
        raise MalformedInput("knot determinant needs a closed chain")
    print(knot_determinant(config, budget=args.budget, seed=args.seed))
    return EXIT_OK


def cmd_export_frames(args):
    plan = _load(read_plan, args.plan)
    serialize(sample_frames(plan, args.per_move), args.out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='chainlock', description='plan and certify polygonal chain reconfigurations')
    parser.add_argument('--verbose', action='store_true', help='debug logging')
    commands = parser.add_subparsers(dest='command', required=True)

    def add(name, handler, help):
        sub = commands.add_parser(name, help=help)
        sub.set_defaults(handler=handler)
        sub.add_argument('--seed', type=int, default=0)
        sub.add_argument('--samples', type=int, default=DEFAULT_SAMPLES)
        sub.add_argument('--tol', type=float, default=None)
        sub.add_argument('--budget', type=int, default=DEFAULT_BUDGET)
        return sub

    sub = add('straighten', cmd_straighten, 'straighten an open chain with a simple projection')
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--out', required=True)

    sub = add('convexify', cmd_convexify, 'convexify a planar simple polygon')
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--out', required=True)
    sub.add_argument('--method', choices=('flips', 'arch'), default='arch')
    sub.add_argument('--max-flips', type=int, default=MAX_FLIPS)

    sub = add('gen', cmd_gen, 'write a generated chain')
    sub.add_argument('--shape', choices=SHAPES, required=True)
    sub.add_argument('--n', type=int, default=8)
    sub.add_argument('--out', required=True)

    sub = add('validate', cmd_validate, 'certify a motion plan')
    sub.add_argument('--plan', required=True)

    sub = add('project', cmd_project, 'orthogonal projection of a chain')
    sub.add_argument('--in', dest='input', required=True)
    sub.add_argument('--out', required=True)
    sub.add_argument('--direction', type=float, nargs=3, default=None)

    sub = add('knot-det', cmd_knot_det, 'knot determinant of a closed chain')
    sub.add_argument('--in', dest='input', required=True)

    sub = add('export-frames', cmd_export_frames, 'sample a plan into frames')
    sub.add_argument('--plan', required=True)
    sub.add_argument('--out', required=True)
    sub.add_argument('--per-move', type=int, default=16)
    return parser


def run(argv=None):
    """
    run one subcommand

    returns
        code : int
            0 on success, 1 when a plan fails or a planner gives up, 2 on malformed input or usage
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_MALFORMED if e.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    if args.verbose:
        for name in list(logging.root.manager.loggerDict):
            if name.startswith("chainlock"):
                logging.getLogger(name).setLevel(logging.DEBUG)
    try:
        return args.handler(args)
    except (MalformedInput, ChainError) as e:
        print(e, file=sys.stderr)
        return EXIT_MALFORMED
    except (PlanningError, KnotError) as e:
        print(f"{args.command} failed: {e}", file=sys.stderr)
        return EXIT_FAILED


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
