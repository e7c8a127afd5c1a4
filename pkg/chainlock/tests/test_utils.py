"""
test_utils.py
"""
import os

import numpy as np
import pytest

from chainlock.chain_model import dart, unit_square
from chainlock.motion import FourBarMove, MotionPlan, MoveError
from chainlock.utils import deserialize, read_chain, read_plan, serialize

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


@pytest.mark.parametrize("suffix", ['.json', '.json.gz', '.json.bz2'])
def test_chain_file(tmp_path, suffix):
    filename = str(tmp_path / f"square{suffix}")
    serialize(unit_square(), filename)
    chain = read_chain(filename)
    assert chain.closed
    assert np.array_equal(chain.vertices, unit_square().vertices)


def test_plan_file(tmp_path):
    filename = str(tmp_path / "plan.json")
    plan = MotionPlan(unit_square(), [FourBarMove(joints=(0, 1, 2, 3), angle=0.25)])
    serialize(plan, filename)
    again = read_plan(filename)
    assert again.moves == plan.moves
    assert deserialize(filename)['moves'][0]['kind'] == 'four-bar'


def test_malformed_plan(tmp_path):
    filename = str(tmp_path / "plan.json")
    serialize({'initial': unit_square().to_dict()}, filename)
    with pytest.raises(MoveError):
        read_plan(filename)


def test_packaged_data():
    assert np.array_equal(read_chain(os.path.join(DATA, 'dart.json')).vertices, dart().vertices)
    zigzag = read_chain(os.path.join(DATA, 'zigzag.json'))
    assert not zigzag.closed and zigzag.num_edges == 5
