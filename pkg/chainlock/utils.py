"""
utils.py
file input/output for chains, plans and frames
"""
import bz2
import gzip
import json

from chainlock.chain_model import ChainConfig
from chainlock.motion import MotionPlan


def _opener(filename):
    if filename.endswith('.gz'):
        return gzip.open
    if filename.endswith('.bz2'):
        return bz2.open
    return open


def serialize(item, filename):
    """
    Serialize a ChainConfig, MotionPlan, SceneFrames or plain dict to json.

    Floats are written with repr precision, so reading the file back reproduces them
    exactly. Filenames ending in .gz or .bz2 are compressed.

    arguments
        item : object with `to_dict`, or dict
        filename : str
    """
    data = item.to_dict() if hasattr(item, 'to_dict') else item
    with _opener(filename)(filename, 'wt') as outfile:
        json.dump(data, outfile, indent=1)


def deserialize(filename):
    """
    load a json file

    arguments
        filename : str
    returns
        data : dict
    """
    with _opener(filename)(filename, 'rt') as infile:
        return json.load(infile)


def read_chain(filename):
    return ChainConfig.from_dict(deserialize(filename))


def read_plan(filename):
    return MotionPlan.from_dict(deserialize(filename))
