"""
chainlock
planning and certifying reconfigurations of polygonal chains: straightening, convexifying, locked examples
"""

# Add imports here
from .geom_core import ChainlockError, GeometryError, PlanningError
from .chain_model import (ChainConfig, ChainError, SubchainRange, make_chain, is_simple, shape_classify, project, lift,
                          random_nonconvex_polygon, random_simple_planar_chain, random_simple_polygon)
from .motion import MotionPlan, ValidationPolicy, validate
from .straighten_projection import find_simple_projection, simple_projections, straighten, straighten_chain
from .flip_convexify import convexify_flips
from .arch_convexify import convexify_arch
from .locked_examples import (NeedleParams, complete_exterior, knot_determinant, make_knitting_needles,
                              make_locked_closed)

__version__ = "0.1.0"
