"""Static memory planning for tensor allocation traces."""
import sys
from ._version import __version__
from .trace_model import *
from .tagging import *
from .plans import *
from .planner import *
from .strategies import get_strategy, STRATEGIES
from .plan_check import *
from .heap_map import HeapMap, Rectangle, build_heap_map, render_heap_map_svg
from .graph_ir import *

if sys.version_info < (3, 6):  # pragma: no cover
    raise Exception("Must use python 3.6 or greater!")  # pragma: no cover
