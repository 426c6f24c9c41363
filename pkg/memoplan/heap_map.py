"""Heap maps: planned records drawn as time x address rectangles.

The map of a valid plan has one rectangle per record spanning its lifetime
horizontally and its address extent vertically, address 0 at the bottom.
SVG output is drawn with matplotlib. The SVG id hash salt is fixed and no
date is written, so equal maps give identical bytes.
"""
import collections

import matplotlib
from matplotlib import patches
from matplotlib.figure import Figure

from .plan_check import InvalidPlan, check_plan

FIGSIZE = (8.0, 5.0)  # inches
HASH_SALT = 'memoplan'
FILLS = ['#4e79a7', '#f28e2b', '#e15759', '#76b7b2', '#59a14f',
         '#edc948', '#b07aa1', '#ff9da7', '#9c755f', '#bab0ac']


class Rectangle(collections.namedtuple('Rectangle', ['id', 'start', 'end', 'low', 'high'])):
    """Record drawn over timesteps [start, end) and addresses [low, high)."""

    __slots__ = ()

    @property
    def area(self):
        """Size times lifetime length."""
        return (self.end - self.start) * (self.high - self.low)


class HeapMap(object):
    """Rectangles of a plan in a width (timesteps) by height (bytes) box."""

    def __init__(self, rectangles=None, width=0, height=0):
        """Initialize HeapMap."""
        self.rectangles = [] if rectangles is None else list(rectangles)
        self.width = width
        self.height = height

    def __len__(self):
        """Number of rectangles."""
        return len(self.rectangles)


def build_heap_map(trace, plan):
    """HeapMap for plan over trace, raise InvalidPlan if the plan does not check."""
    report = check_plan(trace, plan)
    if not report.valid:
        raise InvalidPlan(report)
    excluded = set(plan.excluded)
    rectangles = []
    for r in sorted(trace.records, key=lambda r: r.id):
        if r.id in excluded:
            continue
        offset = plan.offsets[r.id]
        rectangles.append(Rectangle(r.id, r.start, r.end, offset, offset + r.size))
    return HeapMap(rectangles, width=trace.num_timesteps, height=plan.total_size)


def render_heap_map_svg(heap_map, out):
    """Write heap_map as an SVG document to the binary file handle out.

    Each record is a patch in its own group with id record-<id>.
    """
    with matplotlib.rc_context({'svg.hashsalt': HASH_SALT, 'svg.fonttype': 'none'}):
        fig = Figure(figsize=FIGSIZE)
        ax = fig.add_subplot(1, 1, 1)
        for rect in heap_map.rectangles:
            ax.add_patch(patches.Rectangle((rect.start, rect.low), rect.end - rect.start,
                                           rect.high - rect.low,
                                           facecolor=FILLS[rect.id % len(FILLS)],
                                           edgecolor='#333333', linewidth=0.5,
                                           gid='record-%d' % (rect.id)))
        ax.set_xlim(0, max(1, heap_map.width))
        ax.set_ylim(0, max(1, heap_map.height))
        ax.set_xlabel('timestep')
        ax.set_ylabel('bytes')
        ax.set_title('%d records, %d bytes' % (len(heap_map), heap_map.height))
        fig.savefig(out, format='svg', metadata={'Date': None})
