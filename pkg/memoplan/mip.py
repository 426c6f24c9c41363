"""Exact planning by branch and bound over pairwise orderings.

Two records with overlapping lifetimes must have disjoint address extents,
so in any valid plan one of them lies entirely below the other. Fixing that
choice for every overlapping pair gives a constraint graph whose longest
paths are the lowest offsets consistent with the choices, and the smallest
slab over all acyclic choices is the optimum.

Records are decided one at a time, largest first. Deciding a record means
choosing which of its already decided lifetime-overlapping neighbours lie
below it, the others lie above it. A node of the search is pruned once its
lower bound, the larger of the peak of aligned live bytes and the highest
extent placed so far, reaches the best plan found. The search starts from
the greedy_by_size plan.

Offsets are multiples of the alignment and edges use aligned sizes, so the
longest path offsets are aligned and the optimum is exact at any alignment.
"""
import itertools

from .greedy_by_size import GreedyBySizeStrategy
from .plans import Timeout
from .strategy import Strategy
from .trace_model import peak_live_bytes


class SearchNode(object):
    """Partial plan in the branch and bound search.

    Attributes:
      depth - number of records decided, in search order
      offsets - dict of record id to lowest offset consistent with the
        ordering decisions so far
      above - dict of record id to frozenset of ids decided to lie above it
      lower_bound - bytes, no completion of this node can use less
    """

    __slots__ = ('depth', 'offsets', 'above', 'lower_bound')

    def __init__(self, depth=0, offsets=None, above=None, lower_bound=0):
        """Initialize SearchNode, the root by default."""
        self.depth = depth
        self.offsets = {} if offsets is None else offsets
        self.above = {} if above is None else above
        self.lower_bound = lower_bound

    def reaches(self, start, targets):
        """True if any id in targets lies above start through decided orderings."""
        stack = [start]
        seen = set(stack)
        while stack:
            u = stack.pop()
            for v in self.above.get(u, ()):
                if v in targets:
                    return True
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False


class MipStrategy(Strategy):
    """Class for exact (mip) planning."""

    name = 'mip'

    def __init__(self, config=None):
        """Initialize MipStrategy."""
        super(MipStrategy, self).__init__(config)
        self.nodes_expanded = 0

    def incumbent(self, trace):
        """Greedy by size offsets used as the first best plan.

        Runs against this strategy's deadline, a timeout is reported as mip's.
        """
        greedy = GreedyBySizeStrategy(self.config)
        greedy.deadline = self.deadline
        try:
            return greedy.assign_offsets(trace)
        except Timeout:
            raise Timeout(self.name, self.config.timeout)

    def children(self, node, record, neighbours, sizes, bound):
        """Generate child SearchNodes deciding record, fewest neighbours below first."""
        rid = record.id
        for num_below in range(len(neighbours) + 1):
            for below in itertools.combinations(neighbours, num_below):
                below = frozenset(below)
                above = [n for n in neighbours if n not in below]
                if len(below) > 0 and any(node.reaches(a, below) for a in above):
                    continue  # would make a cycle
                offsets = dict(node.offsets)
                offsets[rid] = max([offsets[b] + sizes[b] for b in below] or [0])
                edges = dict(node.above)
                for b in below:
                    edges[b] = edges.get(b, frozenset()) | {rid}
                edges[rid] = frozenset(above)
                worklist = [rid]
                while worklist:
                    u = worklist.pop()
                    top = offsets[u] + sizes[u]
                    for v in edges[u]:
                        if offsets[v] < top:
                            offsets[v] = top
                            worklist.append(v)
                extent = max(offsets[i] + sizes[i] for i in offsets)
                yield SearchNode(node.depth + 1, offsets, edges, max(bound, extent))

    def assign_offsets(self, trace):
        """Optimal offsets by depth first branch and bound."""
        records = sorted(trace.records, key=lambda r: (-r.size, r.start, r.id))
        if len(records) == 0:
            return {}
        sizes = {r.id: self.align(r.size) for r in records}
        bound = peak_live_bytes(trace, self.alignment)
        best_offsets = self.incumbent(trace)
        best_total = self.total_size(trace, best_offsets)
        self.log.debug("Incumbent %d bytes, lower bound %d bytes", best_total, bound)
        neighbours = {}
        stack = [(None, iter([SearchNode(lower_bound=bound)]))]
        while stack:
            self.check_deadline()
            child = next(stack[-1][1], None)
            if child is None:
                stack.pop()
                continue
            self.nodes_expanded += 1
            if child.lower_bound >= best_total:
                continue
            if child.depth == len(records):
                best_offsets, best_total = child.offsets, child.lower_bound
                self.log.debug("Improved plan %d bytes after %d nodes", best_total, self.nodes_expanded)
                continue
            record = records[child.depth]
            if child.depth not in neighbours:
                neighbours[child.depth] = [q.id for q in records[:child.depth]
                                           if q.lifetime.overlaps(record.lifetime)]
            stack.append((child, self.children(child, record, neighbours[child.depth], sizes, bound)))
        self.log.info("Search expanded %d nodes", self.nodes_expanded)
        return best_offsets
