"""Greedy by breadth.

Operators are taken in decreasing order of breadth, the total size of the
allocations made within their scope, on the assumption that large
allocations cluster by operator. Within an operator records are placed
largest first, each at its best fit offset.
"""
import collections

from .greedy_by_size import GreedyBySizeStrategy


class GreedyByBreadthStrategy(GreedyBySizeStrategy):
    """Class for greedy_by_breadth planning."""

    name = 'greedy_by_breadth'

    def order(self, trace):
        """Records grouped by operator in decreasing breadth."""
        groups = collections.defaultdict(list)
        for r in trace.records:
            groups[r.op_scope].append(r)
        ops = sorted(groups.keys(),
                     key=lambda op: (-sum(r.size for r in groups[op]),
                                     min(r.start for r in groups[op]),
                                     op))
        ordered = []
        for op in ops:
            ordered.extend(sorted(groups[op], key=lambda r: (-r.size, r.start, r.id)))
        return ordered
