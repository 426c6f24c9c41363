"""Bump allocation, the no-reuse baseline."""
from .strategy import Strategy


class BumpStrategy(Strategy):
    """Class for bump allocation: a cursor bumped past every allocation."""

    name = 'bump_allocation'

    def assign_offsets(self, trace):
        """Offsets in lifetime start order (ties by id), no reuse ever."""
        offsets = {}
        cursor = 0
        for r in sorted(trace.records, key=lambda r: (r.start, r.id)):
            offsets[r.id] = cursor
            cursor += self.align(r.size)
        return offsets
