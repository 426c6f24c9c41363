"""Greedy by size with best fit gaps.

Records are taken largest first and each is put into the smallest gap,
between already placed records with overlapping lifetimes, that is big
enough.
"""
from .strategy import BestFitPlacer, Strategy


class GreedyBySizeStrategy(Strategy):
    """Class for greedy_by_size planning."""

    name = 'greedy_by_size'

    def order(self, trace):
        """Decreasing size, then earlier lifetime start, then smaller id."""
        return sorted(trace.records, key=lambda r: (-r.size, r.start, r.id))

    def assign_offsets(self, trace):
        """Place records in order() at their best fit offsets."""
        placer = BestFitPlacer(self, trace.num_timesteps)
        for r in self.order(trace):
            placer.place(r, placer.best_fit(r))
        return placer.offsets
