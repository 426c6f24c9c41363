"""Gergov's approach: an infeasible packing made feasible by best fit.

Let L be the peak of aligned live bytes, no plan can be smaller.

The infeasible packing sweeps records in lifetime start order and puts each
record b at height h(b), the aligned bytes of the records swept before it
that are live at its start. Any swept record live at a later timestep of b
started no later than b and so is also live at b's start, so the load under
b never grows during its lifetime and

    h(b) + align(size(b)) <= L

for every record. The packing has height at most L but records that meet
in time may share addresses.

The conversion takes records in increasing tentative height and moves each
to the smallest gap, among already placed records with overlapping
lifetimes, that can hold it, at the position in that gap nearest its
tentative height. This best fit conversion in tentative height order is
what the (3 + e) L guarantee of the construction rests on. The bound is not
enforced, a plan above 3 L is logged as a warning.
"""
import numpy as np

from .strategy import BestFitPlacer, Strategy
from .trace_model import peak_live_bytes

BOUND = 3


class GergovStrategy(Strategy):
    """Class for gergov planning."""

    name = 'gergov'

    def tentative_heights(self, trace):
        """Dict of record id to tentative (possibly overlapping) height."""
        load = np.zeros(trace.num_timesteps, dtype=np.int64)
        heights = {}
        for n, r in enumerate(sorted(trace.records, key=lambda r: (r.start, r.id))):
            if n % 1024 == 0:
                self.check_deadline()
            heights[r.id] = int(load[r.start])
            load[r.start:r.end] += self.align(r.size)
        return heights

    def best_fit_near(self, placer, record, height):
        """Offset in the smallest adequate gap for record, nearest height within it."""
        best = None
        for offset, length in placer.gaps(record):
            if length is None:
                return offset if best is None else best[2]
            lo, hi = offset, self.align_down(offset + length - record.size)
            pos = min(max(self.align(height), lo), hi)
            key = (length, abs(pos - height), pos)
            if best is None or key < best:
                best = key
        return best[2]

    def assign_offsets(self, trace):
        """Best fit conversion of the tentative heights."""
        heights = self.tentative_heights(trace)
        placer = BestFitPlacer(self, trace.num_timesteps)
        for r in sorted(trace.records, key=lambda r: (heights[r.id], r.start, r.id)):
            placer.place(r, self.best_fit_near(placer, r, heights[r.id]))
        load = peak_live_bytes(trace, self.alignment)
        top = max([placer.offsets[r.id] + r.size for r in trace.records] or [0])
        if self.align(top) > BOUND * load:
            self.log.warning("Plan of %d bytes exceeds %d times the peak load of %d bytes",
                             self.align(top), BOUND, load)
        return placer.offsets
