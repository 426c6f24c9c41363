"""Base class for planning strategies.

Each strategy module defines one Strategy subclass that implements
assign_offsets(). The base class deals with timing, timeouts, exclusion of
escaped records, alignment and building the Plan.
"""
import logging
import time

from .plans import Plan, StrategyConfig, Timeout, align_up

CHECK_EVERY = 256  # records placed between deadline checks


class Strategy(object):
    """Base class for memory planning strategies -- let's call them Strategies."""

    name = None

    def __init__(self, config=None):
        """Initialize Strategy."""
        self.config = StrategyConfig(strategy=self.name) if config is None else config
        self.deadline = None
        self.log = logging.getLogger(name="memoplan.%s" % (self.name or 'strategy'))

    @property
    def alignment(self):
        """Alignment in bytes."""
        return self.config.alignment

    def align(self, n):
        """Round n up to alignment."""
        return align_up(n, self.config.alignment)

    def align_down(self, n):
        """Round n down to alignment."""
        return n - n % self.config.alignment

    def check_deadline(self):
        """Raise Timeout if the deadline has passed."""
        if self.deadline is not None and time.monotonic() >= self.deadline:
            raise Timeout(self.name, self.config.timeout)

    def assign_offsets(self, trace):
        """Return dict of record id to offset, implemented by subclasses."""
        raise NotImplementedError("Not implemented in base class")

    def total_size(self, trace, offsets):
        """Slab size needed for offsets: highest extent end rounded to alignment."""
        top = 0
        for r in trace.records:
            top = max(top, offsets[r.id] + r.size)
        return self.align(top)

    def plan(self, trace):
        """Plan trace, returning a Plan.

        Raises Timeout if config.timeout seconds elapse first.
        """
        t0 = time.monotonic()
        if self.config.timeout is not None:
            self.deadline = t0 + self.config.timeout
        self.check_deadline()
        excluded = []
        if self.config.exclude_escaped:
            excluded = [r.id for r in trace.records if r.escaped]
            trace = trace.without_escaped()
        offsets = self.assign_offsets(trace)
        total = self.total_size(trace, offsets)
        ms = (time.monotonic() - t0) * 1000.0
        self.log.info("Planned %d records with %s in %.1fms, total size %d",
                      len(trace), self.name, ms, total)
        return Plan(total_size=total, offsets=offsets, strategy=self.name,
                    alignment=self.alignment, planning_time_ms=ms,
                    excluded=excluded)


class BestFitPlacer(object):
    """Incremental placement of records in address space.

    Placed records are indexed by the timesteps of their lifetimes so that
    the placed records overlapping a new record's lifetime are found without
    scanning everything placed so far.
    """

    def __init__(self, strategy, num_timesteps):
        """Initialize empty placement."""
        self.strategy = strategy
        self.live = [[] for _ in range(num_timesteps)]
        self.offsets = {}
        self.ends = {}
        self.num_placed = 0

    def overlapping_extents(self, record):
        """Sorted (offset, end) extents of placed records overlapping record's lifetime."""
        seen = set()
        extents = []
        for t in range(record.start, record.end):
            for rid in self.live[t]:
                if rid not in seen:
                    seen.add(rid)
                    extents.append((self.offsets[rid], self.ends[rid]))
        extents.sort()
        return extents

    def gaps(self, record):
        """Candidate (offset, gap_length) positions for record.

        Interior gaps between lifetime-overlapping placed records that are
        big enough come first in address order, the last entry is the top
        position above all of them with gap_length None.
        """
        align = self.strategy.align
        size = record.size
        candidates = []
        prev_end = 0
        for offset, end in self.overlapping_extents(record):
            start = align(prev_end)
            if offset - start >= size:
                candidates.append((start, offset - start))
            if end > prev_end:
                prev_end = end
        candidates.append((align(prev_end), None))
        return candidates

    def best_fit(self, record):
        """Offset of smallest adequate gap, lowest offset on ties, else top."""
        best = None
        for offset, length in self.gaps(record):
            if length is None:
                return offset if best is None else best[1]
            if best is None or length < best[0]:
                best = (length, offset)
        return best[1]

    def place(self, record, offset):
        """Record placement of record at offset."""
        self.offsets[record.id] = offset
        self.ends[record.id] = offset + record.size
        for t in range(record.start, record.end):
            self.live[t].append(record.id)
        self.num_placed += 1
        if self.num_placed % CHECK_EVERY == 0:
            self.strategy.check_deadline()
