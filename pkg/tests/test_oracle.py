"""Exact planner against exhaustive enumeration on small traces.

The enumeration tries every order of the records, putting each at the
lowest offset clear of the records already placed. Placing records in
increasing order of their offsets in any plan gives offsets no higher than
that plan's, so the best order found is optimal.
"""
import itertools
import sys
import unittest
from memoplan.planner import plan_bump, plan_gergov, plan_greedy_by_size, plan_mip_exact
from memoplan.plans import StrategyConfig
from memoplan.trace_model import GeneratorProfile, generate_trace, peak_live_bytes

ALIGN1 = StrategyConfig(alignment=1)
NUM_TRACES = 200
GREEDY_MEAN_BOUND = 1.25  # design bound on mean greedy_by_size total over optimum


def small_traces(num_traces=NUM_TRACES):
    """Generated traces with 1 to 6 records."""
    traces = []
    for seed in range(num_traces):
        profile = GeneratorProfile(num_records=1 + seed % 6, size_median=16, size_log_std=1.0,
                                   mean_lifetime_span=3, allocs_per_op=2, rng_seed=seed)
        traces.append(generate_trace(profile))
    return traces


def lowest_fit(placed, record):
    """Lowest offset for record clear of lifetime overlapping placed (record, offset) pairs."""
    blocking = [(o, o + r.size) for r, o in placed if r.lifetime.overlaps(record.lifetime)]
    for candidate in sorted(set([0] + [hi for _, hi in blocking])):
        if all(candidate + record.size <= lo or hi <= candidate for lo, hi in blocking):
            return candidate
    raise AssertionError("unreachable, the top of all blocking extents is always clear")


def exhaustive_optimum(trace):
    """Smallest total size over all placement orders."""
    best = None
    for order in itertools.permutations(trace.records):
        placed = []
        top = 0
        for r in order:
            offset = lowest_fit(placed, r)
            placed.append((r, offset))
            top = max(top, offset + r.size)
            if best is not None and top >= best:
                break
        else:
            best = top if best is None else min(best, top)
    return 0 if best is None else best


class TestAll(unittest.TestCase):
    """TestAll class to run tests."""

    @classmethod
    def setUpClass(cls):
        """Optimum of every small trace."""
        cls.traces = small_traces()
        cls.optima = [exhaustive_optimum(t) for t in cls.traces]

    def test01_oracle(self):
        """Test the enumeration itself on a known instance."""
        from memoplan.trace_model import AllocationRecord, validate_trace
        t = validate_trace([AllocationRecord(0, 4, (0, 2)), AllocationRecord(1, 2, (1, 3)),
                            AllocationRecord(2, 4, (2, 4))])
        self.assertEqual(exhaustive_optimum(t), 6)
        self.assertEqual(exhaustive_optimum(validate_trace([])), 0)

    def test02_mip_is_optimal(self):
        """Test exact planner matches the enumeration, between peak and bump totals."""
        for t, optimum in zip(self.traces, self.optima):
            self.assertEqual(plan_mip_exact(t, ALIGN1).total_size, optimum, t.source)
            self.assertGreaterEqual(optimum, peak_live_bytes(t))
            self.assertLessEqual(optimum, plan_bump(t, ALIGN1).total_size)

    def test03_greedy_near_optimal(self):
        """Test greedy by size is never below and on average close to optimal."""
        ratios = []
        for t, optimum in zip(self.traces, self.optima):
            total = plan_greedy_by_size(t, ALIGN1).total_size
            self.assertGreaterEqual(total, optimum)
            ratios.append(total / optimum)
        mean = sum(ratios) / len(ratios)
        print("\ngreedy_by_size mean total/optimal over %d traces: %.4f (bound %.2f), worst %.4f"
              % (len(ratios), mean, GREEDY_MEAN_BOUND, max(ratios)), file=sys.stderr)
        self.assertLessEqual(mean, GREEDY_MEAN_BOUND)

    def test04_gergov_bound(self):
        """Test Gergov's approach stays within three times optimal."""
        for t, optimum in zip(self.traces, self.optima):
            self.assertLessEqual(plan_gergov(t, ALIGN1).total_size, 3 * optimum, t.source)
