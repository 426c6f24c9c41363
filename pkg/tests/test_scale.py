"""Planning a network-sized trace within time limits."""
import time
import unittest
from memoplan.plan_check import check_plan
from memoplan.planner import plan_greedy_by_size, plan_mincost_flow, plan_mip_exact
from memoplan.plans import StrategyConfig, Timeout
from memoplan.trace_model import GeneratorProfile, generate_trace, peak_live_bytes

NUM_RECORDS = 57238  # intermediate allocations of a large image classification network


class TestAll(unittest.TestCase):
    """TestAll class to run tests."""

    @classmethod
    def setUpClass(cls):
        """Generate the large trace once."""
        cls.trace = generate_trace(GeneratorProfile(num_records=NUM_RECORDS, rng_seed=2019))

    def test01_greedy(self):
        """Test greedy by size plans the large trace in under 5 seconds."""
        t0 = time.monotonic()
        p = plan_greedy_by_size(self.trace)
        self.assertLess(time.monotonic() - t0, 5.0)
        self.assertEqual(len(p.offsets), NUM_RECORDS)
        self.assertTrue(check_plan(self.trace, p).valid)

    def test02_mincost_timeout(self):
        """Test min-cost flow gives up within its timeout."""
        t0 = time.monotonic()
        self.assertRaises(Timeout, plan_mincost_flow, self.trace, StrategyConfig(timeout=10.0))
        # Deadline checks are periodic, allow some slack
        self.assertLess(time.monotonic() - t0, 15.0)

    def test03_mip_timeout(self):
        """Test exact planner times out unless its first plan is provably optimal."""
        try:
            p = plan_mip_exact(self.trace, StrategyConfig(timeout=10.0))
            self.assertEqual(p.total_size, peak_live_bytes(self.trace, p.alignment))
        except Timeout as e:
            self.assertEqual(e.strategy, 'mip')
