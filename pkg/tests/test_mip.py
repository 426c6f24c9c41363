"""Exact planner tests."""
import time
import unittest
from memoplan.mip import MipStrategy, SearchNode
from memoplan.plans import StrategyConfig, Timeout
from memoplan.trace_model import AllocationRecord, GeneratorProfile, generate_trace, validate_trace


def trace_of(*specs):
    """Trace from (size, start, end) tuples with ids 0, 1, ..."""
    return validate_trace([AllocationRecord(i, size, (start, end))
                           for i, (size, start, end) in enumerate(specs)])


class TestAll(unittest.TestCase):
    """TestAll class to run tests."""

    def test01_search_node(self):
        """Test SearchNode."""
        root = SearchNode()
        self.assertEqual(root.depth, 0)
        self.assertEqual(root.offsets, {})
        self.assertEqual(root.lower_bound, 0)
        node = SearchNode(3, {0: 0, 1: 4, 2: 8}, {0: frozenset([1]), 1: frozenset([2])}, 12)
        self.assertTrue(node.reaches(0, set([2])))
        self.assertTrue(node.reaches(0, set([1])))
        self.assertFalse(node.reaches(2, set([0])))
        self.assertFalse(node.reaches(1, set([0])))

    def test02_children(self):
        """Test children of a node deciding one record."""
        t = trace_of((4, 0, 2), (2, 1, 3))
        s = MipStrategy(StrategyConfig(alignment=1))
        sizes = {0: 4, 1: 2}
        root = SearchNode(1, {0: 0}, {0: frozenset()}, 6)
        kids = list(s.children(root, t.by_id[1], [0], sizes, 6))
        self.assertEqual(len(kids), 2)
        # Record 1 below record 0, record 0 pushed up
        self.assertEqual(kids[0].offsets, {0: 2, 1: 0})
        self.assertEqual(kids[0].above[1], frozenset([0]))
        # Record 1 above record 0
        self.assertEqual(kids[1].offsets, {0: 0, 1: 4})
        self.assertEqual(kids[1].lower_bound, 6)
        for k in kids:
            self.assertEqual(k.depth, 2)

    def test03_cycles_rejected(self):
        """Test orderings that would form a cycle are not generated."""
        s = MipStrategy(StrategyConfig(alignment=1))
        sizes = {0: 1, 1: 1, 2: 1}
        # 0 below 1 already decided
        node = SearchNode(2, {0: 0, 1: 1}, {0: frozenset([1]), 1: frozenset()}, 3)
        r = AllocationRecord(2, 1, (0, 1))
        kids = list(s.children(node, r, [0, 1], sizes, 3))
        # below={}, {0}, {1}, {0,1} but below={0} with 1 above is fine,
        # below={1} with 0 above makes 1 -> 2 -> 0 -> 1
        self.assertEqual(len(kids), 3)
        for k in kids:
            self.assertLess(k.offsets[0], k.offsets[1])

    def test04_optimal(self):
        """Test optimal totals on small traces."""
        s = MipStrategy(StrategyConfig(alignment=1))
        self.assertEqual(s.plan(trace_of((4, 0, 2), (2, 1, 3), (4, 2, 4))).total_size, 6)
        # Optimum meets the peak of 7 live bytes
        t = trace_of((4, 0, 3), (3, 2, 5), (3, 0, 1), (4, 4, 6), (2, 1, 2))
        p = s.plan(t)
        self.assertEqual(p.total_size, 7)
        self.assertGreater(s.nodes_expanded, 0)

    def test05_timeout(self):
        """Test timeout on a large trace."""
        t = generate_trace(GeneratorProfile(num_records=400, rng_seed=3))
        s = MipStrategy(StrategyConfig(alignment=1, timeout=0.2))
        try:
            p = s.plan(t)
            # Only possible if the incumbent met the lower bound
            self.assertEqual(p.strategy, 'mip')
        except Timeout as e:
            self.assertEqual(e.strategy, 'mip')
        self.assertRaises(Timeout, MipStrategy(StrategyConfig(timeout=0)).plan, t)

    def test06_incumbent_timeout(self):
        """Test a timeout while finding the first plan is reported as mip's."""
        t = generate_trace(GeneratorProfile(num_records=600, rng_seed=4))
        s = MipStrategy(StrategyConfig(alignment=1, timeout=0.05))
        s.deadline = time.monotonic() - 1.0
        try:
            s.incumbent(t)
            self.fail("Timeout not raised")
        except Timeout as e:
            self.assertEqual(e.strategy, 'mip')
            self.assertIn('mip timed out', str(e))
