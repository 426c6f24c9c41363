"""Plan check tests."""
import os.path
import unittest
from memoplan.check_logger import CheckLogger
from memoplan.plan_check import (InvalidPlan, MissingOffset, PlanReport, check_plan,
                                 overlap_violations, report_as_dict)
from memoplan.plans import Plan
from memoplan.trace_model import AllocationRecord, read_trace, validate_trace
from tests.testlib import TESTDATA


def three():
    """Trace from testdata three.jsonl."""
    return read_trace(os.path.join(TESTDATA, 'traces', 'three.jsonl'))


class TestAll(unittest.TestCase):
    """TestAll class to run tests."""

    def test01_check_logger(self):
        """Test CheckLogger."""
        c = CheckLogger()
        self.assertEqual(c.describe('E004', id=7), '[E004] Plan has no offset for record 7')
        self.assertIn('???', c.describe('E003', id=1))
        self.assertIn('Unknown error: E999', c.describe('E999', x=1))
        c.error('E001', first=0, second=1, overlap=2)
        c.warn('W001', id=9)
        self.assertEqual(c.num_errors, 1)
        self.assertEqual(c.num_warnings, 1)
        self.assertEqual(len(c.messages), 2)
        self.assertIn('E001', c.codes)
        self.assertTrue(str(c).startswith('[E001] Records 0 and 1'))
        c = CheckLogger(show_warnings=False)
        c.warn('W002', total_size=128, needed=64)
        self.assertEqual(c.messages, [])
        self.assertIn('W002', c.codes)
        # Unknown language falls back to English
        c = CheckLogger(lang='fr')
        self.assertEqual(c.describe('E004', id=1), '[E004] Plan has no offset for record 1')

    def test02_valid_plan(self):
        """Test a valid plan."""
        r = check_plan(three(), Plan(total_size=6, offsets={0: 0, 1: 4, 2: 0}, alignment=1))
        self.assertTrue(r.valid)
        self.assertEqual(r.violations, [])
        self.assertEqual(r.total_size, 6)
        self.assertEqual(r.peak_live, 6)
        self.assertEqual(r.per_timestep_live, [4, 6, 6, 4])
        self.assertEqual(r.utilization, 1.0)
        self.assertEqual(r.fragmentation, 0.0)
        self.assertEqual(r.problems, [])
        self.assertIn('valid=True', repr(r))

    def test03_overlap(self):
        """Test an overlap is reported with the shared bytes."""
        r = check_plan(three(), Plan(total_size=8, offsets={0: 0, 1: 2, 2: 4}, alignment=1))
        self.assertFalse(r.valid)
        self.assertEqual(r.violations, [(0, 1, 2)])
        self.assertEqual(len(r.problems), 1)
        self.assertTrue(r.problems[0].startswith('[E001] Records 0 and 1'))
        self.assertEqual(r.utilization, 0.75)
        self.assertAlmostEqual(r.fragmentation, 0.25)
        # Same addresses but disjoint lifetimes is fine
        r = check_plan(three(), Plan(total_size=6, offsets={0: 0, 1: 4, 2: 0}, alignment=1))
        self.assertEqual(r.violations, [])

    def test04_out_of_bounds_and_alignment(self):
        """Test extents past total size and misaligned offsets."""
        r = check_plan(three(), Plan(total_size=6, offsets={0: 0, 1: 4, 2: 4}, alignment=1))
        self.assertFalse(r.valid)
        self.assertIn('[E002] Record 2 extent [4, 8) exceeds plan total size 6', r.problems)
        r = check_plan(three(), Plan(total_size=8, offsets={0: 0, 1: 4, 2: 0}, alignment=4))
        self.assertTrue(r.valid)
        r = check_plan(three(), Plan(total_size=8, offsets={0: 0, 1: 6, 2: 0}, alignment=4))
        self.assertFalse(r.valid)
        self.assertIn('[E003] Record 1 offset 6 is not a multiple of alignment 4', r.problems)

    def test05_missing_and_unknown(self):
        """Test missing offsets raise and unknown ids warn."""
        try:
            check_plan(three(), Plan(total_size=6, offsets={0: 0, 2: 0}, alignment=1))
            self.fail("MissingOffset not raised")
        except MissingOffset as e:
            self.assertEqual(e.id, 1)
            self.assertIn('record 1', str(e))
        r = check_plan(three(), Plan(total_size=6, offsets={0: 0, 1: 4, 2: 0, 5: 0}, alignment=1))
        self.assertTrue(r.valid)
        self.assertEqual(r.problems, ['[W001] Plan has an offset for record 5 which is not in the trace'])
        r = check_plan(three(), Plan(total_size=64, offsets={0: 0, 1: 4, 2: 0}, alignment=1))
        self.assertTrue(r.valid)
        self.assertEqual(len(r.problems), 1)
        self.assertTrue(r.problems[0].startswith('[W002]'))

    def test06_excluded(self):
        """Test excluded records are not checked or counted."""
        t = read_trace(os.path.join(TESTDATA, 'traces', 'escaped.jsonl'))
        r = check_plan(t, Plan(total_size=64, offsets={0: 0, 2: 0}, alignment=64, excluded=[1]))
        self.assertTrue(r.valid)
        self.assertEqual(r.peak_live, 64)
        self.assertEqual(r.per_timestep_live, [64, 64, 64, 64])

    def test07_empty(self):
        """Test empty trace and plan."""
        r = check_plan(validate_trace([]), Plan(total_size=0, offsets={}, alignment=1))
        self.assertTrue(r.valid)
        self.assertEqual(r.utilization, 1.0)
        self.assertEqual(r.fragmentation, 0.0)
        self.assertEqual(r.per_timestep_live, [])

    def test08_overlap_violations(self):
        """Test overlap_violations directly."""
        records = [AllocationRecord(0, 8, (0, 10)), AllocationRecord(1, 4, (2, 3)),
                   AllocationRecord(2, 4, (5, 6)), AllocationRecord(3, 4, (10, 12))]
        self.assertEqual(overlap_violations(records, {0: 0, 1: 4, 2: 6, 3: 0}),
                         [(0, 1, 4), (0, 2, 2)])
        self.assertEqual(overlap_violations(records, {0: 0, 1: 8, 2: 8, 3: 0}), [])

    def test09_report_as_dict(self):
        """Test report_as_dict and InvalidPlan."""
        r = check_plan(three(), Plan(total_size=8, offsets={0: 0, 1: 2, 2: 4}, alignment=1))
        d = report_as_dict(r)
        self.assertEqual(d['valid'], False)
        self.assertEqual(d['violations'], [[0, 1, 2]])
        self.assertEqual(d['total_size'], 8)
        self.assertEqual(d['peak_live'], 6)
        self.assertEqual(d['per_timestep_live'], [4, 6, 6, 4])
        e = InvalidPlan(r)
        self.assertIs(e.report, r)
        self.assertIn('E001', str(e))
        self.assertEqual(PlanReport(total_size=4, peak_live=8).utilization, 1.0)
