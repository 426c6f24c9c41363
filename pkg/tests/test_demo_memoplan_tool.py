# -*- coding: utf-8 -*-
"""Tests/demo of memoplan-tool.py client."""
import json
import os.path

from tests.testlib import TESTDATA, DemoTestCase


class TestAll(DemoTestCase):
    """TestAll class to run tests."""

    def test00_version(self):
        """Test showing version number."""
        code, out = self.run_script("Show version number",
                                    ["plan", "--version", "--in", "TESTDATA/traces/three.jsonl"],
                                    text="The `--version` argument will show version number and exit (but we still have to specify a sub-command and its required arguments)")
        self.assertEqual(code, 0)
        self.assertIn("memoplan-tool.py is part of memoplan-py version", out)

    def test01_plan_and_check(self):
        """Test planning a trace and checking the plan."""
        self.demo_file(os.path.join(TESTDATA, 'traces', 'three.jsonl'),
                       text="A trace has one record per allocation, lifetimes are half-open intervals of timesteps:")
        code, out = self.run_script("Plan with the default strategy",
                                    ["plan", "--in", "TESTDATA/traces/three.jsonl",
                                     "--alignment", "1", "--out", "TMPDIR/plan.json"],
                                    text="Records 0 and 2 are never live at the same time so they can share addresses")
        self.assertEqual(code, 0)
        self.assertIn("strategy greedy_by_size total_size 6", out)
        code, out = self.run_script("Check the plan",
                                    ["check", "--in", "TESTDATA/traces/three.jsonl",
                                     "--plan", "TMPDIR/plan.json"])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['valid'], True)
        code, out = self.run_script("Draw the heap map",
                                    ["render", "--in", "TESTDATA/traces/three.jsonl",
                                     "--plan", "TMPDIR/plan.json", "--out", "TMPDIR/map.svg"])
        self.assertEqual(code, 0)
        self.assertTrue(os.path.exists(self.tmp('map.svg')))

    def test02_compare(self):
        """Test comparing strategies on a trace."""
        code, out = self.run_script("Compare all strategies",
                                    ["compare", "--in", "TESTDATA/traces/three.jsonl", "--alignment", "1"],
                                    text="Bump allocation never reuses memory, the others do")
        self.assertEqual(code, 0)
        for name in ('bump_allocation', 'greedy_by_size', 'greedy_by_breadth', 'mincost_flow', 'gergov', 'mip'):
            self.assertIn(name, out)
        self.assertIn("0.4000", out)

    def test03_bracket(self):
        """Test reconstructing a trace from allocator events."""
        self.demo_file(os.path.join(TESTDATA, 'events', 'address_reuse.jsonl'),
                       text="The same address is returned by two mallocs, the tag in the top 16 bits tells the frees apart:")
        code, out = self.run_script("Reconstruct lifetimes",
                                    ["bracket", "--in", "TESTDATA/events/address_reuse.jsonl",
                                     "--out", "TMPDIR/trace.jsonl"])
        self.assertEqual(code, 0)
        self.demo_file(self.tmp('trace.jsonl'))
        code, out = self.run_script("A free of an address never handed out",
                                    ["bracket", "--in", "TESTDATA/events/stray_free.jsonl",
                                     "--out", "TMPDIR/stray.jsonl"])
        self.assertEqual(code, 5)
        self.assertIn("Error - ", out)

    def test04_errors(self):
        """Test error cases."""
        code, out = self.run_script("Malformed trace",
                                    ["plan", "--in", "TESTDATA/traces/bad_line.jsonl"])
        self.assertEqual(code, 2)
        self.assertIn("line 3", out)
        code, out = self.run_script("Timeout",
                                    ["plan", "--in", "TESTDATA/traces/three.jsonl",
                                     "--strategy", "mip", "--timeout-ms", "0"])
        self.assertEqual(code, 3)


if __name__ == '__main__':
    # Run in demo mode if run directly instead of through py.test
    TestAll.run_as_demo("memoplan-tool.py")
