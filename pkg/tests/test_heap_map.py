"""Heap map tests."""
import io
import os.path
import unittest
import xml.etree.ElementTree as ET
from memoplan.heap_map import HeapMap, Rectangle, build_heap_map, render_heap_map_svg
from memoplan.plan_check import InvalidPlan
from memoplan.planner import plan_greedy_by_size
from memoplan.plans import Plan, StrategyConfig
from memoplan.trace_model import GeneratorProfile, generate_trace, read_trace, validate_trace
from tests.testlib import TESTDATA

SVG = '{http://www.w3.org/2000/svg}'


def svg_bytes(heap_map):
    """Rendered SVG document as bytes."""
    out = io.BytesIO()
    render_heap_map_svg(heap_map, out)
    return out.getvalue()


def record_ids(root):
    """Sorted record ids of the record-<id> groups in parsed SVG root."""
    return sorted(int(g.get('id')[len('record-'):]) for g in root.iter(SVG + 'g')
                  if g.get('id', '').startswith('record-'))


class TestAll(unittest.TestCase):
    """TestAll class to run tests."""

    def test01_rectangle(self):
        """Test Rectangle."""
        r = Rectangle(3, 1, 4, 8, 12)
        self.assertEqual(r.area, 12)
        self.assertEqual(r.id, 3)

    def test02_build(self):
        """Test build_heap_map."""
        t = read_trace(os.path.join(TESTDATA, 'traces', 'three.jsonl'))
        m = build_heap_map(t, Plan(total_size=6, offsets={0: 0, 1: 4, 2: 0}, alignment=1))
        self.assertEqual(len(m), 3)
        self.assertEqual(m.width, 4)
        self.assertEqual(m.height, 6)
        self.assertEqual(m.rectangles, [Rectangle(0, 0, 2, 0, 4), Rectangle(1, 1, 3, 4, 6),
                                        Rectangle(2, 2, 4, 0, 4)])
        self.assertRaises(InvalidPlan, build_heap_map, t,
                          Plan(total_size=6, offsets={0: 0, 1: 2, 2: 0}, alignment=1))

    def test03_excluded(self):
        """Test excluded records are not drawn."""
        t = read_trace(os.path.join(TESTDATA, 'traces', 'escaped.jsonl'))
        p = plan_greedy_by_size(t, StrategyConfig(exclude_escaped=True))
        m = build_heap_map(t, p)
        self.assertEqual([r.id for r in m.rectangles], [0, 2])

    def test04_svg(self):
        """Test SVG has one group per record and is deterministic."""
        t = generate_trace(GeneratorProfile(num_records=50, rng_seed=11))
        p = plan_greedy_by_size(t)
        m = build_heap_map(t, p)
        data = svg_bytes(m)
        self.assertTrue(data.startswith(b"<?xml"))
        root = ET.fromstring(data)
        self.assertEqual(root.tag, SVG + 'svg')
        self.assertEqual(record_ids(root), list(range(50)))
        # Same map, same bytes
        self.assertEqual(svg_bytes(build_heap_map(t, p)), data)

    def test05_empty(self):
        """Test empty map renders axes only."""
        m = build_heap_map(validate_trace([]), Plan(total_size=0, offsets={}, alignment=1))
        self.assertEqual(len(m), 0)
        data = svg_bytes(m)
        self.assertEqual(record_ids(ET.fromstring(data)), [])
        self.assertIn(b'timestep', data)
        self.assertIn(b'bytes', data)
        self.assertEqual(len(HeapMap()), 0)
