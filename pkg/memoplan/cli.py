"""Command line interface for memoplan, used by memoplan-tool.py.

Each sub-command reads and writes the file formats of the owning modules.
Data goes to standard output, diagnostics to standard error. Exit codes:

    0 ok, 2 input error, 3 timeout, 4 invalid plan, 5 reconstruction error
"""
import argparse
import csv
import io
import json
import logging
import os.path
import sys

from ._version import __version__
from .heap_map import build_heap_map, render_heap_map_svg
from .plan_check import InvalidPlan, MissingOffset, PlanCheckException, check_plan, report_as_dict
from .planner import plan
from .plans import DEFAULT_ALIGNMENT, PlannerException, StrategyConfig, Timeout, read_plan, write_plan
from .strategies import STRATEGIES
from .tagging import MalformedEventLine, TaggingException, bracket_lifetimes, read_events
from .trace_model import (GeneratorProfile, TraceException, generate_trace,
                          peak_live_bytes, read_trace, write_trace)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIMEOUT = 3
EXIT_INVALID_PLAN = 4
EXIT_RECONSTRUCTION = 5

COMPARE_TIMEOUT_MS = 10000  # per strategy

STATUS_OK = 'ok'
STATUS_TIMEOUT = 'timeout'


class FatalError(Exception):
    """Exception class for conditions that should abort with message."""

    def __init__(self, message, exit_code=EXIT_INPUT):
        """Initialize with message and process exit code."""
        super(FatalError, self).__init__(message)
        self.exit_code = exit_code


def add_shared_args(parser):
    """Add arguments to be shared by all memoplan sub-commands."""
    parser.add_argument('--verbose', '-v', action='store_true',
                        help="be more verbose")
    parser.add_argument('--version', action='store_true',
                        help='Show version number and exit')


def check_shared_args(args):
    """Check arguments set with add_shared_args."""
    if args.version:
        print("%s is part of memoplan-py version %s" % (os.path.basename(sys.argv[0]), __version__))
        sys.exit(0)


def add_strategy_args(parser):
    """Add StrategyConfig settings to parser."""
    parser.add_argument('--alignment', type=int, default=DEFAULT_ALIGNMENT,
                        help='alignment of every offset in bytes, a power of two')
    parser.add_argument('--timeout-ms', type=float, default=None,
                        help='give up planning after this many milliseconds')
    parser.add_argument('--exclude-escaped', action='store_true',
                        help='leave records that are never freed out of the plan')


def strategy_config(args, strategy=None):
    """StrategyConfig from parsed arguments."""
    timeout = args.timeout_ms / 1000.0 if args.timeout_ms is not None else None
    return StrategyConfig(strategy=strategy, alignment=args.alignment, timeout=timeout,
                          exclude_escaped=args.exclude_escaped)


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description='Plan, check and compare static memory plans for allocation traces.',
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    commands = parser.add_subparsers(dest='command', title='Commands')
    commands.required = True

    gen = commands.add_parser('gen', help='Generate a synthetic trace',
                              formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    gen.add_argument('--n', type=int, default=0, help='number of records')
    gen.add_argument('--seed', type=int, default=0, help='random seed')
    gen.add_argument('--median', type=float, default=4096, help='median record size in bytes')
    gen.add_argument('--log-std', type=float, default=1.5, help='standard deviation of log size')
    gen.add_argument('--span', type=float, default=4, help='mean lifetime in timesteps')
    gen.add_argument('--allocs-per-op', type=float, default=2, help='mean allocations per operator')
    gen.add_argument('--out', required=True, help='trace file to write')

    plan_cmd = commands.add_parser('plan', help='Plan a trace',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    plan_cmd.add_argument('--in', dest='infile', required=True, help='trace file')
    plan_cmd.add_argument('--out', default=None, help='plan file to write')
    plan_cmd.add_argument('--strategy', default=None,
                          help='one of %s, greedy_by_size if not set' % (', '.join(STRATEGIES)))
    add_strategy_args(plan_cmd)

    check = commands.add_parser('check', help='Check a plan against its trace',
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    check.add_argument('--in', dest='infile', required=True, help='trace file')
    check.add_argument('--plan', required=True, help='plan file')
    check.add_argument('--report', default=None, help='also write JSON report to this file')

    render = commands.add_parser('render', help='Render the heap map of a plan as SVG',
                                 formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    render.add_argument('--in', dest='infile', required=True, help='trace file')
    render.add_argument('--plan', required=True, help='plan file')
    render.add_argument('--out', required=True, help='SVG file to write')

    compare = commands.add_parser('compare', help='Compare strategies on a trace',
                                  formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    compare.add_argument('--in', dest='infile', required=True, help='trace file')
    compare.add_argument('--strategies', default=','.join(STRATEGIES),
                         help='comma separated strategy names')
    formats = compare.add_mutually_exclusive_group()
    formats.add_argument('--json', action='store_true', help='write rows as JSON')
    formats.add_argument('--csv', action='store_true', help='write rows as CSV')
    add_strategy_args(compare)
    compare.set_defaults(timeout_ms=COMPARE_TIMEOUT_MS)

    bracket = commands.add_parser('bracket', help='Reconstruct a trace from malloc/free events',
                                  formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    bracket.add_argument('--in', dest='infile', required=True, help='event file')
    bracket.add_argument('--out', required=True, help='trace file to write')

    for sub in (gen, plan_cmd, check, render, compare, bracket):
        add_shared_args(sub)
    args = parser.parse_args(argv)
    check_shared_args(args)
    return args


class ComparisonRow(object):
    """Outcome of one strategy on a trace."""

    FIELDS = ['strategy', 'total_size', 'peak_live', 'fragmentation', 'planning_time_ms', 'status']

    def __init__(self, strategy, total_size=None, peak_live=0, fragmentation=None,
                 planning_time_ms=None, status=STATUS_OK):
        """Initialize ComparisonRow, total_size and metrics are None on timeout."""
        self.strategy = strategy
        self.total_size = total_size
        self.peak_live = peak_live
        self.fragmentation = fragmentation
        self.planning_time_ms = planning_time_ms
        self.status = status

    def as_dict(self):
        """Dictionary with FIELDS as keys."""
        return {f: getattr(self, f) for f in self.FIELDS}


def _read_trace(filename):
    try:
        return read_trace(filename)
    except (OSError, TraceException) as e:
        raise FatalError(str(e))


def _read_plan(filename):
    try:
        return read_plan(filename)
    except (OSError, PlannerException) as e:
        raise FatalError(str(e))


def compare_strategies(trace, names, args):
    """List of ComparisonRow, one per name in order."""
    peak = peak_live_bytes(trace)
    rows = []
    for name in names:
        try:
            p = plan(trace, strategy_config(args, strategy=name))
        except Timeout as e:
            logging.info(str(e))
            rows.append(ComparisonRow(name, peak_live=peak, status=STATUS_TIMEOUT))
            continue
        report = check_plan(trace, p)
        rows.append(ComparisonRow(name, total_size=p.total_size, peak_live=report.peak_live,
                                  fragmentation=report.fragmentation,
                                  planning_time_ms=p.planning_time_ms))
    return rows


def format_table(rows):
    """Text table of rows."""
    lines = ["%-18s %12s %12s %13s %12s  %s" % ('strategy', 'total_size', 'peak_live',
                                                 'fragmentation', 'time_ms', 'status')]
    for row in rows:
        if row.status == STATUS_OK:
            lines.append("%-18s %12d %12d %13.4f %12.1f  %s" % (
                row.strategy, row.total_size, row.peak_live, row.fragmentation,
                row.planning_time_ms, row.status))
        else:
            lines.append("%-18s %12s %12d %13s %12s  %s" % (
                row.strategy, '-', row.peak_live, '-', '-', row.status))
    return "\n".join(lines) + "\n"


def format_csv(rows):
    """CSV text of rows with a header line."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=ComparisonRow.FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_dict())
    return buf.getvalue()


def cmd_gen(args):
    """Write a synthetic trace."""
    try:
        profile = GeneratorProfile(num_records=args.n, size_median=args.median,
                                   size_log_std=args.log_std, mean_lifetime_span=args.span,
                                   allocs_per_op=args.allocs_per_op, rng_seed=args.seed)
    except TraceException as e:
        raise FatalError(str(e))
    trace = generate_trace(profile)
    write_trace(trace, args.out)
    logging.info("Wrote %d records to %s", len(trace), args.out)
    return EXIT_OK


def cmd_plan(args):
    """Plan a trace file."""
    trace = _read_trace(args.infile)
    try:
        p = plan(trace, strategy_config(args, strategy=args.strategy))
    except Timeout as e:
        raise FatalError(str(e), EXIT_TIMEOUT)
    except PlannerException as e:
        raise FatalError(str(e))
    if args.out is not None:
        write_plan(p, args.out)
    print("strategy %s total_size %d planning_time_ms %.1f" % (p.strategy, p.total_size, p.planning_time_ms))
    return EXIT_OK


def cmd_check(args):
    """Check a plan file against a trace file."""
    trace = _read_trace(args.infile)
    p = _read_plan(args.plan)
    try:
        report = check_plan(trace, p)
    except MissingOffset as e:
        raise FatalError(str(e))
    unknown = [m for m in report.problems if m.startswith('[W001]')]
    if len(unknown) > 0:
        raise FatalError("Plan and trace ids differ: " + "; ".join(unknown))
    d = report_as_dict(report)
    print(json.dumps(d, sort_keys=True, indent=2))
    if args.report is not None:
        with open(args.report, 'w') as fh:
            json.dump(d, fh, sort_keys=True, indent=2)
            fh.write("\n")
    return EXIT_OK if report.valid else EXIT_INVALID_PLAN


def cmd_render(args):
    """Render the heap map of a plan file."""
    trace = _read_trace(args.infile)
    p = _read_plan(args.plan)
    try:
        heap_map = build_heap_map(trace, p)
    except InvalidPlan as e:
        raise FatalError(str(e), EXIT_INVALID_PLAN)
    except PlanCheckException as e:
        raise FatalError(str(e))
    with open(args.out, 'wb') as fh:
        render_heap_map_svg(heap_map, fh)
    return EXIT_OK


def cmd_compare(args):
    """Compare strategies on a trace file."""
    trace = _read_trace(args.infile)
    names = [n.strip() for n in args.strategies.split(',') if n.strip() != '']
    for name in names:
        if name not in STRATEGIES:
            raise FatalError("Unsupported strategy %s" % (name))
    try:
        rows = compare_strategies(trace, names, args)
    except PlannerException as e:
        raise FatalError(str(e))
    if args.json:
        print(json.dumps([r.as_dict() for r in rows], sort_keys=True, indent=2))
    elif args.csv:
        sys.stdout.write(format_csv(rows))
    else:
        sys.stdout.write(format_table(rows))
    return EXIT_OK


def cmd_bracket(args):
    """Reconstruct a trace from an event file."""
    try:
        events = read_events(args.infile)
        trace = bracket_lifetimes(events, source=args.infile)
    except (OSError, MalformedEventLine, TraceException) as e:
        raise FatalError(str(e))
    except TaggingException as e:
        raise FatalError(str(e), EXIT_RECONSTRUCTION)
    write_trace(trace, args.out)
    logging.info("Reconstructed %d records from %d events", len(trace), len(events))
    return EXIT_OK


COMMANDS = {'gen': cmd_gen, 'plan': cmd_plan, 'check': cmd_check, 'render': cmd_render,
            'compare': cmd_compare, 'bracket': cmd_bracket}


def main(argv=None):
    """Run memoplan command line, return exit code."""
    args = parse_arguments(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARN)
    try:
        return COMMANDS[args.command](args)
    except FatalError as e:
        sys.stderr.write('Error - ' + str(e) + "\n")
        return e.exit_code
