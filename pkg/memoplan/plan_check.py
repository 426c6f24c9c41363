"""Check memory plans against traces and measure them.

A plan is valid for a trace when records with overlapping lifetimes have
disjoint address extents, every extent fits within the plan's total size
and every offset is a multiple of the plan's alignment.
"""
import logging

from .check_logger import CheckLogger
from .plans import align_up
from .trace_model import live_bytes_per_timestep


class PlanCheckException(Exception):
    """Exception class for plan checking."""

    pass


class MissingOffset(PlanCheckException):
    """Plan has no offset for a record of the trace."""

    def __init__(self, id):
        """Initialize with record id."""
        super(MissingOffset, self).__init__(CheckLogger().describe('E004', id=id))
        self.id = id


class InvalidPlan(PlanCheckException):
    """Plan does not pass check_plan()."""

    def __init__(self, report):
        """Initialize with the failing PlanReport."""
        super(InvalidPlan, self).__init__("Invalid plan: %s" % ('; '.join(report.problems)))
        self.report = report


class PlanReport(object):
    """Result of check_plan().

    Attributes:
      valid - True if no error was found
      violations - sorted list of (id, id, overlap bytes) for lifetime
        overlapping records whose address extents intersect
      total_size - plan total size in bytes
      peak_live - peak live bytes of the planned records
      utilization - peak_live / total_size, 1.0 when both are 0
      fragmentation - 1 - utilization
      per_timestep_live - live bytes at each timestep
      problems - coded error and warning messages
    """

    def __init__(self, valid=True, violations=None, total_size=0, peak_live=0,
                 per_timestep_live=None, problems=None):
        """Initialize PlanReport, deriving utilization and fragmentation."""
        self.valid = valid
        self.violations = [] if violations is None else violations
        self.total_size = total_size
        self.peak_live = peak_live
        self.per_timestep_live = [] if per_timestep_live is None else per_timestep_live
        self.problems = [] if problems is None else problems
        if total_size > 0:
            self.utilization = min(1.0, peak_live / total_size)
        else:
            self.utilization = 1.0
        self.fragmentation = 1.0 - self.utilization

    def __repr__(self):
        """Short description."""
        return "PlanReport(valid=%s, %d violations, total_size=%d, peak_live=%d)" % (
            self.valid, len(self.violations), self.total_size, self.peak_live)


def overlap_violations(records, offsets):
    """Sorted (id, id, bytes) for lifetime overlapping records sharing addresses.

    Sweeps records in start order keeping the records still live.
    """
    violations = []
    live = []
    for r in sorted(records, key=lambda r: (r.start, r.id)):
        live = [q for q in live if q.end > r.start]
        lo = offsets[r.id]
        hi = lo + r.size
        for q in live:
            shared = min(hi, offsets[q.id] + q.size) - max(lo, offsets[q.id])
            if shared > 0:
                violations.append((min(q.id, r.id), max(q.id, r.id), shared))
        live.append(r)
    violations.sort()
    return violations


def check_plan(trace, plan):
    """Check plan against trace, return a PlanReport listing every problem.

    Records listed as excluded by the plan are not checked. Raises
    MissingOffset for the lowest id the plan has no offset for.
    """
    log = logging.getLogger(name="memoplan.plan_check")
    excluded = set(plan.excluded)
    records = [r for r in trace.records if r.id not in excluded]
    for r in sorted(records, key=lambda r: r.id):
        if r.id not in plan.offsets:
            raise MissingOffset(r.id)
    checker = CheckLogger()
    known = trace.ids
    for rid in sorted(plan.offsets):
        if rid not in known:
            checker.warn('W001', id=rid)
    top = 0
    for r in sorted(records, key=lambda r: r.id):
        offset = plan.offsets[r.id]
        top = max(top, offset + r.size)
        if offset % plan.alignment != 0:
            checker.error('E003', id=r.id, offset=offset, alignment=plan.alignment)
        if offset + r.size > plan.total_size:
            checker.error('E002', id=r.id, offset=offset, end=offset + r.size,
                          total_size=plan.total_size)
    violations = overlap_violations(records, plan.offsets)
    for a, b, shared in violations:
        checker.error('E001', first=a, second=b, overlap=shared)
    needed = align_up(top, plan.alignment)
    if plan.total_size > needed:
        checker.warn('W002', total_size=plan.total_size, needed=needed)
    planned = trace.subset(r.id for r in records) if excluded else trace
    live = live_bytes_per_timestep(planned)
    report = PlanReport(valid=(checker.num_errors == 0), violations=violations,
                        total_size=plan.total_size, peak_live=max(live) if live else 0,
                        per_timestep_live=live, problems=list(checker.messages))
    if report.valid:
        log.info("Plan %s is valid, fragmentation %.3f", plan.strategy, report.fragmentation)
    else:
        log.info("Plan %s is invalid with %d errors", plan.strategy, checker.num_errors)
    return report


def report_as_dict(report):
    """Dictionary form of PlanReport for the JSON report."""
    return {'valid': report.valid,
            'violations': [list(v) for v in report.violations],
            'total_size': report.total_size,
            'peak_live': report.peak_live,
            'utilization': report.utilization,
            'fragmentation': report.fragmentation,
            'per_timestep_live': list(report.per_timestep_live),
            'problems': list(report.problems)}
