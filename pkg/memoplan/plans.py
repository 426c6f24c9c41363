"""Memory plan and strategy configuration types, plan file handling.

A plan is a slab size plus an offset for every planned record such that
records with overlapping lifetimes never share an address. Plan files are
JSON:

    {"alignment": 64, "offsets": {"0": 0, "1": 4096}, "planning_time_ms": 1.2,
     "strategy": "greedy_by_size", "total_size": 8192}
"""
import json

DEFAULT_STRATEGY = 'greedy_by_size'
DEFAULT_ALIGNMENT = 64


class PlannerException(Exception):
    """Exception class for memory planning."""

    pass


class Timeout(PlannerException):
    """Planning did not finish within the configured timeout."""

    def __init__(self, strategy, timeout):
        """Initialize with strategy name and timeout in seconds."""
        super(Timeout, self).__init__("Strategy %s timed out after %gms" % (strategy, timeout * 1000.0))
        self.strategy = strategy
        self.timeout = timeout


class UnknownStrategy(PlannerException):
    """No strategy of the requested name."""

    def __init__(self, name):
        """Initialize with requested name."""
        super(UnknownStrategy, self).__init__("Unsupported strategy %s" % (name))
        self.name = name


class MalformedPlan(PlannerException):
    """Plan file could not be parsed."""

    pass


def is_power_of_two(n):
    """True if n is a positive power of two."""
    return n >= 1 and (n & (n - 1)) == 0


def align_up(n, alignment):
    """Round n up to a multiple of alignment."""
    return -(-n // alignment) * alignment


class StrategyConfig(object):
    """Settings for a planning strategy.

    Parameters:
      strategy - strategy name, None selects the default greedy_by_size
      alignment - power of two, every offset is a multiple of it
      timeout - seconds or None for no limit
      exclude_escaped - set True to leave escaped (never freed) records out
        of the plan
    """

    def __init__(self, strategy=None, alignment=DEFAULT_ALIGNMENT, timeout=None,
                 exclude_escaped=False):
        """Initialize and check StrategyConfig."""
        if not is_power_of_two(alignment):
            raise PlannerException("Alignment must be a power of two, got %s" % (alignment))
        if timeout is not None and timeout < 0:
            raise PlannerException("Timeout must not be negative, got %s" % (timeout))
        self.strategy = strategy
        self.alignment = alignment
        self.timeout = timeout
        self.exclude_escaped = exclude_escaped

    @property
    def strategy_name(self):
        """Name of configured strategy, with default applied."""
        return self.strategy if self.strategy else DEFAULT_STRATEGY


class Plan(object):
    """Slab size and per-record offsets produced by a strategy."""

    def __init__(self, total_size=0, offsets=None, strategy=DEFAULT_STRATEGY,
                 alignment=1, planning_time_ms=0.0, excluded=None):
        """Initialize Plan."""
        self.total_size = total_size
        self.offsets = {} if offsets is None else dict(offsets)
        self.strategy = strategy
        self.alignment = alignment
        self.planning_time_ms = planning_time_ms
        self.excluded = [] if excluded is None else sorted(excluded)

    def as_dict(self, timing=True):
        """Dictionary form of plan file, without planning time if timing is False."""
        d = {'strategy': self.strategy,
             'alignment': self.alignment,
             'total_size': self.total_size,
             'offsets': {str(k): v for k, v in sorted(self.offsets.items())}}
        if timing:
            d['planning_time_ms'] = self.planning_time_ms
        if len(self.excluded) > 0:
            d['excluded'] = list(self.excluded)
        return d

    def __repr__(self):
        """Short description."""
        return "Plan(%s, total_size=%d, %d offsets)" % (self.strategy, self.total_size, len(self.offsets))


def plan_from_dict(d):
    """Plan from parsed plan file, raise MalformedPlan on bad structure."""
    if type(d) != dict:
        raise MalformedPlan("Plan must be a JSON object")
    for key in ('strategy', 'alignment', 'total_size', 'offsets'):
        if key not in d:
            raise MalformedPlan("Plan lacks required '%s'" % (key))
    if type(d['offsets']) != dict:
        raise MalformedPlan("Plan offsets must be a JSON object")
    offsets = {}
    for k, v in d['offsets'].items():
        try:
            rid = int(k)
        except ValueError:
            raise MalformedPlan("Bad record id %r in offsets" % (k))
        if type(v) != int or v < 0:
            raise MalformedPlan("Bad offset %r for record %s" % (v, k))
        offsets[rid] = v
    if type(d['total_size']) != int or type(d['alignment']) != int:
        raise MalformedPlan("Plan total_size and alignment must be integers")
    if not is_power_of_two(d['alignment']):
        raise MalformedPlan("Plan alignment must be a power of two, got %d" % (d['alignment']))
    return Plan(total_size=d['total_size'], offsets=offsets, strategy=d['strategy'],
                alignment=d['alignment'],
                planning_time_ms=d.get('planning_time_ms', 0.0),
                excluded=d.get('excluded', []))


def read_plan(filename):
    """Read plan file filename."""
    with open(filename, 'r') as fh:
        try:
            d = json.load(fh)
        except ValueError as e:
            raise MalformedPlan("Plan file %s is not valid JSON: %s" % (filename, str(e)))
    return plan_from_dict(d)


def write_plan(plan, filename, timing=True):
    """Write plan to filename as JSON with sorted keys."""
    with open(filename, 'w') as fh:
        json.dump(plan.as_dict(timing=timing), fh, sort_keys=True, indent=2)
        fh.write("\n")
