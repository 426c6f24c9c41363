"""Allocation trace data model.

A trace is the ground truth input to memory planning: one record per
intermediate allocation with its size in bytes, its lifetime as a half-open
interval of logical timesteps (operator sequence positions) and the operator
within whose scope the allocation was made.

Traces are read from and written to JSON Lines files, one record per line:

    {"end": 2, "id": 1, "op": "conv1", "size": 4, "start": 0}

A seeded synthetic generator produces traces with right-skewed (log-normal)
size distributions and geometric lifetime spans, shaped like the
intermediate allocations of convolutional networks.
"""
import collections
import json
import logging
import math

import numpy as np

MAX_RECORD_ID = (1 << 16) - 1  # ids must be representable as a pointer tag


class TraceException(Exception):
    """Exception class for trace construction and ingestion."""

    pass


class DuplicateId(TraceException):
    """Two records share an id."""

    def __init__(self, id):
        """Initialize with offending id."""
        super(DuplicateId, self).__init__("Duplicate record id %d" % (id))
        self.id = id


class NonPositiveSize(TraceException):
    """Record size is zero or negative."""

    def __init__(self, id, size=None):
        """Initialize with offending id."""
        super(NonPositiveSize, self).__init__("Record %d has non-positive size %s" % (id, size))
        self.id = id


class EmptyLifetime(TraceException):
    """Record lifetime has start >= end."""

    def __init__(self, id, start, end):
        """Initialize with offending id and interval."""
        super(EmptyLifetime, self).__init__("Record %d has empty lifetime [%d,%d)" % (id, start, end))
        self.id = id
        self.start = start
        self.end = end


class IdOverflow(TraceException):
    """Record id does not fit in a 16 bit tag."""

    def __init__(self, id):
        """Initialize with offending id."""
        super(IdOverflow, self).__init__("Record id %d is not in [0, %d]" % (id, MAX_RECORD_ID))
        self.id = id


class MalformedTraceLine(TraceException):
    """A line of a trace file could not be parsed."""

    def __init__(self, line_num, reason):
        """Initialize with 1-based line number and reason."""
        super(MalformedTraceLine, self).__init__("Malformed trace line %d: %s" % (line_num, reason))
        self.line_num = line_num


class LifetimeInterval(collections.namedtuple('LifetimeInterval', ['start', 'end'])):
    """Half-open interval [start, end) of logical timesteps."""

    __slots__ = ()

    @property
    def length(self):
        """Number of timesteps covered."""
        return self.end - self.start

    def overlaps(self, other):
        """True if the two half-open intervals share a timestep."""
        return self.start < other.end and other.start < self.end


class AllocationRecord(object):
    """One intermediate allocation: id, size, lifetime and operator scope."""

    __slots__ = ('id', 'size', 'lifetime', 'op_scope', 'escaped')

    def __init__(self, id, size, lifetime, op_scope='', escaped=False):
        """Initialize AllocationRecord.

        Parameters:
          id - integer identifier, unique within a trace and < 2^16
          size - bytes
          lifetime - LifetimeInterval or (start, end) pair
          op_scope - identifier of the operator that made the allocation
          escaped - True if never freed (lifetime extends to trace end)
        """
        self.id = id
        self.size = size
        self.lifetime = LifetimeInterval(*lifetime)
        self.op_scope = op_scope
        self.escaped = escaped

    @property
    def start(self):
        """Start of lifetime."""
        return self.lifetime.start

    @property
    def end(self):
        """End of lifetime (exclusive)."""
        return self.lifetime.end

    def as_dict(self):
        """Dictionary form used for the JSON Lines trace format."""
        d = {'id': self.id, 'size': self.size,
             'start': self.lifetime.start, 'end': self.lifetime.end,
             'op': self.op_scope}
        if self.escaped:
            d['escaped'] = True
        return d

    def _key(self):
        return (self.id, self.size, self.lifetime, self.op_scope, self.escaped)

    def __eq__(self, other):
        """Records are equal if all fields are equal."""
        return isinstance(other, AllocationRecord) and self._key() == other._key()

    def __hash__(self):
        """Hash consistent with __eq__."""
        return hash(self._key())

    def __repr__(self):
        """Short description."""
        return "AllocationRecord(id=%d, size=%d, [%d,%d), op=%r%s)" % (
            self.id, self.size, self.start, self.end, self.op_scope,
            ', escaped' if self.escaped else '')


class Trace(object):
    """Validated collection of AllocationRecords.

    Use validate_trace() to construct, it checks all record invariants and
    computes num_timesteps.
    """

    def __init__(self, records, num_timesteps, source=''):
        """Initialize Trace, no checking is done here."""
        self.records = list(records)
        self.num_timesteps = num_timesteps
        self.source = source
        self._by_id = None

    def __len__(self):
        """Number of records."""
        return len(self.records)

    def __iter__(self):
        """Iterate over records."""
        return iter(self.records)

    def __eq__(self, other):
        """Traces are equal if records and num_timesteps are equal."""
        return (isinstance(other, Trace) and self.num_timesteps == other.num_timesteps
                and self.records == other.records)

    @property
    def by_id(self):
        """Dict from record id to record, lazily built."""
        if self._by_id is None:
            self._by_id = {r.id: r for r in self.records}
        return self._by_id

    @property
    def ids(self):
        """Set of record ids."""
        return set(self.by_id.keys())

    @property
    def total_bytes(self):
        """Sum of all record sizes."""
        return sum(r.size for r in self.records)

    def subset(self, ids):
        """New Trace with only records whose id is in ids.

        num_timesteps is kept so timesteps remain comparable with the
        original trace.
        """
        ids = set(ids)
        return Trace([r for r in self.records if r.id in ids],
                     self.num_timesteps, source=self.source)

    def without_escaped(self):
        """New Trace without escaped (never freed) records."""
        return self.subset(r.id for r in self.records if not r.escaped)


def validate_trace(records, source=''):
    """Check record invariants and return a Trace.

    Raises DuplicateId, NonPositiveSize, EmptyLifetime or IdOverflow for the
    first offending record.
    """
    seen = set()
    num_timesteps = 0
    for r in records:
        if r.id < 0 or r.id > MAX_RECORD_ID:
            raise IdOverflow(r.id)
        if r.id in seen:
            raise DuplicateId(r.id)
        seen.add(r.id)
        if r.size <= 0:
            raise NonPositiveSize(r.id, r.size)
        if r.start >= r.end:
            raise EmptyLifetime(r.id, r.start, r.end)
        if r.start < 0:
            raise EmptyLifetime(r.id, r.start, r.end)
        if r.end > num_timesteps:
            num_timesteps = r.end
    return Trace(records, num_timesteps, source=source)


def live_bytes_per_timestep(trace, alignment=1):
    """List with the sum of sizes of records live at each timestep.

    A record is live at t iff start <= t < end. With alignment > 1 each
    size is first rounded up to a multiple of alignment.
    """
    if len(trace) == 0:
        return []
    starts = np.fromiter((r.start for r in trace.records), dtype=np.int64, count=len(trace))
    ends = np.fromiter((r.end for r in trace.records), dtype=np.int64, count=len(trace))
    sizes = np.fromiter((r.size for r in trace.records), dtype=np.int64, count=len(trace))
    if alignment > 1:
        sizes = -(-sizes // alignment) * alignment
    delta = np.zeros(trace.num_timesteps + 1, dtype=np.int64)
    np.add.at(delta, starts, sizes)
    np.add.at(delta, ends, -sizes)
    return np.cumsum(delta[:-1]).tolist()


def peak_live_bytes(trace, alignment=1):
    """Maximum over timesteps of live bytes, 0 for an empty trace."""
    live = live_bytes_per_timestep(trace, alignment)
    return max(live) if live else 0


class GeneratorProfile(object):
    """Parameters for generate_trace().

    Sizes are log-normal with the given median (bytes) and log standard
    deviation, lifetime spans are geometric with the given mean (timesteps),
    and on average allocs_per_op allocations start at each timestep.
    """

    def __init__(self, num_records=0, size_median=4096, size_log_std=1.5,
                 mean_lifetime_span=4, allocs_per_op=2, rng_seed=0):
        """Initialize and check GeneratorProfile."""
        if num_records < 0 or num_records > MAX_RECORD_ID + 1:
            raise TraceException("num_records must be in [0, %d], got %d" % (MAX_RECORD_ID + 1, num_records))
        if size_median <= 0:
            raise TraceException("size_median must be > 0, got %s" % (size_median))
        if size_log_std < 0:
            raise TraceException("size_log_std must be >= 0, got %s" % (size_log_std))
        if mean_lifetime_span < 1:
            raise TraceException("mean_lifetime_span must be >= 1, got %s" % (mean_lifetime_span))
        if allocs_per_op < 1:
            raise TraceException("allocs_per_op must be >= 1, got %s" % (allocs_per_op))
        self.num_records = num_records
        self.size_median = size_median
        self.size_log_std = size_log_std
        self.mean_lifetime_span = mean_lifetime_span
        self.allocs_per_op = allocs_per_op
        self.rng_seed = rng_seed

    def __repr__(self):
        """Compact description used as trace source label."""
        return ("GeneratorProfile(n=%d, median=%s, log_std=%s, span=%s, allocs_per_op=%s, seed=%d)" %
                (self.num_records, self.size_median, self.size_log_std,
                 self.mean_lifetime_span, self.allocs_per_op, self.rng_seed))


def generate_trace(profile):
    """Generate a synthetic Trace, a pure function of profile."""
    n = profile.num_records
    source = 'generated ' + repr(profile)
    if n == 0:
        return Trace([], 0, source=source)
    rng = np.random.default_rng(profile.rng_seed)
    sizes = rng.lognormal(mean=math.log(profile.size_median),
                          sigma=profile.size_log_std, size=n)
    sizes = np.maximum(1, np.rint(sizes)).astype(np.int64)
    advance = rng.random(n) < (1.0 / profile.allocs_per_op)
    advance[0] = False
    starts = np.cumsum(advance, dtype=np.int64)
    spans = rng.geometric(p=1.0 / profile.mean_lifetime_span, size=n).astype(np.int64)
    ends = starts + spans
    records = [AllocationRecord(i, size, (start, end), 'op%d' % start)
               for i, (size, start, end) in enumerate(zip(sizes.tolist(),
                                                          starts.tolist(),
                                                          ends.tolist()))]
    logging.getLogger(name="memoplan.trace_model").debug(
        "Generated %d records over %d timesteps", n, int(ends.max()))
    return validate_trace(records, source=source)


def _int_field(obj, key, line_num, required=True):
    """Integer field from parsed JSON object, bool is not accepted."""
    if key not in obj:
        if required:
            raise MalformedTraceLine(line_num, "missing '%s'" % (key))
        return None
    value = obj[key]
    if type(value) != int:
        raise MalformedTraceLine(line_num, "'%s' must be an integer, got %r" % (key, value))
    return value


def parse_trace(fh, source=''):
    """Read a JSON Lines trace from file handle fh and validate it.

    Blank lines are ignored. Raises MalformedTraceLine with the 1-based line
    number for lines that are not a JSON object with integer id, size, start,
    end and string op.
    """
    records = []
    for line_num, line in enumerate(fh, start=1):
        line = line.strip()
        if line == '':
            continue
        try:
            obj = json.loads(line)
        except ValueError as e:
            raise MalformedTraceLine(line_num, str(e))
        if type(obj) != dict:
            raise MalformedTraceLine(line_num, "not a JSON object")
        op = obj.get('op', '')
        if type(op) != str:
            raise MalformedTraceLine(line_num, "'op' must be a string")
        escaped = obj.get('escaped', False)
        if type(escaped) != bool:
            raise MalformedTraceLine(line_num, "'escaped' must be true or false")
        records.append(AllocationRecord(_int_field(obj, 'id', line_num),
                                        _int_field(obj, 'size', line_num),
                                        (_int_field(obj, 'start', line_num),
                                         _int_field(obj, 'end', line_num)),
                                        op_scope=op, escaped=escaped))
    return validate_trace(records, source=source)


def read_trace(filename):
    """Read and validate JSON Lines trace file filename."""
    with open(filename, 'r') as fh:
        return parse_trace(fh, source=filename)


def dump_trace(trace, fh):
    """Write trace to file handle fh as JSON Lines, one record per line."""
    for r in trace.records:
        fh.write(json.dumps(r.as_dict(), sort_keys=True) + "\n")


def write_trace(trace, filename):
    """Write trace to JSON Lines file filename."""
    with open(filename, 'w') as fh:
        dump_trace(trace, fh)
