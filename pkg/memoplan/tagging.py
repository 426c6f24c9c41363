"""Lifetime reconstruction from malloc/free event streams with tagged pointers.

Calls to free only receive a pointer, so matching frees to mallocs by raw
address breaks as soon as the allocator reuses an address. Instead each
allocation gets a unique 16 bit tag stored in the upper two bytes of the
64 bit pointer word (x86_64 addresses use only the lower 48 bits). A tagged
word must be put back in canonical form (bit 47 sign extended through bits
48-63) before it is dereferenced.

Event files are JSON Lines:

    {"kind": "malloc", "addr": "0x00007fffdead1234", "size": 64, "op": "conv1", "time": 0}
    {"kind": "free", "addr": "0x00007fffdead1234", "time": 2}
"""
import json
import logging

import numpy as np

from .trace_model import AllocationRecord, validate_trace

ADDRESS_BITS = 48
TAG_BITS = 16
MAX_TAG = (1 << TAG_BITS) - 1
PAYLOAD_MASK = (1 << ADDRESS_BITS) - 1
SIGN_BIT = 1 << (ADDRESS_BITS - 1)
WORD_MASK = (1 << 64) - 1


class TaggingException(Exception):
    """Exception class for tagging and lifetime reconstruction."""

    pass


class NonCanonicalInput(TaggingException):
    """Address passed for tagging is not in canonical form."""

    def __init__(self, address):
        """Initialize with offending address."""
        super(NonCanonicalInput, self).__init__("Address 0x%016x is not canonical" % (address))
        self.address = address


class UnmatchedFree(TaggingException):
    """Free of a tag that was never allocated."""

    def __init__(self, tag):
        """Initialize with offending tag."""
        super(UnmatchedFree, self).__init__("Free of tag %d with no matching malloc" % (tag))
        self.tag = tag


class DoubleFree(TaggingException):
    """Second free of an already freed tag."""

    def __init__(self, tag):
        """Initialize with offending tag."""
        super(DoubleFree, self).__init__("Double free of tag %d" % (tag))
        self.tag = tag


class TagExhausted(TaggingException):
    """More than 2^16 allocations in one reconstruction pass."""

    def __init__(self):
        """Initialize."""
        super(TagExhausted, self).__init__("Tag counter exhausted, at most %d allocations can be tagged" % (MAX_TAG + 1))


class MalformedEventLine(TaggingException):
    """A line of an event file could not be parsed."""

    def __init__(self, line_num, reason):
        """Initialize with 1-based line number and reason."""
        super(MalformedEventLine, self).__init__("Malformed event line %d: %s" % (line_num, reason))
        self.line_num = line_num


def canonicalize(word):
    """Canonical address for a tagged 64 bit word.

    Clears the upper 16 bits, then if bit 47 is set sets bits 47 through 63.
    """
    return (word & PAYLOAD_MASK) | (~((word & SIGN_BIT) - 1) & WORD_MASK)


def is_canonical(address):
    """True if address is a 64 bit value with bits 48-63 equal to bit 47."""
    return 0 <= address <= WORD_MASK and canonicalize(address) == address


def tag_of(word):
    """Tag stored in the upper 16 bits of word."""
    return (word >> ADDRESS_BITS) & MAX_TAG


class TaggedAddress(int):
    """64 bit word with a 16 bit tag above a 48 bit address payload."""

    @property
    def tag(self):
        """Tag in bits 48-63."""
        return tag_of(self)

    @property
    def payload(self):
        """Address payload in bits 0-47."""
        return self & PAYLOAD_MASK

    def canonical(self):
        """Dereferenceable canonical address."""
        return canonicalize(self)

    def __repr__(self):
        """Hex form."""
        return "TaggedAddress(0x%016x)" % (self)


def encode_tag(canonical_address, tag):
    """Store tag in the upper 16 bits of canonical_address."""
    if not is_canonical(canonical_address):
        raise NonCanonicalInput(canonical_address)
    if tag < 0 or tag > MAX_TAG:
        raise TaggingException("Tag %d does not fit in %d bits" % (tag, TAG_BITS))
    return TaggedAddress((tag << ADDRESS_BITS) | (canonical_address & PAYLOAD_MASK))


def canonicalize_words(words):
    """canonicalize() over an array of 64 bit words, returns numpy uint64 array."""
    words = np.asarray(words, dtype=np.uint64)
    payload = words & np.uint64(PAYLOAD_MASK)
    negative = (words & np.uint64(SIGN_BIT)) != 0
    return np.where(negative, payload | np.uint64(WORD_MASK ^ PAYLOAD_MASK), payload)


def tags_of(words):
    """tag_of() over an array of 64 bit words, returns numpy int64 array."""
    return (np.asarray(words, dtype=np.uint64) >> np.uint64(ADDRESS_BITS)).astype(np.int64)


def encode_tags(canonical_addresses, tags):
    """encode_tag() elementwise over arrays of addresses and tags.

    Arguments are broadcast against each other, the result is a numpy
    uint64 array of tagged words. Raises NonCanonicalInput for the first
    non-canonical address.
    """
    addresses = np.asarray(canonical_addresses, dtype=np.uint64)
    tags = np.asarray(tags, dtype=np.int64)
    bad = np.flatnonzero(canonicalize_words(addresses) != addresses)
    if len(bad) > 0:
        raise NonCanonicalInput(int(addresses.flat[bad[0]]))
    if np.any((tags < 0) | (tags > MAX_TAG)):
        raise TaggingException("Tags must fit in %d bits" % (TAG_BITS))
    return (tags.astype(np.uint64) << np.uint64(ADDRESS_BITS)) | (addresses & np.uint64(PAYLOAD_MASK))


class TagCounter(object):
    """Issues tags 0, 1, 2, ... for one reconstruction pass."""

    def __init__(self, next_tag=0):
        """Initialize counter."""
        self.next_tag = next_tag

    def issue(self):
        """Return next tag, raise TagExhausted past 2^16 - 1."""
        if self.next_tag > MAX_TAG:
            raise TagExhausted()
        tag = self.next_tag
        self.next_tag += 1
        return tag


class AllocEvent(object):
    """A raw malloc or free event.

    Free events carry only an address and a time.
    """

    MALLOC = 'malloc'
    FREE = 'free'

    __slots__ = ('kind', 'address', 'size', 'op_scope', 'time')

    def __init__(self, kind, address, time, size=None, op_scope=None):
        """Initialize AllocEvent, use malloc() and free() for clarity."""
        if kind not in (self.MALLOC, self.FREE):
            raise TaggingException("Unknown event kind %r" % (kind))
        if kind == self.MALLOC and (size is None or size <= 0):
            raise TaggingException("Malloc at time %d must have size > 0" % (time))
        self.kind = kind
        self.address = TaggedAddress(address)
        self.time = time
        self.size = size if kind == self.MALLOC else None
        self.op_scope = (op_scope or '') if kind == self.MALLOC else None

    @classmethod
    def malloc(cls, time, address, size, op_scope=''):
        """Malloc event."""
        return cls(cls.MALLOC, address, time, size=size, op_scope=op_scope)

    @classmethod
    def free(cls, time, address):
        """Free event."""
        return cls(cls.FREE, address, time)

    def as_dict(self):
        """Dictionary form used for the JSON Lines event format."""
        d = {'kind': self.kind, 'addr': '0x%016x' % (self.address), 'time': self.time}
        if self.kind == self.MALLOC:
            d['size'] = self.size
            d['op'] = self.op_scope
        return d


def bracket_lifetimes(events, counter=None, source='bracketed'):
    """Reconstruct a Trace from time-ordered malloc/free events.

    Each malloc is given the next tag from counter and becomes one record
    with id = tag and lifetime [malloc.time, free.time). A free at the same
    time as its malloc still occupies that one timestep. Mallocs that are
    never freed last until 1 + the last event time and are marked escaped.
    """
    log = logging.getLogger(name="memoplan.tagging")
    if counter is None:
        counter = TagCounter()
    pending = {}  # tag -> [tag, size, start, end, op]
    brackets = []
    freed = set()
    last_time = -1
    for ev in events:
        if ev.time < last_time:
            raise TaggingException("Event at time %d follows event at time %d, events must be ordered by time" % (ev.time, last_time))
        last_time = ev.time
        if ev.kind == AllocEvent.MALLOC:
            tag = counter.issue()
            if not is_canonical(ev.address) and ev.address.tag != tag:
                log.warning("Malloc at time %d carries tag %d, reassigned tag %d", ev.time, ev.address.tag, tag)
            bracket = [tag, ev.size, ev.time, None, ev.op_scope]
            pending[tag] = bracket
            brackets.append(bracket)
        else:
            tag = ev.address.tag
            if tag in pending:
                bracket = pending.pop(tag)
                bracket[3] = max(ev.time, bracket[2] + 1)
                freed.add(tag)
            elif tag in freed:
                raise DoubleFree(tag)
            else:
                raise UnmatchedFree(tag)
    trace_end = last_time + 1
    records = []
    for tag, size, start, end, op in brackets:
        if end is None:
            records.append(AllocationRecord(tag, size, (start, trace_end), op, escaped=True))
        else:
            records.append(AllocationRecord(tag, size, (start, end), op))
    if len(pending) > 0:
        log.info("%d of %d allocations never freed, marked escaped", len(pending), len(records))
    return validate_trace(records, source=source)


def _parse_address(value, line_num):
    """Parse hex address string."""
    if type(value) != str:
        raise MalformedEventLine(line_num, "'addr' must be a hex string")
    try:
        address = int(value, 16)
    except ValueError:
        raise MalformedEventLine(line_num, "bad hex address %r" % (value))
    if address < 0 or address > WORD_MASK:
        raise MalformedEventLine(line_num, "address %r does not fit in 64 bits" % (value))
    return address


def parse_events(fh):
    """Read JSON Lines events from file handle fh, return list of AllocEvent."""
    events = []
    for line_num, line in enumerate(fh, start=1):
        line = line.strip()
        if line == '':
            continue
        try:
            obj = json.loads(line)
        except ValueError as e:
            raise MalformedEventLine(line_num, str(e))
        if type(obj) != dict:
            raise MalformedEventLine(line_num, "not a JSON object")
        kind = obj.get('kind')
        time = obj.get('time')
        if type(time) != int or time < 0:
            raise MalformedEventLine(line_num, "'time' must be a non-negative integer")
        address = _parse_address(obj.get('addr'), line_num)
        if kind == AllocEvent.MALLOC:
            size = obj.get('size')
            if type(size) != int or size <= 0:
                raise MalformedEventLine(line_num, "malloc 'size' must be a positive integer")
            op = obj.get('op', '')
            if type(op) != str:
                raise MalformedEventLine(line_num, "'op' must be a string")
            events.append(AllocEvent.malloc(time, address, size, op))
        elif kind == AllocEvent.FREE:
            events.append(AllocEvent.free(time, address))
        else:
            raise MalformedEventLine(line_num, "'kind' must be malloc or free, got %r" % (kind))
    return events


def read_events(filename):
    """Read JSON Lines event file filename."""
    with open(filename, 'r') as fh:
        return parse_events(fh)


def write_events(events, filename):
    """Write events to JSON Lines file filename."""
    with open(filename, 'w') as fh:
        for ev in events:
            fh.write(json.dumps(ev.as_dict(), sort_keys=True) + "\n")
