"""Operator graphs, operator-scoped plans and execution replay.

A plan is made for one schedule of an operator graph, but a compiler may
run independent operators in any dependency-respecting order. Scoping ties
each planned allocation to the operator within which it is made, so after
a reordering the lifetimes (and so the plan) can be recomputed from the
new schedule. Replaying a plan that merely remembers the order in which
offsets were handed out can give two live records the same addresses.

Graph fixture files are JSON:

    {"nodes": [{"id": 0, "name": "conv1", "inputs": ["x"], "outputs": ["c1"],
                "allocs": [{"id": 0, "size": 4096, "backs": "c1", "out_variant": true}]},
               ...],
     "schedule": [0, 1, 2]}
"""
import collections
import json
import logging

import networkx as nx

from .plans import Plan
from .trace_model import AllocationRecord, validate_trace

ORDER_BASED = 'order_based'
OK = 'ok'
ILLEGAL = 'illegal'


class GraphException(Exception):
    """Exception class for operator graphs."""

    pass


class UnscopedRecord(GraphException):
    """A record's op_scope matches no node of the graph."""

    def __init__(self, id, op_scope=None):
        """Initialize with record id and its op_scope."""
        super(UnscopedRecord, self).__init__("Record %d has op_scope %r which matches no node" % (id, op_scope))
        self.id = id
        self.op_scope = op_scope


class AmbiguousScope(GraphException):
    """An op_scope names more than one node."""

    def __init__(self, op_scope, node_ids):
        """Initialize with op_scope and ids of the nodes it names."""
        super(AmbiguousScope, self).__init__("op_scope %r names nodes %s, use a node id" % (op_scope, node_ids))
        self.op_scope = op_scope
        self.node_ids = node_ids


class IllegalSchedule(GraphException):
    """A schedule is not a topological order of the graph."""

    def __init__(self, reason, edge=None):
        """Initialize with reason and the violated (producer, consumer) edge if any."""
        super(IllegalSchedule, self).__init__("Illegal schedule: %s" % (reason))
        self.edge = edge


class CyclicGraph(GraphException):
    """Data dependencies form a cycle."""

    pass


class AllocSpec(collections.namedtuple('AllocSpec', ['id', 'size', 'owner', 'backs', 'out_variant'])):
    """Allocation made within the scope of node owner, materializing value backs."""

    __slots__ = ()


class OpNode(object):
    """Operator of the graph.

    Attributes:
      id - node id
      name - operator label
      inputs - list of value ids consumed
      outputs - list of value ids produced
      alloc_group - list of record ids allocated within this operator
    """

    def __init__(self, id, name='', inputs=None, outputs=None, alloc_group=None):
        """Initialize OpNode."""
        self.id = id
        self.name = name
        self.inputs = [] if inputs is None else list(inputs)
        self.outputs = [] if outputs is None else list(outputs)
        self.alloc_group = [] if alloc_group is None else list(alloc_group)

    def __repr__(self):
        """Short description."""
        return "OpNode(%d, %s)" % (self.id, self.name)


class OpGraph(object):
    """DAG of OpNodes with data dependency edges and a schedule.

    allocs is a dict of record id to AllocSpec for the allocations the
    fixture declares, needed to derive lifetimes from the schedule.
    """

    def __init__(self, nodes, schedule=None, allocs=None):
        """Initialize and check OpGraph.

        Raises GraphException for duplicate ids or values produced twice,
        CyclicGraph if dependencies are cyclic and IllegalSchedule if the
        schedule is not a topological order. schedule defaults to node
        order.
        """
        self.nodes = list(nodes)
        self.allocs = {} if allocs is None else dict(allocs)
        self.node_by_id = {}
        for n in self.nodes:
            if n.id in self.node_by_id:
                raise GraphException("Duplicate node id %d" % (n.id))
            self.node_by_id[n.id] = n
        self.producer = {}
        self.consumers = collections.defaultdict(list)
        for n in self.nodes:
            for v in n.outputs:
                if v in self.producer:
                    raise GraphException("Value %s produced by nodes %d and %d" % (v, self.producer[v], n.id))
                self.producer[v] = n.id
            for v in n.inputs:
                self.consumers[v].append(n.id)
        owner = {}
        for n in self.nodes:
            for rid in n.alloc_group:
                if rid in owner:
                    raise GraphException("Record %d in alloc groups of nodes %d and %d" % (rid, owner[rid], n.id))
                owner[rid] = n.id
        self.dag = nx.DiGraph()
        self.dag.add_nodes_from(n.id for n in self.nodes)
        for v, consumers in sorted(self.consumers.items()):
            if v in self.producer:
                for c in consumers:
                    self.dag.add_edge(self.producer[v], c)
        if not nx.is_directed_acyclic_graph(self.dag):
            raise CyclicGraph("Data dependencies of graph contain a cycle")
        self.schedule = [n.id for n in self.nodes] if schedule is None else list(schedule)
        self._check_schedule()
        self.position = {nid: p for p, nid in enumerate(self.schedule)}

    def _check_schedule(self):
        """Raise IllegalSchedule unless schedule is a topological order."""
        if sorted(self.schedule) != sorted(self.node_by_id.keys()):
            raise IllegalSchedule("schedule %s is not a permutation of the graph's nodes" % (self.schedule))
        position = {nid: p for p, nid in enumerate(self.schedule)}
        for u, v in sorted(self.dag.edges()):
            if position[u] > position[v]:
                raise IllegalSchedule("node %d runs before its producer %d" % (v, u), edge=(u, v))

    @property
    def edges(self):
        """Sorted list of (producer, consumer) node id pairs."""
        return sorted(self.dag.edges())

    def node_for_scope(self, op_scope):
        """Node an op_scope refers to by id (as string) or name, None if none.

        Raises AmbiguousScope if op_scope is the name of several nodes.
        """
        for n in self.nodes:
            if str(n.id) == op_scope:
                return n
        named = [n for n in self.nodes if n.name != '' and n.name == op_scope]
        if len(named) > 1:
            raise AmbiguousScope(op_scope, [n.id for n in named])
        return named[0] if len(named) == 1 else None

    def lifetime(self, owner, backs=None):
        """(start, end) under the schedule of a record allocated by node owner.

        Starts at the owner's position and ends one after the last
        consumer of the value it backs, or after one timestep if nothing
        consumes it.
        """
        start = self.position[owner]
        end = start + 1
        if backs is not None:
            for c in self.consumers.get(backs, []):
                end = max(end, self.position[c] + 1)
        return (start, end)


def reorder(graph, new_schedule):
    """Copy of graph with schedule replaced, IllegalSchedule if an edge is violated."""
    return OpGraph(graph.nodes, schedule=new_schedule, allocs=graph.allocs)


def topological_orders(graph):
    """Sorted list of every dependency-respecting schedule of graph."""
    return sorted(list(order) for order in nx.all_topological_sorts(graph.dag))


def _owner(graph, record):
    """Node record's op_scope refers to, raise UnscopedRecord if none."""
    node = graph.node_for_scope(record.op_scope)
    if node is None:
        raise UnscopedRecord(record.id, record.op_scope)
    return node


def replan_lifetimes(graph, trace):
    """Trace with each record's lifetime recomputed from graph's schedule."""
    records = []
    for r in trace.records:
        owner = _owner(graph, r)
        spec = graph.allocs.get(r.id)
        lifetime = graph.lifetime(owner.id, spec.backs if spec is not None else None)
        records.append(AllocationRecord(r.id, r.size, lifetime, r.op_scope, escaped=r.escaped))
    return validate_trace(records, source=trace.source)


def graph_trace(graph):
    """Trace of the allocations declared in graph under its schedule.

    op_scope of each record is the owning node's id.
    """
    records = []
    for rid in sorted(graph.allocs):
        spec = graph.allocs[rid]
        records.append(AllocationRecord(rid, spec.size, graph.lifetime(spec.owner, spec.backs),
                                        str(spec.owner)))
    return validate_trace(records, source='graph')


class Draw(collections.namedtuple('Draw', ['record', 'offset', 'size', 'out_variant'])):
    """One tensor a node carves out of the slab."""

    __slots__ = ()


class ScopedPlan(object):
    """Slab size and, per node, the ordered Draws it makes."""

    def __init__(self, slab_size=0, draws=None, strategy='', alignment=1):
        """Initialize ScopedPlan, draws is a dict of node id to list of Draw."""
        self.slab_size = slab_size
        self.draws = {} if draws is None else draws
        self.strategy = strategy
        self.alignment = alignment

    def offsets(self):
        """Dict of record id to offset over all nodes."""
        return {d.record: d.offset for draws in self.draws.values() for d in draws}

    def flatten(self):
        """The Plan this scoped plan was made from."""
        return Plan(total_size=self.slab_size, offsets=self.offsets(), strategy=self.strategy,
                    alignment=self.alignment)


def _out_variant(graph, rid):
    spec = graph.allocs.get(rid)
    return bool(spec.out_variant) if spec is not None else False


def scope_plan(graph, trace, plan):
    """ScopedPlan giving each node the planned offsets of the records it allocates."""
    excluded = set(plan.excluded)
    draws = {n.id: [] for n in graph.nodes}
    for r in sorted(trace.records, key=lambda r: (r.start, r.id)):
        owner = _owner(graph, r)
        if r.id in excluded:
            continue
        draws[owner.id].append(Draw(r.id, plan.offsets[r.id], r.size, _out_variant(graph, r.id)))
    return ScopedPlan(plan.total_size, draws, strategy=plan.strategy, alignment=plan.alignment)


def order_based_plan(graph, trace, plan):
    """Plan replayed by allocation order instead of by operator scope.

    Offsets of the plan are remembered, per size, in the order records were
    allocated when it was made (by lifetime start in trace). Under graph's
    schedule the n-th allocation of a given size gets the n-th remembered
    offset of that size, as a runtime keyed only on allocation order would.
    """
    slots = collections.defaultdict(collections.deque)
    for r in sorted(trace.records, key=lambda r: (r.start, r.id)):
        slots[r.size].append(plan.offsets[r.id])
    draws = {n.id: [] for n in graph.nodes}
    by_id = trace.by_id
    replayed = []
    for r in trace.records:
        owner = _owner(graph, r)
        replayed.append((graph.position[owner.id], r.id, owner.id))
    for _, rid, owner in sorted(replayed):
        r = by_id[rid]
        draws[owner].append(Draw(rid, slots[r.size].popleft(), r.size, _out_variant(graph, rid)))
    return ScopedPlan(plan.total_size, draws, strategy=ORDER_BASED, alignment=plan.alignment)


class Access(collections.namedtuple('Access', ['time', 'node', 'record', 'low', 'high', 'verdict', 'kind'])):
    """A node touching record's extent [low, high) at time.

    kind is 'out' or 'queued' for a draw (out variant or queued
    allocation) and 'read' for reading an input.
    """

    __slots__ = ()


class AccessLog(object):
    """Accesses in execution order."""

    def __init__(self, events=None):
        """Initialize AccessLog."""
        self.events = [] if events is None else events

    @property
    def illegal(self):
        """Accesses with verdict illegal."""
        return [e for e in self.events if e.verdict == ILLEGAL]

    def __len__(self):
        """Number of accesses."""
        return len(self.events)


def simulate(graph, scoped):
    """Replay scoped under graph's schedule and return the AccessLog.

    Lifetimes come from the schedule actually executed. An access is
    illegal if its extent intersects the extent of another record live at
    the same time.
    """
    log = logging.getLogger(name="memoplan.graph_ir")
    extent = {}
    lifetime = {}
    owner_of = {}
    for nid, draws in scoped.draws.items():
        for d in draws:
            extent[d.record] = (d.offset, d.offset + d.size)
            spec = graph.allocs.get(d.record)
            lifetime[d.record] = graph.lifetime(nid, spec.backs if spec is not None else None)
            owner_of[d.record] = nid
    backing = collections.defaultdict(list)
    for rid, spec in graph.allocs.items():
        if spec.backs is not None and rid in extent:
            backing[spec.backs].append(rid)

    def verdict(rid, t):
        lo, hi = extent[rid]
        for other, (s, e) in lifetime.items():
            if other != rid and s <= t < e:
                olo, ohi = extent[other]
                if lo < ohi and olo < hi:
                    return ILLEGAL
        return OK

    events = []
    for t, nid in enumerate(graph.schedule):
        node = graph.node_by_id[nid]
        for v in node.inputs:
            for rid in sorted(backing.get(v, [])):
                lo, hi = extent[rid]
                events.append(Access(t, nid, rid, lo, hi, verdict(rid, t), 'read'))
        for d in scoped.draws.get(nid, []):
            kind = 'out' if d.out_variant else 'queued'
            events.append(Access(t, nid, d.record, d.offset, d.offset + d.size, verdict(d.record, t), kind))
    access_log = AccessLog(events)
    num_illegal = len(access_log.illegal)
    if num_illegal > 0:
        log.warning("Replay of %s plan made %d illegal accesses", scoped.strategy, num_illegal)
    else:
        log.info("Replay of %s plan made %d accesses, all legal", scoped.strategy, len(events))
    return access_log


def _node_from_dict(d, allocs):
    """OpNode from fixture node object, adding its allocations to allocs."""
    if type(d) != dict or type(d.get('id')) != int:
        raise GraphException("Graph node must be an object with integer 'id'")
    group = []
    for a in d.get('allocs', []):
        if type(a) != dict or type(a.get('id')) != int or type(a.get('size')) != int:
            raise GraphException("Allocation of node %d must have integer 'id' and 'size'" % (d['id']))
        if a['id'] in allocs:
            raise GraphException("Allocation %d declared twice" % (a['id']))
        backs = a.get('backs')
        if backs is not None and backs not in d.get('outputs', []):
            raise GraphException("Allocation %d backs %s which node %d does not produce" % (a['id'], backs, d['id']))
        allocs[a['id']] = AllocSpec(a['id'], a['size'], d['id'], backs, bool(a.get('out_variant', False)))
        group.append(a['id'])
    return OpNode(d['id'], name=d.get('name', ''), inputs=d.get('inputs', []),
                  outputs=d.get('outputs', []), alloc_group=group)


def graph_from_dict(d):
    """OpGraph from parsed fixture."""
    if type(d) != dict or type(d.get('nodes')) != list:
        raise GraphException("Graph must be a JSON object with a 'nodes' list")
    allocs = {}
    nodes = [_node_from_dict(n, allocs) for n in d['nodes']]
    return OpGraph(nodes, schedule=d.get('schedule'), allocs=allocs)


def load_graph(source):
    """Read graph fixture from filename or file handle source."""
    if hasattr(source, 'read'):
        d = json.load(source)
    else:
        with open(source, 'r') as fh:
            try:
                d = json.load(fh)
            except ValueError as e:
                raise GraphException("Graph file %s is not valid JSON: %s" % (source, str(e)))
    return graph_from_dict(d)
