"""Minimum cost flow over a network of storage reuse.

Every record either gets fresh storage or takes over the storage of a
record that died no later than it starts and is at least as large (shared
objects, no splitting of byte ranges). Choosing which records reuse which
is a min-cost flow problem: one unit of flow per record, a fresh storage arc
costs the record's aligned size and reuse arcs are free. The resulting
chains of reuse are pools, each as large as its first record, laid out one
after another.

All cost sits on the fresh storage arcs into a record, so the flow is
solved as a vertex weighted bipartite matching of predecessors to
successors. Successors are offered one at a time by decreasing aligned
size, each keeping a predecessor if an augmenting path frees one up. The
successors that can be matched together form a matroid, so this greedy
order reaches the minimum cost of the network built by reuse_network().
"""
import time

import networkx as nx
import numpy as np

from .plans import Timeout
from .strategy import Strategy

SOURCE = 'source'
SINK = 'sink'
# Throughput assumed when deciding whether a network can be solved before
# the deadline, networks expected to take longer are rejected up front.
ARCS_PER_SECOND = 200000


class MincostFlowStrategy(Strategy):
    """Class for mincost_flow planning."""

    name = 'mincost_flow'

    def _by_end(self, records):
        """Indexes of records in end order, with their ends and sizes in that order."""
        sizes = np.fromiter((r.size for r in records), dtype=np.int64, count=len(records))
        ends = np.fromiter((r.end for r in records), dtype=np.int64, count=len(records))
        order = np.argsort(ends, kind='stable')
        return order, ends[order], sizes[order]

    def count_reuse_arcs(self, records, limit=None):
        """Number of reuse arcs the network for records would have.

        Counting stops once limit is exceeded.
        """
        order, sorted_ends, sorted_sizes = self._by_end(records)
        ended = np.searchsorted(sorted_ends, [r.start for r in records], side='right')
        total = 0
        for k, r in enumerate(records):
            if k % 1024 == 0:
                self.check_deadline()
                if limit is not None and total > limit:
                    break
            total += int(np.count_nonzero(sorted_sizes[:ended[k]] >= r.size))
        return total

    def predecessors(self, records):
        """List, per record index, of indexes of records whose storage it may take over."""
        order, sorted_ends, sorted_sizes = self._by_end(records)
        preds = []
        for r in records:
            self.check_deadline()
            ended = np.searchsorted(sorted_ends, r.start, side='right')
            # Latest ending first, these are the likeliest to be free
            preds.append(order[:ended][sorted_sizes[:ended] >= r.size][::-1].tolist())
        return preds

    def admit(self, records):
        """Raise Timeout now if the network is too big to solve before the deadline."""
        if self.deadline is None:
            return
        budget = (self.deadline - time.monotonic()) * ARCS_PER_SECOND
        num_arcs = self.count_reuse_arcs(records, limit=budget)
        if num_arcs > budget:
            self.log.info("Reuse network with over %d arcs cannot be solved in time", budget)
            raise Timeout(self.name, self.config.timeout)

    def reuse_network(self, records):
        """Flow network for records sorted by (start, id), as a networkx DiGraph."""
        g = nx.DiGraph()
        g.add_node(SOURCE, demand=-len(records))
        g.add_node(SINK, demand=len(records))
        for r in records:
            g.add_edge(SOURCE, ('out', r.id), capacity=1, weight=0)
            g.add_edge(SOURCE, ('in', r.id), capacity=1, weight=self.align(r.size))
            g.add_edge(('in', r.id), SINK, capacity=1, weight=0)
        for j, preds in enumerate(self.predecessors(records)):
            for i in preds:
                g.add_edge(('out', records[i].id), ('in', records[j].id), capacity=1, weight=0)
        return g

    def augment(self, j, preds, taken_by, visited):
        """Find a predecessor for successor j along an augmenting path.

        taken_by maps predecessor index to the successor reusing it, it is
        updated along the path on success. Predecessors in visited are not
        tried again.
        """
        path = []
        successors = [j]
        stack = [iter(preds[j])]
        while stack:
            i = next((i for i in stack[-1] if i not in visited), None)
            if i is None:
                stack.pop()
                successors.pop()
                if len(path) > 0:
                    path.pop()
                continue
            visited.add(i)
            path.append(i)
            owner = taken_by.get(i)
            if owner is None:
                for s, p in zip(successors, path):
                    taken_by[p] = s
                return True
            successors.append(owner)
            stack.append(iter(preds[owner]))
        return False

    def reuse_pairs(self, records):
        """Dict of predecessor index to successor index of a minimum cost flow."""
        preds = self.predecessors(records)
        taken_by = {}
        visited = set()
        num_reused = 0
        for n, j in enumerate(sorted(range(len(records)),
                                     key=lambda k: (-self.align(records[k].size), k))):
            if n % 64 == 0:
                self.check_deadline()
            if len(preds[j]) == 0:
                continue
            if self.augment(j, preds, taken_by, visited):
                num_reused += 1
                # Marks only stay valid while the matching is unchanged
                visited = set()
        self.log.debug("%d of %d records reuse storage", num_reused, len(records))
        return taken_by

    def assign_offsets(self, trace):
        """Solve the reuse network and lay out the pools."""
        records = sorted(trace.records, key=lambda r: (r.start, r.id))
        if len(records) == 0:
            return {}
        self.admit(records)
        successor = {}
        has_predecessor = set()
        for i, j in self.reuse_pairs(records).items():
            successor[records[i].id] = records[j].id
            has_predecessor.add(records[j].id)
        offsets = {}
        cursor = 0
        for head in records:
            if head.id in has_predecessor:
                continue
            rid = head.id
            while rid is not None:
                offsets[rid] = cursor
                rid = successor.get(rid)
            cursor += self.align(head.size)
        return offsets
