"""Ancestral relations between vertices of an MPDAG.

A vertex ``t`` is a definite descendant of ``s`` when it descends from ``s``
in every DAG the MPDAG represents, a definite non-descendant when it does so
in none, and a possible descendant otherwise. The classification here is
graphical: it only inspects the critical set of ``s`` with respect to ``t``
and never enumerates the equivalence class.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .equivalence import as_pdag
from .errors import RootAssumptionViolated, SameNode, UnknownNode
from .graph import PDAG, directed_descendants, induces_complete_subgraph


class AncestralRelation(enum.Enum):
    DEFINITE_DESCENDANT = "definite-descendant"
    POSSIBLE_DESCENDANT = "possible-descendant"
    DEFINITE_NON_DESCENDANT = "definite-non-descendant"

    def __str__(self):
        return self.value


@dataclass
class CriticalSearch:
    """Outcome of one critical-set search.

    ``dequeued`` counts the triples taken off the queue. ``paths`` is only
    filled when the search was asked to record them and maps every dequeued
    triple to the walk that first produced it.
    """

    members: frozenset
    dequeued: int
    paths: dict = field(default_factory=dict)


def _check_pair(graph: PDAG, s, t):
    for v in (s, t):
        if v not in graph:
            raise UnknownNode(v)
    if s == t:
        raise SameNode(f"source and target are both {s!r}")


def critical_set_search(g, s: str, t: str, record_paths: bool = False) -> CriticalSearch:
    """Breadth-first search for the critical set of ``s`` with respect to ``t``.

    The queue holds triples ``(alpha, phi, tau)``: ``alpha`` is the vertex
    right after ``s``, ``tau`` the current end of the walk and ``phi`` the
    vertex before it. A walk is only extended along edges out of ``tau``
    (directed or undirected) that keep it of definite status and never to a
    vertex adjacent to ``s``, so no chord of the walk ends in ``s``. Once some
    walk through ``alpha`` reaches ``t``, the pending triples for ``alpha``
    are dropped.
    """
    graph = as_pdag(g)
    _check_pair(graph, s, t)

    queue = deque()
    queued = set()
    visited = set()
    parent = {}
    for alpha in graph.ordered(graph.siblings(s) | graph.children(s)):
        triple = (alpha, s, alpha)
        queue.append(triple)
        queued.add(triple)

    members = set()
    dequeued = 0
    paths = {}
    while queue:
        triple = queue.popleft()
        queued.discard(triple)
        visited.add(triple)
        dequeued += 1
        alpha, phi, tau = triple
        if record_paths:
            paths[triple] = _walk(parent, triple, s)
        if tau == t:
            members.add(alpha)
            kept = [q for q in queue if q[0] != alpha]
            queued.difference_update(q for q in queue if q[0] == alpha)
            queue = deque(kept)
            continue
        for beta in graph.ordered(graph.children(tau) | graph.siblings(tau)):
            if beta == phi or beta == s:
                continue
            if not (graph.has_directed(tau, beta) or not graph.is_adjacent(phi, beta) or phi == s):
                continue
            if graph.is_adjacent(beta, s):
                continue
            nxt = (alpha, tau, beta)
            if nxt in visited or nxt in queued:
                continue
            queue.append(nxt)
            queued.add(nxt)
            parent.setdefault(nxt, triple)

    return CriticalSearch(frozenset(members), dequeued, paths)


def _walk(parent, triple, s):
    nodes = [triple[2]]
    while triple in parent:
        triple = parent[triple]
        nodes.append(triple[2])
    nodes.append(s)
    return nodes[::-1]


def find_critical_set(g, s: str, t: str) -> frozenset:
    return critical_set_search(g, s, t).members


def classify_relation(g, s: str, t: str) -> AncestralRelation:
    graph = as_pdag(g)
    crit = find_critical_set(graph, s, t)
    if not crit:
        return AncestralRelation.DEFINITE_NON_DESCENDANT
    if crit & graph.children(s) or not induces_complete_subgraph(graph, crit):
        return AncestralRelation.DEFINITE_DESCENDANT
    return AncestralRelation.POSSIBLE_DESCENDANT


def classify_all(g, s: str) -> dict:
    """Relation of every other vertex to ``s``, in vertex order."""
    graph = as_pdag(g)
    if s not in graph:
        raise UnknownNode(s)
    return {t: classify_relation(graph, s, t) for t in graph.vertices if t != s}


def classify_root(g, a: str) -> dict:
    """Fast path when ``a`` is a root: its descendants are exactly the
    vertices reachable along directed edges and nothing is only possible.
    """
    graph = as_pdag(g)
    if a not in graph:
        raise UnknownNode(a)
    if graph.parents(a) or graph.siblings(a):
        bad = graph.ordered(graph.parents(a) | graph.siblings(a))
        raise RootAssumptionViolated(
            f"{a} has incoming or undirected edges from {', '.join(bad)}"
        )
    desc = directed_descendants(graph, a)
    return {
        t: (AncestralRelation.DEFINITE_DESCENDANT if t in desc
            else AncestralRelation.DEFINITE_NON_DESCENDANT)
        for t in graph.vertices if t != a
    }


def group_relations(graph, relations: dict) -> dict:
    """Split a relation map into the three vertex lists, in vertex order."""
    graph = as_pdag(graph)
    out = {r: [] for r in AncestralRelation}
    for v in graph.ordered(relations):
        out[relations[v]].append(v)
    return out
