"""Partially directed graphs and the basic queries every other module needs."""

from __future__ import annotations

import heapq
import re
from collections import deque
from typing import Iterable, NamedTuple, Sequence

from .errors import DuplicateAdjacency, InvalidPath, UnknownNode

NODE_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")


class Neighborhood(NamedTuple):
    parents: frozenset
    children: frozenset
    siblings: frozenset
    adjacents: frozenset


class PDAG:
    """Immutable graph with disjoint directed and undirected edge sets.

    Vertices keep their insertion order: explicitly listed vertices first,
    then any vertex first mentioned by an edge. The same class holds DAGs,
    CPDAGs and MPDAGs; the role is carried by the caller.

    >>> g = PDAG(directed=[("A", "B")], undirected=[("B", "C")])
    >>> g.vertices
    ('A', 'B', 'C')
    >>> sorted(g.siblings("B"))
    ['C']
    """

    __slots__ = ("_vertices", "_index", "_directed", "_undirected", "_pa", "_ch", "_sib", "_hash")

    def __init__(
        self,
        vertices: Iterable[str] = (),
        directed: Iterable[tuple[str, str]] = (),
        undirected: Iterable[tuple[str, str]] = (),
    ):
        directed = [tuple(e) for e in directed]
        undirected = [tuple(e) for e in undirected]
        order: dict[str, int] = {}
        for v in vertices:
            _check_name(v)
            order.setdefault(v, len(order))
        for u, v in directed + undirected:
            for x in (u, v):
                _check_name(x)
                order.setdefault(x, len(order))

        pa = {v: set() for v in order}
        ch = {v: set() for v in order}
        sib = {v: set() for v in order}
        seen = set()
        for kind, edges in (("->", directed), ("--", undirected)):
            for u, v in edges:
                if u == v:
                    raise DuplicateAdjacency(f"self-loop on {u}")
                key = frozenset((u, v))
                if key in seen:
                    raise DuplicateAdjacency(f"more than one edge between {u} and {v}")
                seen.add(key)
                if kind == "->":
                    ch[u].add(v)
                    pa[v].add(u)
                else:
                    sib[u].add(v)
                    sib[v].add(u)

        self._vertices = tuple(order)
        self._index = order
        self._directed = frozenset(directed)
        self._undirected = frozenset(frozenset(e) for e in undirected)
        self._pa = {v: frozenset(s) for v, s in pa.items()}
        self._ch = {v: frozenset(s) for v, s in ch.items()}
        self._sib = {v: frozenset(s) for v, s in sib.items()}
        self._hash = None

    # --- basic accessors

    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def directed_edges(self) -> frozenset:
        return self._directed

    @property
    def undirected_edges(self) -> list[tuple[str, str]]:
        """Undirected edges as pairs ordered by vertex position, sorted."""
        idx = self._index
        pairs = (tuple(sorted(e, key=idx.__getitem__)) for e in self._undirected)
        return sorted(pairs, key=lambda p: (idx[p[0]], idx[p[1]]))

    @property
    def num_edges(self) -> int:
        return len(self._directed) + len(self._undirected)

    def index(self, v: str) -> int:
        self._require(v)
        return self._index[v]

    def __contains__(self, v) -> bool:
        return v in self._index

    def __len__(self) -> int:
        return len(self._vertices)

    def _require(self, *nodes):
        for v in nodes:
            if v not in self._index:
                raise UnknownNode(v)

    def parents(self, v: str) -> frozenset:
        self._require(v)
        return self._pa[v]

    def children(self, v: str) -> frozenset:
        self._require(v)
        return self._ch[v]

    def siblings(self, v: str) -> frozenset:
        self._require(v)
        return self._sib[v]

    def adjacent(self, v: str) -> frozenset:
        self._require(v)
        return self._pa[v] | self._ch[v] | self._sib[v]

    def is_adjacent(self, u: str, v: str) -> bool:
        return v in self._ch[u] or v in self._pa[u] or v in self._sib[u]

    def has_directed(self, u: str, v: str) -> bool:
        return v in self._ch.get(u, ())

    def has_undirected(self, u: str, v: str) -> bool:
        return v in self._sib.get(u, ())

    def ordered(self, nodes: Iterable[str]) -> list[str]:
        """Return ``nodes`` sorted by vertex insertion order."""
        return sorted(nodes, key=self._index.__getitem__)

    def sorted_directed(self) -> list[tuple[str, str]]:
        idx = self._index
        return sorted(self._directed, key=lambda e: (idx[e[0]], idx[e[1]]))

    # --- derived graphs

    def orient(self, edges: Iterable[tuple[str, str]]) -> "PDAG":
        """New graph with the given undirected edges turned into ``u -> v``.

        Edges already directed the same way are left alone.
        """
        to_orient = {}
        for u, v in edges:
            if self.has_directed(u, v):
                continue
            if not self.has_undirected(u, v):
                raise ValueError(f"{u} -- {v} is not an undirected edge")
            to_orient[frozenset((u, v))] = (u, v)
        if not to_orient:
            return self
        undirected = [e for e in self.undirected_edges if frozenset(e) not in to_orient]
        directed = self.sorted_directed() + list(to_orient.values())
        return PDAG(self._vertices, directed, undirected)

    def skeleton(self) -> frozenset:
        return frozenset(frozenset(e) for e in self._directed) | self._undirected

    # --- comparison

    def __eq__(self, other):
        if not isinstance(other, PDAG):
            return NotImplemented
        return (
            set(self._vertices) == set(other._vertices)
            and self._directed == other._directed
            and self._undirected == other._undirected
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._vertices), self._directed, self._undirected))
        return self._hash

    def __repr__(self):
        parts = [f"{u}->{v}" for u, v in self.sorted_directed()]
        parts += [f"{u}--{v}" for u, v in self.undirected_edges]
        isolated = [v for v in self._vertices if not self.adjacent(v)]
        parts += isolated
        return f"PDAG({', '.join(parts)})"


def _check_name(v):
    if not isinstance(v, str) or not NODE_PATTERN.match(v):
        raise ValueError(f"invalid node name {v!r}")


def neighborhood(graph: PDAG, v: str) -> Neighborhood:
    return Neighborhood(graph.parents(v), graph.children(v), graph.siblings(v), graph.adjacent(v))


def is_acyclic_extension(graph: PDAG) -> tuple[bool, list | None]:
    """Check that ``graph`` is a DAG.

    Returns ``(True, order)`` with a topological order that breaks ties by
    vertex insertion order, or ``(False, None)`` when the graph has an
    undirected edge or a directed cycle.
    """
    if graph.undirected_edges:
        return False, None
    indeg = {v: len(graph.parents(v)) for v in graph.vertices}
    heap = [graph.index(v) for v in graph.vertices if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = graph.vertices[heapq.heappop(heap)]
        order.append(v)
        for c in graph.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, graph.index(c))
    if len(order) != len(graph):
        return False, None
    return True, order


def induces_complete_subgraph(graph: PDAG, nodes: Iterable[str]) -> bool:
    nodes = list(nodes)
    graph._require(*nodes)
    for i, u in enumerate(nodes):
        for v in nodes[i + 1:]:
            if u != v and not graph.is_adjacent(u, v):
                return False
    return True


def directed_descendants(graph: PDAG, s: str) -> set:
    """Vertices reachable from ``s`` along directed edges, ``s`` included."""
    graph._require(s)
    seen = {s}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for c in graph.children(v):
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return seen


def validate_path(graph: PDAG, path: Sequence[str]) -> None:
    if len(path) < 2:
        raise InvalidPath("a path needs at least two vertices")
    graph._require(*path)
    if len(set(path)) != len(path):
        raise InvalidPath("path repeats a vertex")
    for u, v in zip(path, path[1:]):
        if not graph.is_adjacent(u, v):
            raise InvalidPath(f"{u} and {v} are not adjacent")


def is_b_possibly_causal(graph: PDAG, path: Sequence[str]) -> bool:
    """True when no edge of ``graph`` points backwards along ``path``.

    Every pair of path vertices is inspected, so a chord ``p[j] -> p[i]``
    with ``i < j`` makes the path non-causal even when it is not on the path.
    """
    validate_path(graph, path)
    for i in range(len(path)):
        later_parents = graph.parents(path[i])
        if not later_parents:
            continue
        for j in range(i + 1, len(path)):
            if path[j] in later_parents:
                return False
    return True
