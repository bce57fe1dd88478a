"""Markov equivalence machinery: Meek closure, CPDAGs, MPDAGs and enumeration."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ConstructFail, InconsistentOrientation, NotADAG, TooLarge
from .graph import PDAG, directed_descendants, is_acyclic_extension

MAX_UNDIRECTED = 20


@dataclass(frozen=True)
class Provenance:
    base_cpdag: PDAG
    background: tuple


@dataclass(frozen=True)
class MaxOrientedGraph:
    """A Meek-closed graph tagged as ``"CPDAG"`` or ``"MPDAG"``."""

    graph: PDAG
    role: str = "MPDAG"
    provenance: Provenance | None = None

    def __post_init__(self):
        if self.role not in ("CPDAG", "MPDAG"):
            raise ValueError(f"unknown role {self.role!r}")

    @property
    def vertices(self):
        return self.graph.vertices


def as_pdag(g) -> PDAG:
    return g.graph if isinstance(g, MaxOrientedGraph) else g


def background_knowledge(edges: Iterable[tuple[str, str]]) -> tuple:
    """Validate a list of direct-cause statements and return it as a tuple."""
    out = []
    seen = set()
    for tail, head in edges:
        if tail == head:
            raise ValueError(f"background edge {tail} -> {head} is a self-loop")
        if (tail, head) in seen:
            raise ValueError(f"duplicate background edge {tail} -> {head}")
        seen.add((tail, head))
        out.append((tail, head))
    return tuple(out)


# --- Meek rules


class _Orienter:
    """Mutable adjacency used while closing a graph under Meek's rules."""

    def __init__(self, graph: PDAG):
        self.vertices = graph.vertices
        self.pa = {v: set(graph.parents(v)) for v in graph.vertices}
        self.ch = {v: set(graph.children(v)) for v in graph.vertices}
        self.sib = {v: set(graph.siblings(v)) for v in graph.vertices}

    def adj(self, u, v):
        return v in self.pa[u] or v in self.ch[u] or v in self.sib[u]

    def orient(self, u, v):
        self.sib[u].discard(v)
        self.sib[v].discard(u)
        self.ch[u].add(v)
        self.pa[v].add(u)

    def implied(self, a, b) -> bool:
        """Does some Meek rule force the undirected edge a -- b into a -> b?"""
        pa, ch, sib = self.pa, self.ch, self.sib
        # R1: c -> a -- b, c and b non-adjacent
        for c in pa[a]:
            if not self.adj(c, b):
                return True
        # R2: a -> c -> b
        if ch[a] & pa[b]:
            return True
        # R3: a -- c -> b, a -- d -> b, c and d non-adjacent
        cands = sib[a] & pa[b]
        if len(cands) > 1:
            cands = list(cands)
            for i, c in enumerate(cands):
                for d in cands[i + 1:]:
                    if not self.adj(c, d):
                        return True
        # R4: a -- c -> d -> b, c and b non-adjacent, a adjacent to d
        for c in sib[a]:
            if self.adj(c, b):
                continue
            for d in ch[c]:
                if d in pa[b] and self.adj(a, d):
                    return True
        return False

    def close(self):
        changed = True
        while changed:
            changed = False
            for a in self.vertices:
                for b in list(self.sib[a]):
                    if b not in self.sib[a]:
                        continue
                    fwd = self.implied(a, b)
                    back = self.implied(b, a)
                    if fwd and back:
                        raise InconsistentOrientation(
                            f"Meek rules orient {a} -- {b} in both directions"
                        )
                    if fwd:
                        self.orient(a, b)
                        changed = True
                    elif back:
                        self.orient(b, a)
                        changed = True

    def to_graph(self) -> PDAG:
        directed = [(u, v) for u in self.vertices for v in self.ch[u]]
        undirected = [(u, v) for u in self.vertices for v in self.sib[u] if u < v]
        return PDAG(self.vertices, directed, undirected)


def meek_closure(graph) -> PDAG:
    """Apply Meek's rules R1-R4 until none of them fires.

    The result has the same skeleton and a superset of the directed edges.
    Raises :class:`InconsistentOrientation` when the rules demand both
    orientations of one edge.
    """
    graph = as_pdag(graph)
    if not graph.undirected_edges:
        return graph
    o = _Orienter(graph)
    o.close()
    out = o.to_graph()
    return graph if out == graph else out


def _directed_part_acyclic(graph: PDAG) -> bool:
    plain = PDAG(graph.vertices, graph.sorted_directed())
    return is_acyclic_extension(plain)[0]


def v_structures(graph: PDAG) -> set:
    """Unshielded colliders ``(a, c, b)`` with ``a -> c <- b``, a before b."""
    out = set()
    for c in graph.vertices:
        parents = graph.ordered(graph.parents(c))
        for i, a in enumerate(parents):
            for b in parents[i + 1:]:
                if not graph.is_adjacent(a, b):
                    out.add((a, c, b))
    return out


def dag_to_cpdag(dag) -> MaxOrientedGraph:
    """CPDAG of a DAG: v-structure edges stay directed, then Meek closure."""
    dag = as_pdag(dag)
    ok, _ = is_acyclic_extension(dag)
    if not ok:
        raise NotADAG("input has undirected edges or a directed cycle")
    keep = set()
    for a, c, b in v_structures(dag):
        keep.add((a, c))
        keep.add((b, c))
    directed = [e for e in dag.sorted_directed() if e in keep]
    undirected = [e for e in dag.sorted_directed() if e not in keep]
    pattern = PDAG(dag.vertices, directed, undirected)
    return MaxOrientedGraph(meek_closure(pattern), role="CPDAG")


def construct_mpdag(base, bk: Sequence[tuple[str, str]]) -> MaxOrientedGraph:
    """Refine a CPDAG or MPDAG with direct-cause background knowledge.

    Background edges are applied in list order; each one must be present as
    an undirected edge or already point the same way, otherwise
    :class:`ConstructFail` names the offending edge.
    """
    bk = background_knowledge(bk)
    if isinstance(base, MaxOrientedGraph):
        base_graph = base.graph
        base_cpdag = base.provenance.base_cpdag if base.provenance else base.graph
        prior = base.provenance.background if base.provenance else ()
    else:
        base_graph = base_cpdag = base
        prior = ()
    current = base_graph
    for s, t in bk:
        if s not in current or t not in current:
            raise ConstructFail((s, t), "unknown vertex")
        if current.has_directed(s, t):
            continue
        if not current.has_undirected(s, t):
            reason = f"{t} -> {s} is already oriented" if current.has_directed(t, s) else "not adjacent"
            raise ConstructFail((s, t), reason)
        try:
            current = meek_closure(current.orient([(s, t)]))
        except InconsistentOrientation as exc:
            raise ConstructFail((s, t), str(exc)) from None
        if not _directed_part_acyclic(current):
            raise ConstructFail((s, t), "orientation creates a directed cycle")
    return MaxOrientedGraph(current, role="MPDAG", provenance=Provenance(base_cpdag, prior + bk))


def _dag_key(dag: PDAG):
    return tuple((dag.index(u), dag.index(v)) for u, v in dag.sorted_directed())


def enumerate_equivalent_dags(g, verify: bool = False) -> list[PDAG]:
    """Every DAG represented by a Meek-closed graph.

    Orientations of the undirected edges are explored depth first; a branch
    is cut as soon as it closes a directed cycle or creates an unshielded
    collider that ``g`` does not already contain. With ``verify=True`` each
    member is also checked by recomputing its CPDAG.
    """
    graph = as_pdag(g)
    undirected = graph.undirected_edges
    if len(undirected) > MAX_UNDIRECTED:
        raise TooLarge(f"{len(undirected)} undirected edges exceed the limit of {MAX_UNDIRECTED}")

    pa = {v: set(graph.parents(v)) for v in graph.vertices}
    ch = {v: set(graph.children(v)) for v in graph.vertices}
    results = []

    def reaches(src, dst):
        stack, seen = [src], {src}
        while stack:
            v = stack.pop()
            if v == dst:
                return True
            for c in ch[v]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return False

    def allowed(u, v):
        for w in pa[v]:
            if not graph.is_adjacent(w, u):
                return False
        return not reaches(v, u)

    def search(i):
        if i == len(undirected):
            directed = [(u, v) for u in graph.vertices for v in ch[u]]
            results.append(PDAG(graph.vertices, directed))
            return
        x, y = undirected[i]
        for u, v in ((x, y), (y, x)):
            if allowed(u, v):
                ch[u].add(v)
                pa[v].add(u)
                search(i + 1)
                ch[u].discard(v)
                pa[v].discard(u)

    search(0)
    results.sort(key=_dag_key)

    if verify:
        _verify_members(g, results)
    return results


def _verify_members(g, dags):
    if isinstance(g, MaxOrientedGraph) and g.provenance is not None:
        cpdag, bk = g.provenance.base_cpdag, g.provenance.background
    elif isinstance(g, MaxOrientedGraph) and g.role == "CPDAG":
        cpdag, bk = g.graph, ()
    else:
        cpdag, bk = None, ()
    for dag in dags:
        if cpdag is not None and dag_to_cpdag(dag).graph != cpdag:
            raise AssertionError(f"{dag!r} is not in the class of the base CPDAG")
        for s, t in bk:
            if not dag.has_directed(s, t):
                raise AssertionError(f"{dag!r} violates background edge {s} -> {t}")


def descendant_counts(g) -> tuple[dict, int]:
    """Count, for each ordered pair (s, t), the class members where t descends from s.

    Returns ``(counts, n_members)``. This brute-force tally is the reference
    the graphical classifier is checked against.
    """
    dags = enumerate_equivalent_dags(g)
    counts: dict = {}
    for dag in dags:
        for s in dag.vertices:
            for t in directed_descendants(dag, s):
                if t != s:
                    counts[s, t] = counts.get((s, t), 0) + 1
    return counts, len(dags)
