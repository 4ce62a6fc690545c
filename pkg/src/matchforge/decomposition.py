"""Matching-graph decomposition.

Given a heuristic matching M and a maximum matching, canonicalize the
optimum so that every component of (V, M union M*) is either a singleton
(one shared edge) or an alternating path that starts and ends with an
M*-edge, then classify components and their local ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import Edge, Graph, Matching, norm_edge
from . import optimum

SINGLETON = "singleton"
PATH = "path"


class CanonicalizationError(ValueError):
    """A component shape that a maximal matching cannot produce was found."""


class NonCanonicalError(ValueError):
    """decompose() was handed a non-canonicalized optimum matching."""


@dataclass(frozen=True)
class Component:
    """One component of the matching graph.

    nodes are listed along the alternating structure; for a path the first
    and last node are the two endpoints (no incident M-edge), and the walk
    starts at the endpoint with the smaller id.
    """

    kind: str
    nodes: tuple[int, ...]
    m_edges: tuple[Edge, ...]
    opt_edges: tuple[Edge, ...]
    endpoints: tuple[int, ...]

    @property
    def m_count(self) -> int:
        return len(self.m_edges)

    @property
    def opt_count(self) -> int:
        return len(self.opt_edges)

    @property
    def local_ratio(self) -> Fraction:
        return Fraction(self.m_count, self.opt_count)


@dataclass(frozen=True)
class Decomposition:
    graph: Graph
    matching: Matching
    m_star: Matching
    components: tuple[Component, ...]
    f_edges: frozenset[Edge]

    @property
    def component_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, comp in enumerate(self.components):
            for v in comp.nodes:
                out[v] = i
        return out

    @property
    def endpoints(self) -> frozenset[int]:
        return frozenset(w for c in self.components for w in c.endpoints)

    @property
    def global_ratio(self) -> Fraction:
        if len(self.m_star) == 0:
            return Fraction(1)
        return Fraction(len(self.matching), len(self.m_star))


def _union_walk(m: Matching, m2: Matching):
    """Yield the components of (V, m union m2) as (nodes, edges) walks.

    Each component is a simple path or cycle because every node touches at
    most one edge of each matching.  nodes/edges are in walk order; for a
    cycle the closing edge is included and nodes[0] == start.
    """
    mate1 = {}
    mate2 = {}
    for u, v in m:
        mate1[u] = v
        mate1[v] = u
    for u, v in m2:
        mate2[u] = v
        mate2[v] = u
    covered = sorted(set(mate1) | set(mate2))
    seen: set[int] = set()

    for start in covered:
        if start in seen:
            continue
        # Walk to one extremity first unless we are on a cycle.
        def step(v, via):
            # via: which matching the previous edge came from (1 or 2)
            if via != 1 and v in mate1:
                return mate1[v], 1
            if via != 2 and v in mate2:
                return mate2[v], 2
            return None, 0

        # Detect the shared-edge singleton immediately.
        if start in mate1 and start in mate2 and mate1[start] == mate2[start]:
            other = mate1[start]
            seen.update((start, other))
            yield [start, other], [(norm_edge(start, other), "both")]
            continue

        # Find an endpoint by walking one direction to exhaustion.
        prev_kind = 0
        cur = start
        visited = {start}
        is_cycle = False
        while True:
            nxt, kind = step(cur, prev_kind)
            if nxt is None:
                break
            if nxt in visited:
                is_cycle = True
                break
            visited.add(nxt)
            cur, prev_kind = nxt, kind
        head = cur if not is_cycle else start

        nodes = [head]
        edges = []
        seen.add(head)
        prev_kind = 0
        cur = head
        while True:
            nxt, kind = step(cur, prev_kind)
            if nxt is None:
                break
            label = "m" if kind == 1 else "opt"
            if nxt == head:
                edges.append((norm_edge(cur, nxt), label))
                break
            nodes.append(nxt)
            edges.append((norm_edge(cur, nxt), label))
            seen.add(nxt)
            cur, prev_kind = nxt, kind
        yield nodes, edges


def canonicalize(g: Graph, m: Matching, m_prime: Matching, check_maximum: bool = True) -> Matching:
    """Transform a maximum matching so the matching graph has only singletons
    and alternating paths that start and end with an optimum edge.

    Mixed paths and cycles have their optimum edges replaced by the heuristic
    edges of the same component, which preserves cardinality.  A component
    bounded by heuristic edges on both ends cannot occur for a maximal m
    against a maximum m_prime and is reported as an internal error.
    """
    m.validate(g)
    m_prime.validate(g)
    if check_maximum:
        best = optimum.maximum_matching(g, certify=False)
        if len(m_prime) != len(best):
            raise CanonicalizationError(
                f"matching of size {len(m_prime)} is not maximum (optimum is {len(best)})"
            )

    new_star: set[Edge] = set(m_prime.pairs)
    comps = sorted(_union_walk(m, m_prime), key=lambda ne: min(ne[0]))
    for nodes, edges in comps:
        labels = [lab for _, lab in edges]
        if labels == ["both"]:
            continue
        is_cycle = len(edges) == len(nodes)
        if is_cycle or (labels[0] == "m" and labels[-1] == "opt") or (
            labels[0] == "opt" and labels[-1] == "m"
        ):
            # Swap: drop this component's optimum edges, adopt its m-edges.
            for e, lab in edges:
                if lab == "opt":
                    new_star.discard(e)
                else:
                    new_star.add(e)
        elif labels[0] == "m" and labels[-1] == "m":
            raise CanonicalizationError(
                "component bounded by two heuristic edges: the first matching "
                "is larger there, so the second was not maximum"
            )
        # Path bounded by opt edges on both ends: already canonical.
    result = Matching(frozenset(new_star))
    if len(result) != len(m_prime):
        raise CanonicalizationError("canonicalization changed the matching size")
    return result


def decompose(g: Graph, m: Matching, m_star: Matching) -> Decomposition:
    """Classify every component of (V, m union m_star).

    Requires a canonicalized m_star; any cycle or mixed path is an error.
    """
    m.validate(g)
    m_star.validate(g)
    components: list[Component] = []
    for nodes, edges in sorted(_union_walk(m, m_star), key=lambda ne: min(ne[0])):
        labels = [lab for _, lab in edges]
        if labels == ["both"]:
            e = edges[0][0]
            components.append(Component(SINGLETON, tuple(sorted(nodes)), (e,), (e,), ()))
            continue
        if len(edges) == len(nodes):
            raise NonCanonicalError(f"cycle through node {min(nodes)} in the matching graph")
        if labels[0] != "opt" or labels[-1] != "opt":
            raise NonCanonicalError(
                f"mixed alternating path through node {min(nodes)}; canonicalize first"
            )
        if nodes[0] > nodes[-1]:
            nodes = list(reversed(nodes))
            edges = [(e, lab) for e, lab in reversed(edges)]
        m_edges = tuple(e for e, lab in edges if lab == "m")
        opt_edges = tuple(e for e, lab in edges if lab == "opt")
        if len(opt_edges) != len(m_edges) + 1:
            raise NonCanonicalError("alternating path is not an augmenting path")
        components.append(
            Component(PATH, tuple(nodes), m_edges, opt_edges, (nodes[0], nodes[-1]))
        )

    assert sum(c.m_count for c in components) == len(m)
    assert sum(c.opt_count for c in components) == len(m_star)
    f_edges = frozenset(g.edge_set - m.pairs - m_star.pairs)
    return Decomposition(g, m, m_star, tuple(components), f_edges)


def endpoint_degrees(dec: Decomposition) -> dict[int, int]:
    """Original-graph degree of every path endpoint."""
    return {w: dec.graph.degree(w) for w in sorted(dec.endpoints)}


def format_components(dec: Decomposition) -> str:
    """Text dump: one line per component 'c <kind> <m_X> <m*_X> <node list>'."""
    lines = []
    for comp in dec.components:
        nodes = " ".join(str(v) for v in comp.nodes)
        lines.append(f"c {comp.kind} {comp.m_count} {comp.opt_count} {nodes}")
    return "\n".join(lines) + "\n"
