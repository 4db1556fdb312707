"""Finite-support graphs on the naturals and injective homomorphisms between them."""

import itertools
import json
import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from networkx.algorithms import isomorphism

from .errors import GraphError
from .verdict import no, yes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteGraph:
    support: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.support < 0:
            raise GraphError(f"support must be >= 0, got {self.support}")
        norm = set()
        for e in self.edges:
            a, b = sorted(e)
            if a == b:
                raise GraphError(f"self-loop at {a}")
            if a < 0 or b >= self.support:
                raise GraphError(f"edge {{{a},{b}}} outside support {self.support}")
            norm.add((a, b))
        object.__setattr__(self, "edges", frozenset(norm))

    def has_edge(self, a, b):
        if a == b:
            return False
        return (min(a, b), max(a, b)) in self.edges


def graph_from_edges(support, edges):
    return FiniteGraph(support, frozenset(tuple(e) for e in edges))


def edge_touched(g):
    return sorted({v for e in g.edges for v in e})


def adjacency(g):
    m = np.zeros((g.support, g.support), dtype=bool)
    for a, b in g.edges:
        m[a, b] = m[b, a] = True
    return m


def restrict_support(g, m):
    """The graph induced on vertices 0..m-1, with support m."""
    return FiniteGraph(m, frozenset(e for e in g.edges if e[1] < m))


def all_graphs(m):
    """Every graph on support m, in a fixed order."""
    pairs = list(itertools.combinations(range(m), 2))
    for mask in range(1 << len(pairs)):
        yield FiniteGraph(m, frozenset(p for i, p in enumerate(pairs) if mask >> i & 1))


# ------------------------------------------------------------
# Injective homomorphisms
# ------------------------------------------------------------
def is_ihom(mapping, g, h):
    values = list(mapping.values())
    if len(set(values)) != len(values):
        return False
    for a, b in g.edges:
        if a not in mapping or b not in mapping:
            return False
        if not h.has_edge(mapping[a], mapping[b]):
            return False
    return True


def _nx_graph(g):
    G = nx.Graph()
    G.add_edges_from(g.edges)
    return G


def ihom_decide(g, h):
    """
    Decide g <=ihom h as a subgraph monomorphism between the edge-touched parts.

    Isolated vertices of g need no image. Yes carries the vertex map of the
    first monomorphism networkx finds as witness.
    """
    if not g.edges:
        return yes({})
    if len(g.edges) > len(h.edges):
        return no("EdgeCount", f"{len(g.edges)} edges > {len(h.edges)}")

    matcher = isomorphism.GraphMatcher(_nx_graph(h), _nx_graph(g))
    for mono in matcher.subgraph_monomorphisms_iter():
        assignment = {v: c for c, v in mono.items()}
        logger.debug("ihom_decide: yes %s", assignment)
        return yes(dict(sorted(assignment.items())))
    return no("NoInjectiveHomomorphism", "no subgraph monomorphism")


def extend_injection(mapping, h_support):
    """
    Total injective map on the naturals agreeing with ``mapping``.

    Vertices outside the mapping's domain go, in order, to fresh vertices beyond
    both the target support and every mapped value.
    """
    mapping = dict(mapping)
    base = max([h_support] + [v + 1 for v in mapping.values()])
    domain = sorted(mapping)

    def h(v):
        if v in mapping:
            return mapping[v]
        below = sum(1 for d in domain if d < v)
        return base + v - below

    return h


# ------------------------------------------------------------
# JSON files
# ------------------------------------------------------------
def graph_to_json(g):
    return {"support": g.support, "edges": [list(e) for e in sorted(g.edges)]}


def graph_from_json(data):
    try:
        return graph_from_edges(int(data["support"]), data.get("edges", []))
    except GraphError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise GraphError(f"malformed graph JSON: {e}")


def load_graph(path):
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Graph file not found: {path}")
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise GraphError(f"{path} is not valid JSON: {e}")
    return graph_from_json(data)
