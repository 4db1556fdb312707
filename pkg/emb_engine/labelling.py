"""
Labellings of functions by fibre data.

Gamma labels functions over lim(pt): the limit value gets (0, fibre size),
every other image value gets (1, fibre size). Lambda labels locally constant
functions by the fibre spaces themselves. Comparing labels pointwise along an
injection of images decides embeddability on these classes.
"""

import logging
from dataclasses import dataclass, field

import networkx as nx

from .errors import LabelMismatch, NotContinuous, NotLocallyConstant, UnsupportedDomain
from .fn_embed import (
    IMAGE_CARDINALITY,
    FnShape,
    Plan,
    class_d_witness,
    fibre_witness,
)
from .fn_rep import (
    is_continuous,
    is_locally_constant,
    key_index,
    key_value,
    profile,
    value_sort_key,
)
from .space_embed import space_embeds
from .space_term import INF, Lim, Pt, canonical_form
from .verdict import no, yes

logger = logging.getLogger(__name__)

GAMMA = "gamma"
LAMBDA = "lambda"

LABEL_ORDER = "LabelOrder"
LABEL_KIND = "LabelKind"


# ============================================================
# Labels
# ============================================================
@dataclass(frozen=True)
class LabelL:
    tier: int
    size: object

    def as_list(self):
        return [self.tier, "w" if self.size == INF else self.size]


@dataclass(frozen=True)
class Star:
    def as_list(self):
        return ["star"]


STAR = Star()


def label_order(a, b):
    """(i, p) <= (j, q) iff i == j and p <= q; Star is only comparable to itself."""
    if isinstance(a, Star) or isinstance(b, Star):
        return a == b
    return a.tier == b.tier and a.size <= b.size


@dataclass
class LabelMap:
    """
    Finite label table plus one rule per approach family.

    For Gamma maps ``table`` holds LabelL values and ``families`` maps a family
    key to the label shared by all values of index >= ``threshold``. For Lambda
    maps ``table`` holds fibre terms. Values not listed are labelled Star.
    """

    kind: str
    table: dict
    families: dict = field(default_factory=dict)
    threshold: int = 0
    limit_value: object = None

    def label(self, v):
        if v in self.table:
            return self.table[v]
        for key, lab in self.families.items():
            idx = key_index(key, v)
            if idx is not None and idx >= self.threshold:
                return lab
        return STAR

    def as_dict(self):
        from .parser import format_value

        values = sorted(self.table, key=value_sort_key)
        if self.kind == LAMBDA:
            rows = [{"value": format_value(v), "label": canonical_form(self.table[v]).as_dict()}
                    for v in values]
        else:
            rows = [{"value": format_value(v), "label": self.table[v].as_list()} for v in values]
        fams = [{"key": list(map(str, key)), "fromIndex": self.threshold, "label": lab.as_list()}
                for key, lab in self.families.items()]
        return {"kind": self.kind, "table": rows, "families": fams, "default": STAR.as_list()}


@dataclass
class LabelTau:
    """An injection of images found by label_leq."""

    table: dict
    keymap: dict = field(default_factory=dict)
    kind: str = GAMMA


# ============================================================
# Label maps
# ============================================================
def gamma_label(f):
    if f.domain != Lim(Pt()):
        raise UnsupportedDomain(f"gamma labels need domain lim(pt), got {f.domain}")
    if not is_continuous(f):
        raise NotContinuous("gamma labels need a continuous function")
    F = FnShape(f)
    comp = F.comps[0]
    u = comp.inf
    table = {}
    for q in F.special:
        size = len(F.iso.get(q, []))
        if q == u:
            size = INF if not comp.approach else size + 1
        table[q] = LabelL(0 if q == u else 1, size)
    families = {comp.fam.key: LabelL(1, 1)} if comp.approach else {}
    return LabelMap(GAMMA, table, families, F.K, u)


def lambda_label(f):
    if not is_locally_constant(f):
        raise NotLocallyConstant("lambda labels need a finite image with clopen fibres")
    prof = profile(f)
    return LabelMap(LAMBDA, {v: prof.fiber_term(v) for v in prof.values()})


# ============================================================
# Comparison
# ============================================================
def _inject(sources, targets, fits):
    """Injective assignment of sources to targets respecting ``fits``, or None."""
    graph = nx.Graph()
    left = [("src", i) for i in range(len(sources))]
    right = [("dst", j) for j in range(len(targets))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    for i, q in enumerate(sources):
        for j, v in enumerate(targets):
            if fits(q, v):
                graph.add_edge(("src", i), ("dst", j))
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    if any(node not in matching for node in left):
        return None
    return {q: targets[matching[("src", i)][1]] for i, q in enumerate(sources)}


def _leq_lambda(L1, L2):
    src = sorted(L1.table, key=value_sort_key)
    dst = sorted(L2.table, key=value_sort_key)
    table = _inject(src, dst, lambda q, v: bool(space_embeds(L1.table[q], L2.table[v])))
    if table is None:
        return no(LABEL_ORDER, "no injection raising every fibre label")
    return yes(LabelTau(table, kind=LAMBDA))


def _leq_gamma(L1, L2):
    if L1.families and not L2.families:
        return no(IMAGE_CARDINALITY, "infinite image into a finite image")
    u1, u2 = L1.limit_value, L2.limit_value
    if not label_order(L1.table[u1], L2.table[u2]):
        return no(LABEL_ORDER, f"limit label {L1.table[u1].as_list()} exceeds "
                               f"{L2.table[u2].as_list()}")
    keymap = {}
    if L1.families:
        keymap = {next(iter(L1.families)): next(iter(L2.families))}
    rest = sorted((q for q in L1.table if q != u1), key=value_sort_key)
    targets = sorted((v for v in L2.table if v != u2), key=value_sort_key)
    if L2.families:
        key = next(iter(L2.families))
        targets += [key_value(key, L2.threshold + 2 * j) for j in range(len(rest))]
    table = _inject(rest, targets, lambda q, v: label_order(L1.table[q], L2.label(v)))
    if table is None:
        return no(LABEL_ORDER, "no injection raising every label")
    table[u1] = u2
    return yes(LabelTau(table, keymap, GAMMA))


def label_leq(L1, L2):
    """Decide whether some injection of images raises every label."""
    if L1.kind != L2.kind:
        return no(LABEL_KIND, f"cannot compare {L1.kind} with {L2.kind} labels")
    verdict = _leq_lambda(L1, L2) if L1.kind == LAMBDA else _leq_gamma(L1, L2)
    logger.debug("label_leq(%s): %s", L1.kind, verdict.yes)
    return verdict


# ============================================================
# Witnesses from labels
# ============================================================
def witness_from_labels(f, g, tau):
    """Build the fibre-by-fibre embedding of f into g along a label-raising tau."""
    if isinstance(tau, dict):
        kind = LAMBDA if is_locally_constant(f) and is_locally_constant(g) else GAMMA
        tau = LabelTau(tau, kind=kind)
    if tau.kind == GAMMA:
        return _gamma_witness(f, g, tau)
    return _lambda_witness(f, g, tau)


def _lambda_witness(f, g, tau):
    if not (is_locally_constant(f) and is_locally_constant(g)):
        raise LabelMismatch("lambda witnesses need locally constant functions")
    pf, pg = profile(f), profile(g)
    maps = {}
    for q in pf.values():
        if q not in tau.table or tau.table[q] not in pg.special:
            raise LabelMismatch(f"tau does not send {q!r} into the image of g")
        verdict = space_embeds(pf.fiber_term(q), pg.fiber_term(tau.table[q]))
        if not verdict:
            raise LabelMismatch(f"fibre over {q!r} does not embed into the fibre over "
                                f"{tau.table[q]!r}")
        maps[q] = verdict.witness
    return fibre_witness(f, g, pf, pg, tau.table, maps)


def _gamma_witness(f, g, tau):
    L1, L2 = gamma_label(f), gamma_label(g)
    F, G = FnShape(f), FnShape(g)
    pools = {}
    for q in L1.table:
        if q not in tau.table:
            raise LabelMismatch(f"tau misses image value {q!r}")
        v = tau.table[q]
        if not label_order(L1.table[q], L2.label(v)):
            raise LabelMismatch(f"label of {q!r} is not raised at {v!r}")
        hit = G.generic_key(v)
        if hit is not None:
            key, m = hit
            if (m - G.K) % 2:
                raise LabelMismatch(f"{v!r} collides with the family rule")
            pools[v] = hit
    if len(set(tau.table.values())) != len(tau.table):
        raise LabelMismatch("tau is not injective")
    if F.keys and not tau.keymap:
        raise LabelMismatch("tau has no rule for the approach family")
    plan = Plan({0: 0}, dict(tau.keymap), dict(tau.table), {}, {}, pools)
    return class_d_witness(f, g, F, G, plan)
