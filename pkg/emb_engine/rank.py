"""
Difference-hierarchy ranks of sets and functions at the level of closed sets.

A set A has rank lambda when A = union over even eta < lambda of
F_eta minus F_(eta+1) for a decreasing chain of closed sets, F_eta empty from
lambda on. The separation rank of (A, B) is the least rank of a set C with
A <= C and C disjoint from B; the rank of a function with finite image is the
largest separation rank between two of its fibres.
"""

import itertools
import logging
from dataclasses import dataclass, field

from . import settings
from .errors import BoundExceeded, NotDisjoint, UnsupportedDomain, UnsupportedFn
from .fn_embed import FnEmbWitness
from .fn_rep import FnRep, FnSum, W, image_is_infinite
from .set_rep import (
    Alt,
    SetFin,
    SetLim,
    SetPt,
    SetSum,
    closure,
    complement,
    fiber_set,
    image_values,
    indicator_node,
    intersect,
    is_empty,
    normalize,
)
from .space_embed import PATTERN, SpaceEmbWitness
from .space_term import Branch, Sum, format_address, is_compact, is_valid_address, lim_power

logger = logging.getLogger(__name__)


# ============================================================
# Derivative chains
# ============================================================
def set_closure(s):
    return closure(s)


def separation_chain(a, b):
    """
    Greedy chain F_0 = cl(A), F_(k+1) = cl(F_k meet (B if k even else A)).

    Its length is the separation rank of (A, B).
    """
    if not is_empty(intersect(a, b)):
        raise NotDisjoint("sets to separate must be disjoint")
    chain = []
    current = closure(a)
    while not is_empty(current):
        chain.append(current)
        side = b if len(chain) % 2 else a
        current = closure(intersect(current, side))
    return chain


def sep_rank(a, b):
    rank = len(separation_chain(a, b))
    logger.debug("sep_rank = %d", rank)
    return rank


def rank_delta2(a):
    return sep_rank(a, complement(a))


def difference_chain(a):
    return separation_chain(a, complement(a))


# ============================================================
# Exhaustive oracle over point classes
# ============================================================
@dataclass
class PointClass:
    """
    Points that every given set treats alike.

    ``members`` holds one membership flag per set; ``limits`` lists the
    top-point classes that sequences drawn from this class converge to.
    """

    members: tuple
    limits: tuple = ()


@dataclass
class ClassModel:
    classes: list = field(default_factory=list)

    def add(self, members, limits):
        self.classes.append(PointClass(tuple(members), tuple(limits)))
        return len(self.classes) - 1


def _tail_groups(nodes):
    """Representative copies past every exception table: even/odd, or one uniform copy."""
    cut = max(s.threshold for s in nodes)
    if any(isinstance(s.tail, Alt) for s in nodes):
        return cut, [[s.copy_at(2 * cut) for s in nodes], [s.copy_at(2 * cut + 1) for s in nodes]]
    return cut, [[s.tail for s in nodes]]


def _build(model, nodes, limits):
    head = nodes[0]
    if isinstance(head, SetPt):
        model.add([s.member for s in nodes], limits)
    elif isinstance(head, SetFin):
        for i in range(len(head.members)):
            model.add([s.members[i] for s in nodes], limits)
    elif isinstance(head, SetSum):
        for i in range(len(head.parts)):
            _build(model, [s.parts[i] for s in nodes], limits)
    elif isinstance(head, SetLim):
        top = model.add([s.inf for s in nodes], limits)
        cut, groups = _tail_groups(nodes)
        for n in range(cut):
            _build(model, [s.copy_at(n) for s in nodes], limits)
        for group in groups:
            _build(model, group, limits + (top,))
    else:
        raise UnsupportedDomain(f"no point classes for {type(head).__name__}")


def _assemble(nodes, keep, ids):
    """Set laid out like ``nodes`` holding the classes ``keep`` selects, in _build order."""
    head = nodes[0]
    if isinstance(head, SetPt):
        return SetPt(keep(next(ids)))
    if isinstance(head, SetFin):
        return SetFin(tuple(keep(next(ids)) for _ in head.members))
    if isinstance(head, SetSum):
        return SetSum(tuple(_assemble([s.parts[i] for s in nodes], keep, ids)
                            for i in range(len(head.parts))))
    inf = keep(next(ids))
    cut, groups = _tail_groups(nodes)
    exc = tuple((n, _assemble([s.copy_at(n) for s in nodes], keep, ids)) for n in range(cut))
    parts = [_assemble(group, keep, ids) for group in groups]
    tail = Alt(*parts) if len(parts) == 2 else parts[0]
    return SetLim(inf, exc, tail)


def class_model(*sets):
    """Finite quotient of the space refined by every set given."""
    model = ClassModel()
    _build(model, list(sets), ())
    limit = settings.oracle_class_limit()
    if len(model.classes) > limit:
        raise BoundExceeded(f"{len(model.classes)} point classes exceed the oracle limit {limit}")
    return model


def _height_search(model, allowed, length):
    """An upper semicontinuous class height function below ``length``, or None."""
    classes = model.classes
    order = sorted(range(len(classes)), key=lambda c: len(classes[c].limits))
    heights = {}

    def go(pos):
        if pos == len(order):
            return dict(heights)
        c = order[pos]
        for h in allowed(c, length):
            if all(h <= heights[i] for i in classes[c].limits):
                heights[c] = h
                found = go(pos + 1)
                if found is not None:
                    return found
                del heights[c]
        return None

    return go(0)


def _oracle(model, must_in, must_out):
    def allowed(c, length):
        values = range(-1, length)
        if must_in(c):
            return [h for h in values if h >= 0 and h % 2 == 0]
        if must_out(c):
            return [h for h in values if h < 0 or h % 2 == 1]
        return list(values)

    for length in range(2 * len(model.classes) + 2):
        if _height_search(model, allowed, length) is not None:
            return length
    raise BoundExceeded("no height function found")


def rank_oracle(a):
    """rank_delta2 by exhaustive search over class height functions."""
    model = class_model(a)
    classes = model.classes
    return _oracle(model, lambda c: classes[c].members[0], lambda c: not classes[c].members[0])


def sep_rank_oracle(a, b):
    if not is_empty(intersect(a, b)):
        raise NotDisjoint("sets to separate must be disjoint")
    model = class_model(a, b)
    classes = model.classes
    return _oracle(model, lambda c: classes[c].members[0], lambda c: classes[c].members[1])


def class_separators(a, b):
    """Every union of point classes containing A and missing B."""
    model = class_model(a, b)
    classes = model.classes
    free = [i for i, c in enumerate(classes) if not c.members[0] and not c.members[1]]
    for picks in itertools.product((False, True), repeat=len(free)):
        chosen = dict(zip(free, picks))
        yield normalize(_assemble([a, b], lambda i: classes[i].members[0] or chosen.get(i, False),
                                  itertools.count()))


# ============================================================
# Function rank
# ============================================================
def _check_rankable(f):
    if not is_compact(f.domain):
        raise UnsupportedFn(f"function ranks need a compact domain, got {f.domain}")
    if image_is_infinite(f):
        raise UnsupportedFn("function ranks need a finite image")


def fn_rank(f):
    """Largest sep_rank over ordered pairs of distinct fibres; 1 for constants."""
    _check_rankable(f)
    values = image_values(f)
    if len(values) < 2:
        return 1
    fibres = {v: fiber_set(f, v) for v in values}
    rank = max(sep_rank(fibres[y1], fibres[y2])
               for y1, y2 in itertools.permutations(values, 2))
    logger.info("fn_rank over %d values: %d", len(values), rank)
    return rank


# ============================================================
# Unbounded witnesses and escalation
# ============================================================
def high_rank_witness(k):
    """
    Points of even CB level in the k-fold lim over pt.

    Returns (term, set). The ranks grow by one with every level.
    """
    bound = settings.witness_bound()
    if k < 1 or k > bound:
        raise BoundExceeded(f"witness level {k} outside 1..{bound}")
    s = SetPt(True)
    for level in range(1, k + 1):
        s = SetLim(level % 2 == 0, (), s)
    return lim_power(k), s


def _fresh_value(cod, taken):
    for v in (0, 1, W):
        if v != taken and cod.contains(v):
            return v
    raise UnsupportedFn(f"{cod} has no second value to escalate with")


def escalate(f):
    """
    A function on sum(dom f, lim^k(pt)) extending f with strictly larger rank.

    The new summand carries the indicator of the level-k witness, its
    complement sent to the second value.
    """
    rank = fn_rank(f)
    values = image_values(f)
    if len(values) > 2:
        raise UnsupportedFn("escalate needs a function with at most two values")
    inside = values[0]
    outside = values[1] if len(values) == 2 else _fresh_value(f.codomain, inside)
    for k in range(1, settings.witness_bound() + 1):
        term, witness = high_rank_witness(k)
        if rank_delta2(witness) > rank:
            break
    else:
        raise BoundExceeded(f"no witness above rank {rank} within the configured bound")
    g = FnRep(Sum((f.domain, term)), f.codomain,
              FnSum((f.body, indicator_node(witness, inside, outside))))
    logger.info("escalate: rank %d, added lim^%d summand", rank, k)
    return g


def escalation_witness(f):
    """f embeds in escalate(f) by inclusion into the first summand."""
    at = (Branch(0),)
    sigma = SpaceEmbWitness(PATTERN, lambda a: at + tuple(a),
                            {"rule": "inclusion", "at": format_address(at)}, 0,
                            lambda a: is_valid_address(f.domain, a))
    return FnEmbWitness(sigma, lambda v: v, {"rule": "identity"})
