"""
Finitely described subsets of compact term spaces.

A set is a tree matching its term. Below a ``lim`` node the copies past the
exception table follow one rule, either uniform or alternating by copy
parity. Every operation returns the canonical form, so two sets are equal
exactly when their representations compare equal.
"""

import logging
from dataclasses import dataclass

from .errors import BadAddress, TermError, UnsupportedDomain
from .fn_rep import (
    FnFin,
    FnLim,
    FnOmega,
    FnPt,
    FnRep,
    FnSum,
    Periodic,
    image_is_infinite,
    tail_node,
    value_sort_key,
)
from .space_term import Fin, InfPoint, Lim, Pt, Sum, is_compact, validate_address

logger = logging.getLogger(__name__)


# ============================================================
# Set nodes
# ============================================================
@dataclass(frozen=True)
class SetPt:
    member: bool


@dataclass(frozen=True)
class SetFin:
    members: tuple


@dataclass(frozen=True)
class Alt:
    """Tail rule by absolute copy parity."""

    even: object
    odd: object

    def at(self, n):
        return self.even if n % 2 == 0 else self.odd


@dataclass(frozen=True)
class SetLim:
    inf: bool
    exc: tuple = ()
    tail: object = None

    @property
    def threshold(self):
        return 1 + max((n for n, _ in self.exc), default=-1)

    def copy_at(self, n):
        exc = dict(self.exc)
        if n in exc:
            return exc[n]
        return self.tail.at(n) if isinstance(self.tail, Alt) else self.tail


@dataclass(frozen=True)
class SetSum:
    parts: tuple


# ============================================================
# Canonical form
# ============================================================
def normalize(s):
    """Canonical form: equal alternatives merged, exceptions matching the tail dropped."""
    if isinstance(s, SetPt):
        return SetPt(bool(s.member))
    if isinstance(s, SetFin):
        return SetFin(tuple(bool(m) for m in s.members))
    if isinstance(s, SetSum):
        return SetSum(tuple(normalize(p) for p in s.parts))
    if isinstance(s, SetLim):
        tail = s.tail
        if isinstance(tail, Alt):
            even, odd = normalize(tail.even), normalize(tail.odd)
            tail = even if even == odd else Alt(even, odd)
        else:
            tail = normalize(tail)
        rule = SetLim(False, (), tail)
        exc = tuple((n, normalize(sub)) for n, sub in sorted(s.exc, key=lambda e: e[0]))
        exc = tuple((n, sub) for n, sub in exc if sub != rule.copy_at(n))
        return SetLim(bool(s.inf), exc, tail)
    raise TermError(f"unknown set node {s!r}")


def check_set(t, s):
    """Validate s against the term t and return its canonical form."""
    if not is_compact(t):
        raise UnsupportedDomain(f"sets are only described over compact terms, got {t}")
    _check(t, s)
    return normalize(s)


def _check(t, s):
    if isinstance(t, Pt) and isinstance(s, SetPt):
        return
    if isinstance(t, Fin) and isinstance(s, SetFin):
        if len(s.members) != t.n:
            raise TermError(f"fin({t.n}) needs {t.n} memberships, got {len(s.members)}")
        return
    if isinstance(t, Sum) and isinstance(s, SetSum):
        if len(s.parts) != len(t.ts):
            raise TermError(f"sum has {len(t.ts)} parts, set gives {len(s.parts)}")
        for sub, p in zip(t.ts, s.parts):
            _check(sub, p)
        return
    if isinstance(t, Lim) and isinstance(s, SetLim):
        if len({n for n, _ in s.exc}) != len(s.exc) or any(n < 0 for n, _ in s.exc):
            raise TermError("bad exception copies")
        for _, sub in s.exc:
            _check(t.t, sub)
        if isinstance(s.tail, Alt):
            _check(t.t, s.tail.even)
            _check(t.t, s.tail.odd)
        else:
            _check(t.t, s.tail)
        return
    raise TermError(f"set node {type(s).__name__} does not match term {t}")


def constant_set(t, member):
    if isinstance(t, Pt):
        return SetPt(member)
    if isinstance(t, Fin):
        return SetFin((member,) * t.n)
    if isinstance(t, Lim):
        return SetLim(member, (), constant_set(t.t, member))
    if isinstance(t, Sum):
        return SetSum(tuple(constant_set(s, member) for s in t.ts))
    raise UnsupportedDomain(f"no set over {t}")


# ============================================================
# Boolean algebra and closure
# ============================================================
def _map_tail(op, tail):
    if isinstance(tail, Alt):
        return Alt(op(tail.even), op(tail.odd))
    return op(tail)


def _map1(op, s):
    if isinstance(s, SetPt):
        return SetPt(op(s.member))
    if isinstance(s, SetFin):
        return SetFin(tuple(op(m) for m in s.members))
    if isinstance(s, SetSum):
        return SetSum(tuple(_map1(op, p) for p in s.parts))
    return SetLim(op(s.inf), tuple((n, _map1(op, sub)) for n, sub in s.exc),
                  _map_tail(lambda x: _map1(op, x), s.tail))


def _map2(op, a, b):
    if isinstance(a, SetPt):
        return SetPt(op(a.member, b.member))
    if isinstance(a, SetFin):
        return SetFin(tuple(op(x, y) for x, y in zip(a.members, b.members)))
    if isinstance(a, SetSum):
        return SetSum(tuple(_map2(op, x, y) for x, y in zip(a.parts, b.parts)))
    cut = max(a.threshold, b.threshold)
    exc = tuple((n, _map2(op, a.copy_at(n), b.copy_at(n))) for n in range(cut))
    if isinstance(a.tail, Alt) or isinstance(b.tail, Alt):
        # past cut both rules depend on parity only
        tail = Alt(_map2(op, a.copy_at(2 * cut), b.copy_at(2 * cut)),
                   _map2(op, a.copy_at(2 * cut + 1), b.copy_at(2 * cut + 1)))
    else:
        tail = _map2(op, a.tail, b.tail)
    return SetLim(op(a.inf, b.inf), exc, tail)


def complement(s):
    return normalize(_map1(lambda m: not m, s))


def intersect(a, b):
    return normalize(_map2(lambda x, y: x and y, a, b))


def union(a, b):
    return normalize(_map2(lambda x, y: x or y, a, b))


def difference(a, b):
    return intersect(a, complement(b))


def is_empty(s):
    if isinstance(s, SetPt):
        return not s.member
    if isinstance(s, SetFin):
        return not any(s.members)
    if isinstance(s, SetSum):
        return all(is_empty(p) for p in s.parts)
    if s.inf or not all(is_empty(sub) for _, sub in s.exc):
        return False
    if isinstance(s.tail, Alt):
        return is_empty(s.tail.even) and is_empty(s.tail.odd)
    return is_empty(s.tail)


def closure(s):
    """Topological closure; copies are clopen, so only top points gain membership."""
    if isinstance(s, (SetPt, SetFin)):
        return s
    if isinstance(s, SetSum):
        return SetSum(tuple(closure(p) for p in s.parts))
    tail = _map_tail(closure, s.tail)
    rules = (s.tail.even, s.tail.odd) if isinstance(s.tail, Alt) else (s.tail,)
    inf = s.inf or not all(is_empty(r) for r in rules)
    return normalize(SetLim(inf, tuple((n, closure(sub)) for n, sub in s.exc), tail))


def contains(t, s, a):
    """Membership of the point a of t in s."""
    a = validate_address(t, a)
    node = s
    for step in a:
        if isinstance(node, SetFin):
            return node.members[step.i]
        if isinstance(node, SetSum):
            node = node.parts[step.i]
        elif isinstance(node, SetLim):
            if isinstance(step, InfPoint):
                return node.inf
            node = node.copy_at(step.n)
        else:
            raise BadAddress(f"address {a} runs past the set tree")
    if isinstance(node, SetPt):
        return node.member
    raise BadAddress(f"address {a} does not end at a point")


# ============================================================
# Functions and sets
# ============================================================
def fiber_set(f, y):
    """The fibre of y under f as a set, for functions with finite image."""
    if not is_compact(f.domain):
        raise UnsupportedDomain("fibres as sets need a compact domain")
    if image_is_infinite(f):
        raise UnsupportedDomain("fibre sets need a finite image")

    def walk(t, node):
        if isinstance(node, FnPt):
            return SetPt(node.value == y)
        if isinstance(node, FnFin):
            return SetFin(tuple(v == y for v in node.values))
        if isinstance(node, FnSum):
            return SetSum(tuple(walk(s, p) for s, p in zip(t.ts, node.parts)))
        if isinstance(node, FnLim):
            exc = tuple((n, walk(t.t, sub)) for n, sub in node.exc)
            if isinstance(node.tail, Periodic):
                tail = Alt(walk(t.t, node.tail.even), walk(t.t, node.tail.odd))
            else:
                tail = walk(t.t, tail_node(t.t, f.codomain, node.tail, node.threshold))
            return SetLim(node.inf == y, exc, tail)
        raise UnsupportedDomain(f"no fibre set for {type(node).__name__}")

    return normalize(walk(f.domain, f.body))


def image_values(f):
    """Finite image of f, sorted."""
    seen = set()

    def walk(node):
        if isinstance(node, FnPt):
            seen.add(node.value)
        elif isinstance(node, FnFin):
            seen.update(node.values)
        elif isinstance(node, FnSum):
            for p in node.parts:
                walk(p)
        elif isinstance(node, FnOmega):
            seen.update(v for _, v in node.exc)
            seen.add(node.tail.value)
        else:
            seen.add(node.inf)
            for _, sub in node.exc:
                walk(sub)
            if isinstance(node.tail, Periodic):
                walk(node.tail.even)
                walk(node.tail.odd)
            else:
                seen.add(node.tail.value)

    walk(f.body)
    return sorted(seen, key=value_sort_key)


def indicator_node(s, inside, outside):
    """Function node taking ``inside`` on s and ``outside`` off it."""
    if isinstance(s, SetPt):
        return FnPt(inside if s.member else outside)
    if isinstance(s, SetFin):
        return FnFin(tuple(inside if m else outside for m in s.members))
    if isinstance(s, SetSum):
        return FnSum(tuple(indicator_node(p, inside, outside) for p in s.parts))
    exc = tuple((n, indicator_node(sub, inside, outside)) for n, sub in s.exc)
    if isinstance(s.tail, Alt):
        tail = Periodic(indicator_node(s.tail.even, inside, outside),
                        indicator_node(s.tail.odd, inside, outside))
    else:
        node = indicator_node(s.tail, inside, outside)
        tail = Periodic(node, node)
    return FnLim(inside if s.inf else outside, exc, tail)


def indicator(t, cod, s, inside=1, outside=0):
    return FnRep(t, cod, indicator_node(check_set(t, s), inside, outside))
