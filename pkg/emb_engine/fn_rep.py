"""
Finitely described functions from term spaces into countable codomains.

A function is stored as a tree matching its domain term. Below a ``lim`` node
the copies past the exception table follow the tail rule: one constant, an
injective approach sequence indexed by the copy number, or a periodic pair of
nodes alternating by copy parity.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .errors import BadAddress, NotContinuous, TermError, UnknownEmbedding, UnsupportedDomain
from .space_term import (
    HERE,
    INF,
    Branch,
    Copy,
    Fin,
    Idx,
    InfPoint,
    Lim,
    Omega,
    PairsPlus,
    Pt,
    Sum,
    make_sum,
    validate_address,
)

logger = logging.getLogger(__name__)


# ============================================================
# Values and codomains
# ============================================================
class OmegaValue:
    """The top point of omega+1, printed as ``w``."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "w"

    def __reduce__(self):
        return (OmegaValue, ())


W = OmegaValue()


def value_sort_key(v):
    if v is W:
        return (1, 0)
    return (0, Fraction(v))


@dataclass(frozen=True)
class OmegaPlusOneCod:
    def contains(self, v):
        return v is W or (isinstance(v, int) and not isinstance(v, bool) and v >= 0)


@dataclass(frozen=True)
class RationalsCod:
    def contains(self, v):
        return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True)
class FinCod:
    k: int

    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and 0 <= v < self.k


@dataclass(frozen=True)
class NatCod:
    def contains(self, v):
        return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def normalize_value(cod, v):
    if isinstance(cod, RationalsCod) and isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def check_value(cod, v):
    if not cod.contains(v):
        raise TermError(f"value {v!r} is not in codomain {cod}")
    return normalize_value(cod, v)


# ============================================================
# Tails
# ============================================================
@dataclass(frozen=True)
class ApproachDesc:
    """
    Injective sequence indexed by copy number n.

    omega+1 and nat: base + n. Rationals: limit + sign * 2^-(n + base).
    """

    base: int = 0
    sign: int = -1
    limit: object = None

    def index(self, n):
        return n + self.base


@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class Approach:
    desc: ApproachDesc


@dataclass(frozen=True)
class Periodic:
    """Tail copies of a lim node carry ``even`` or ``odd`` by copy parity."""

    even: object
    odd: object

    def at(self, n):
        return self.even if n % 2 == 0 else self.odd


def family_key(cod, desc):
    """Key of the value sequence an approach tail runs through."""
    if isinstance(cod, OmegaPlusOneCod):
        return ("w",)
    if isinstance(cod, RationalsCod):
        return ("q", Fraction(desc.limit), desc.sign)
    if isinstance(cod, NatCod):
        return ("n",)
    raise TermError(f"approach tails are not available in {cod}")


def key_limit(key):
    """Limit of the values of a key, or None when they do not converge."""
    if key[0] == "w":
        return W
    if key[0] == "q":
        return normalize_value(RationalsCod(), key[1])
    return None


def key_value(key, k):
    """Value with index k on a key."""
    if key[0] in ("w", "n"):
        return k
    return normalize_value(RationalsCod(), key[1] + key[2] * Fraction(1, 2 ** k))


def key_index(key, v):
    """Index of v on the key, or None when v is not on it."""
    if v is W:
        return None
    if key[0] in ("w", "n"):
        return v if isinstance(v, int) and v >= 0 else None
    diff = (Fraction(v) - key[1]) * key[2]
    if diff <= 0 or diff.numerator != 1:
        return None
    k = diff.denominator.bit_length() - 1
    return k if 2 ** k == diff.denominator else None


def tail_value(cod, tail, n):
    if isinstance(tail, Const):
        return tail.value
    return key_value(family_key(cod, tail.desc), tail.desc.index(n))


def tail_limit(cod, tail):
    """Value the tail converges to, or None."""
    if isinstance(tail, Const):
        return tail.value
    if isinstance(tail, Periodic):
        return None
    return key_limit(family_key(cod, tail.desc))


def tail_node(t, cod, tail, n):
    """Function node carried by tail copy n of a lim node with child term t."""
    if isinstance(tail, Periodic):
        return tail.at(n)
    return constant_node(t, tail_value(cod, tail, n))


def constant_value(node):
    """The single value of a constant node, or None."""
    if isinstance(node, FnPt):
        return node.value
    if isinstance(node, FnFin):
        vals = set(node.values)
    elif isinstance(node, FnOmega):
        if not isinstance(node.tail, Const):
            return None
        vals = {v for _, v in node.exc} | {node.tail.value}
    elif isinstance(node, FnLim):
        if not isinstance(node.tail, Const):
            return None
        vals = {constant_value(sub) for _, sub in node.exc} | {node.tail.value, node.inf}
    elif isinstance(node, FnSum):
        vals = {constant_value(p) for p in node.parts}
    else:
        return None
    if len(vals) != 1 or None in vals:
        return None
    return vals.pop()


# ============================================================
# Function nodes
# ============================================================
@dataclass(frozen=True)
class FnPt:
    value: object


@dataclass(frozen=True)
class FnFin:
    values: tuple


@dataclass(frozen=True)
class FnOmega:
    exc: tuple = ()
    tail: object = None

    @property
    def threshold(self):
        return 1 + max((i for i, _ in self.exc), default=-1)


@dataclass(frozen=True)
class FnLim:
    inf: object
    exc: tuple = ()
    tail: object = None

    @property
    def threshold(self):
        return 1 + max((n for n, _ in self.exc), default=-1)


@dataclass(frozen=True)
class FnSum:
    parts: tuple


def _check_tail(cod, tail, child=None):
    if isinstance(tail, Periodic):
        if child is None:
            raise TermError("periodic tails need a lim node")
        even = _check_node(child, tail.even, cod)
        odd = _check_node(child, tail.odd, cod)
        v = constant_value(even)
        if v is not None and constant_value(odd) == v:
            return Const(v)
        return Periodic(even, odd)
    if isinstance(tail, Const):
        return Const(check_value(cod, tail.value))
    if isinstance(tail, Approach):
        d = tail.desc
        if isinstance(cod, FinCod):
            raise TermError("approach tails need an infinite codomain")
        if d.sign not in (-1, 1) or d.base < 0:
            raise TermError(f"bad approach parameters {d}")
        if isinstance(cod, RationalsCod):
            if d.limit is None:
                raise TermError("approach tails in Q need a limit")
            return Approach(ApproachDesc(d.base, d.sign, check_value(cod, d.limit)))
        if isinstance(cod, OmegaPlusOneCod):
            return Approach(ApproachDesc(d.base, -1, W))
        return Approach(ApproachDesc(d.base, -1, None))
    raise TermError(f"missing or unknown tail {tail!r}")


def _check_node(t, node, cod):
    if isinstance(t, Pt) and isinstance(node, FnPt):
        return FnPt(check_value(cod, node.value))
    if isinstance(t, Fin) and isinstance(node, FnFin):
        if len(node.values) != t.n:
            raise TermError(f"fin({t.n}) needs {t.n} values, got {len(node.values)}")
        return FnFin(tuple(check_value(cod, v) for v in node.values))
    if isinstance(t, Omega) and isinstance(node, FnOmega):
        exc = tuple(sorted((int(i), check_value(cod, v)) for i, v in node.exc))
        if len({i for i, _ in exc}) != len(exc):
            raise TermError("duplicate exception index")
        tail = _check_tail(cod, node.tail)
        given = dict(exc)
        exc = tuple((i, given[i] if i in given else tail_value(cod, tail, i))
                    for i in range(1 + max(given, default=-1)))
        return FnOmega(exc, tail)
    if isinstance(t, Lim) and isinstance(node, FnLim):
        exc = tuple(sorted(((int(n), _check_node(t.t, sub, cod)) for n, sub in node.exc),
                           key=lambda e: e[0]))
        if len({n for n, _ in exc}) != len(exc):
            raise TermError("duplicate exception copy")
        tail = _check_tail(cod, node.tail, t.t)
        given = dict(exc)
        exc = tuple((n, given[n] if n in given else tail_node(t.t, cod, tail, n))
                    for n in range(1 + max(given, default=-1)))
        return FnLim(check_value(cod, node.inf), exc, tail)
    if isinstance(t, Sum) and isinstance(node, FnSum):
        if len(node.parts) != len(t.ts):
            raise TermError(f"sum has {len(t.ts)} parts, function gives {len(node.parts)}")
        return FnSum(tuple(_check_node(s, p, cod) for s, p in zip(t.ts, node.parts)))
    if isinstance(t, PairsPlus):
        raise UnsupportedDomain("functions over pairs+ have no finite representation here")
    raise TermError(f"function node {type(node).__name__} does not match term {t}")


@dataclass(frozen=True)
class FnRep:
    domain: object
    codomain: object
    body: object = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "body", _check_node(self.domain, self.body, self.codomain))


def constant_node(t, v):
    if isinstance(t, Pt):
        return FnPt(v)
    if isinstance(t, Fin):
        return FnFin((v,) * t.n)
    if isinstance(t, Omega):
        return FnOmega((), Const(v))
    if isinstance(t, Lim):
        return FnLim(v, (), Const(v))
    if isinstance(t, Sum):
        return FnSum(tuple(constant_node(s, v) for s in t.ts))
    raise UnsupportedDomain(f"no constant function node over {t}")


def constant_fn(domain, cod, v):
    return FnRep(domain, cod, constant_node(domain, v))


def d0():
    """Characteristic function of the limit point of omega+1."""
    return FnRep(Lim(Pt()), FinCod(2), FnLim(1, (), Const(0)))


def d1():
    """d1(inf) = 0 and d1(n) = n + 1, into the discrete naturals."""
    return FnRep(Lim(Pt()), NatCod(), FnLim(0, (), Approach(ApproachDesc(base=1))))


# ============================================================
# Evaluation
# ============================================================
def evaluate_node(t, node, cod, a):
    if not a:
        return node.value
    step, rest = a[0], a[1:]
    if isinstance(node, FnFin):
        return node.values[step.i]
    if isinstance(node, FnOmega):
        exc = dict(node.exc)
        if step.i in exc:
            return exc[step.i]
        return tail_value(cod, node.tail, step.i)
    if isinstance(node, FnSum):
        return evaluate_node(t.ts[step.i], node.parts[step.i], cod, rest)
    if isinstance(node, FnLim):
        if isinstance(step, InfPoint):
            return node.inf
        exc = dict(node.exc)
        if step.n in exc:
            return evaluate_node(t.t, exc[step.n], cod, rest)
        if isinstance(node.tail, Periodic):
            return evaluate_node(t.t, node.tail.at(step.n), cod, rest)
        return tail_value(cod, node.tail, step.n)
    raise BadAddress(f"cannot evaluate at {a}")


@dataclass(frozen=True, eq=False)
class FnOracle:
    """
    A function given by an evaluation rule instead of a finite tree.

    ``rule`` maps a validated address to a value; ``description`` says how the
    rule is built and goes into reports as is.
    """

    domain: object
    codomain: object
    rule: Callable
    description: dict = field(default_factory=dict)


def evaluate(f, a):
    """Value of f at the point a."""
    a = validate_address(f.domain, a)
    if isinstance(f, FnOracle):
        return f.rule(a)
    return evaluate_node(f.domain, f.body, f.codomain, a)


# ============================================================
# Continuity
# ============================================================
@dataclass(frozen=True)
class ContinuityResult:
    continuous: bool
    path: tuple = None
    inf_value: object = None
    tail: object = None


CONTINUOUS = ContinuityResult(True)


def _first_break(t, node, cod, prefix):
    if isinstance(node, FnSum):
        for i, (s, p) in enumerate(zip(t.ts, node.parts)):
            hit = _first_break(s, p, cod, prefix + (Branch(i),))
            if hit is not None:
                return hit
        return None
    if not isinstance(node, FnLim):
        return None
    if tail_limit(cod, node.tail) != node.inf:
        return ContinuityResult(False, prefix, node.inf, node.tail)
    for n, sub in node.exc:
        hit = _first_break(t.t, sub, cod, prefix + (Copy(n),))
        if hit is not None:
            return hit
    return None


def continuity_check(f):
    """CONTINUOUS, or the first lim node (pre-order) whose tail misses its limit value."""
    hit = _first_break(f.domain, f.body, f.codomain, HERE)
    return CONTINUOUS if hit is None else hit


def is_continuous(f):
    return continuity_check(f).continuous


def has_approach(node):
    if isinstance(node, (FnOmega, FnLim)):
        if isinstance(node.tail, Approach):
            return True
        if isinstance(node.tail, Periodic):
            return has_approach(node.tail.even) or has_approach(node.tail.odd)
        if isinstance(node, FnLim):
            return any(has_approach(sub) for _, sub in node.exc)
        return False
    if isinstance(node, FnSum):
        return any(has_approach(p) for p in node.parts)
    return False


def is_locally_constant(f):
    """Continuous with finite image, so every fibre is clopen."""
    return is_continuous(f) and not has_approach(f.body)


# ============================================================
# Fibres and image profile
# ============================================================
@dataclass
class Piece:
    """
    A subspace on which f is constant.

    ``mode`` says how the piece sits in the domain: a single point, a whole
    copy, the tail of a node shifted by ``start`` (with its top point when
    the node is a lim), or the off-limit copies of a lim(pt) node seen as
    a discrete omega.
    """

    term: object
    value: object
    at: tuple
    mode: str = "point"
    start: int = 0

    def embed(self, b):
        b = tuple(b)
        if self.mode == "point":
            return self.at
        if self.mode == "copy":
            return self.at + b
        step = b[0]
        if isinstance(step, InfPoint):
            return self.at + b
        if isinstance(step, Idx):
            if self.mode == "discrete":
                return self.at + (Copy(self.start + step.i),)
            return self.at + (Idx(self.start + step.i),)
        return self.at + (Copy(self.start + step.n),) + b[1:]

    def local(self, a):
        """Address inside the piece of the domain point a, or None."""
        a = tuple(a)
        cut = len(self.at)
        if self.mode == "point":
            return HERE if a == self.at else None
        if a[:cut] != self.at:
            return None
        if self.mode == "copy":
            return a[cut:]
        if len(a) == cut:
            return None
        step = a[cut]
        if isinstance(step, InfPoint):
            return (step,) if self.mode == "shift" else None
        if isinstance(step, Idx) and step.i >= self.start:
            return (Idx(step.i - self.start),)
        if isinstance(step, Copy) and step.n >= self.start:
            if self.mode == "discrete":
                return (Idx(step.n - self.start),)
            return (Copy(step.n - self.start),) + a[cut + 1:]
        return None


@dataclass
class Family:
    """An approach tail: copy n >= start carries value key_value(key, n + base)."""

    key: tuple
    base: int
    start: int
    term: object
    prefix: tuple
    omega: bool

    def point(self, n, sub=HERE):
        step = Idx(n) if self.omega else Copy(n)
        return self.prefix + (step,) + tuple(sub)


def decompose(f):
    """
    Split the domain into constant pieces and approach families.

    Needs every const tail to agree with its lim value, except over lim(pt)
    where the off-limit copies form a discrete piece.
    """
    pieces, families = [], []
    cod = f.codomain

    def walk(t, node, prefix):
        if isinstance(node, FnPt):
            pieces.append(Piece(Pt(), node.value, prefix))
        elif isinstance(node, FnFin):
            for i, v in enumerate(node.values):
                pieces.append(Piece(Pt(), v, prefix + (Idx(i),)))
        elif isinstance(node, FnSum):
            for i, (s, p) in enumerate(zip(t.ts, node.parts)):
                walk(s, p, prefix + (Branch(i),))
        elif isinstance(node, FnOmega):
            for i, v in node.exc:
                pieces.append(Piece(Pt(), v, prefix + (Idx(i),)))
            start = node.threshold
            if isinstance(node.tail, Const):
                pieces.append(Piece(Omega(), node.tail.value, prefix, "shift", start))
            else:
                d = node.tail.desc
                families.append(Family(family_key(cod, d), d.base, start, Pt(), prefix, True))
        elif isinstance(node, FnLim):
            for n, sub in node.exc:
                walk(t.t, sub, prefix + (Copy(n),))
            start = node.threshold
            if isinstance(node.tail, Const) and node.tail.value == node.inf:
                pieces.append(Piece(t, node.inf, prefix, "shift", start))
                return
            if isinstance(node.tail, Periodic):
                raise NotContinuous(f"periodic tail below {t}")
            pieces.append(Piece(Pt(), node.inf, prefix + (InfPoint(),)))
            if isinstance(node.tail, Const):
                if not isinstance(t.t, Pt):
                    raise NotContinuous(f"discontinuous const tail below {t}")
                pieces.append(Piece(Omega(), node.tail.value, prefix, "discrete", start))
            else:
                d = node.tail.desc
                families.append(Family(family_key(cod, d), d.base, start, t.t, prefix, False))

    walk(f.domain, f.body, HERE)
    return pieces, families


def term_size(t):
    if isinstance(t, Pt):
        return 1
    if isinstance(t, Fin):
        return t.n
    if isinstance(t, Sum):
        return sum(term_size(s) for s in t.ts)
    return INF


@dataclass
class ImageProfile:
    """
    Image of f with fibres.

    ``special`` maps finitely many values to their fibre pieces. For every key
    in ``generic`` all values with index >= threshold share the same fibre,
    made of one copy of each family piece on that key.
    """

    codomain: object
    special: dict
    generic: dict
    pieces: list
    families: list

    def values(self):
        return sorted(self.special, key=value_sort_key)

    def fiber_term(self, v):
        return make_sum([p.term for p in self.special[v]])

    def fiber_size(self, v):
        return term_size(self.fiber_term(v))

    def generic_term(self, key):
        return make_sum([fam.term for fam in self.generic[key]["families"]])

    def is_finite(self):
        return not self.generic

    def to_fiber(self, v, a):
        """Address inside fiber_term(v) of the domain point a."""
        pieces = self.special[v]
        for i, p in enumerate(pieces):
            b = p.local(a)
            if b is not None:
                return b if len(pieces) == 1 else (Branch(i),) + b
        raise BadAddress(f"point {a} is not in the fibre over {v!r}")

    def from_fiber(self, v, b):
        """Domain point named by the address b inside fiber_term(v)."""
        pieces = self.special[v]
        if len(pieces) == 1:
            return pieces[0].embed(b)
        return pieces[b[0].i].embed(b[1:])

    def as_dict(self):
        from .parser import format_term, format_value

        return {
            "special": [
                {"value": format_value(v), "fiberSize": _size_str(self.fiber_size(v)),
                 "fiber": format_term(self.fiber_term(v))}
                for v in self.values()
            ],
            "families": [
                {"key": _key_str(key), "limit": format_value(key_limit(key)),
                 "fromIndex": g["threshold"], "fiber": format_term(self.generic_term(key))}
                for key, g in sorted(self.generic.items(), key=lambda kv: _key_str(kv[0]))
            ],
        }


def _size_str(n):
    return "aleph0" if n == INF else n


def _key_str(key):
    if key[0] == "q":
        return f"q({key[1]},{'+' if key[2] > 0 else '-'})"
    return key[0]


def profile(f):
    """Image profile without the continuity precondition (lim(pt) breaks allowed)."""
    pieces, families = decompose(f)
    special = {}
    for p in pieces:
        special.setdefault(p.value, []).append(p)

    generic = {}
    for fam in families:
        generic.setdefault(fam.key, {"families": [], "threshold": 0})["families"].append(fam)
    for key, g in generic.items():
        k = max(fam.start + fam.base for fam in g["families"])
        for v in special:
            idx = key_index(key, v)
            if idx is not None:
                k = max(k, idx + 1)
        g["threshold"] = k
        for fam in g["families"]:
            for n in range(fam.start, k - fam.base):
                v = key_value(key, n + fam.base)
                special.setdefault(v, []).append(
                    Piece(fam.term, v, fam.point(n), "copy")
                )
    return ImageProfile(f.codomain, special, generic, pieces, families)


def image_profile(f):
    if not is_continuous(f):
        raise NotContinuous("image_profile needs a continuous function")
    return profile(f)


def image_is_infinite(f):
    return has_approach(f.body)


# ============================================================
# Postcomposition with canonical codomain embeddings
# ============================================================
def _dyadic(v):
    return W if v is W else v


def _omega_to_q(v):
    return 0 if v is W else -Fraction(1, 2 ** v)


CANONICAL_EMBEDDINGS = {
    "omega+1->Q": (OmegaPlusOneCod, lambda cod: RationalsCod(), _omega_to_q),
    "fin->omega+1": (FinCod, lambda cod: OmegaPlusOneCod(), lambda v: v),
    "nat->Q": (NatCod, lambda cod: RationalsCod(), _omega_to_q),
}


def postcompose(j, f):
    """FnRep of j after f for one of the shipped codomain embeddings."""
    if j not in CANONICAL_EMBEDDINGS:
        raise UnknownEmbedding(f"unknown codomain embedding {j!r}")
    src_cls, target, fn = CANONICAL_EMBEDDINGS[j]
    if not isinstance(f.codomain, src_cls):
        raise UnknownEmbedding(f"{j} does not start at {f.codomain}")
    cod = target(f.codomain)

    def tail(tl):
        if isinstance(tl, Const):
            return Const(fn(tl.value))
        if isinstance(tl, Periodic):
            return Periodic(walk(tl.even), walk(tl.odd))
        return Approach(ApproachDesc(tl.desc.base, -1, 0))

    def walk(node):
        if isinstance(node, FnPt):
            return FnPt(fn(node.value))
        if isinstance(node, FnFin):
            return FnFin(tuple(fn(v) for v in node.values))
        if isinstance(node, FnOmega):
            return FnOmega(tuple((i, fn(v)) for i, v in node.exc), tail(node.tail))
        if isinstance(node, FnLim):
            return FnLim(fn(node.inf), tuple((n, walk(s)) for n, s in node.exc), tail(node.tail))
        return FnSum(tuple(walk(p) for p in node.parts))

    return FnRep(f.domain, cod, walk(f.body))


def closeness(cod, v, c):
    """How close v is to c: larger means closer, INF when equal."""
    if v == c:
        return INF
    if isinstance(cod, OmegaPlusOneCod):
        if c is W:
            return v
        return -1
    if isinstance(cod, RationalsCod):
        return -math.log2(abs(Fraction(v) - Fraction(c)))
    return -1
