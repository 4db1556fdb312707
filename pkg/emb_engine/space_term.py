"""
Term representations of countable scattered spaces.

A term denotes a 0-dimensional Polish space built from single points, finite
and countable discrete sets, one-point compactifications of countably many
copies (``Lim``), finite sums and the pair space ``PairsPlus``. Points are
addressed by tuples of steps that follow the shape of the term.
"""

import logging
import math
from dataclasses import dataclass, field

import pandas as pd

from .errors import BadAddress, NotSingleLimit, TermError

logger = logging.getLogger(__name__)

INF = math.inf


# ============================================================
# Terms
# ============================================================
@dataclass(frozen=True)
class Pt:
    pass


@dataclass(frozen=True)
class Fin:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise TermError(f"fin arity must be a positive integer, got {self.n!r}")


@dataclass(frozen=True)
class Omega:
    pass


@dataclass(frozen=True)
class Lim:
    t: object

    def __post_init__(self):
        if not is_compact(self.t):
            raise TermError(f"lim needs a compact argument, got {self.t}")


@dataclass(frozen=True)
class Sum:
    ts: tuple

    def __post_init__(self):
        object.__setattr__(self, "ts", tuple(self.ts))
        if len(self.ts) < 2:
            raise TermError("sum needs at least two summands")


@dataclass(frozen=True)
class PairsPlus:
    pass


@dataclass(frozen=True)
class EmptyTerm:
    """Empty space; only produced by derivatives."""


SpaceTerm = (Pt, Fin, Omega, Lim, Sum, PairsPlus)


def lim_power(k, base=None):
    """The k-fold ``lim(...lim(pt)...)``."""
    t = base if base is not None else Pt()
    for _ in range(k):
        t = Lim(t)
    return t


def make_sum(parts):
    """Sum of the non-empty parts, collapsing the 0- and 1-part cases."""
    parts = [p for p in parts if not isinstance(p, EmptyTerm)]
    if not parts:
        return EmptyTerm()
    if len(parts) == 1:
        return parts[0]
    return Sum(tuple(parts))


def is_compact(t):
    if isinstance(t, (Omega, PairsPlus)):
        return False
    if isinstance(t, Sum):
        return all(is_compact(s) for s in t.ts)
    return True


def contains_pairs_plus(t):
    if isinstance(t, PairsPlus):
        return True
    if isinstance(t, Sum):
        return any(contains_pairs_plus(s) for s in t.ts)
    if isinstance(t, Lim):
        return contains_pairs_plus(t.t)
    return False


# ============================================================
# Address steps
# ============================================================
@dataclass(frozen=True, order=True)
class Idx:
    i: int


@dataclass(frozen=True, order=True)
class Branch:
    i: int


@dataclass(frozen=True, order=True)
class Copy:
    n: int


@dataclass(frozen=True, order=True)
class InfPoint:
    pass


@dataclass(frozen=True, order=True)
class EmptySet:
    pass


@dataclass(frozen=True, order=True)
class Pair:
    k: int
    l: int


HERE = ()


def at_copy(n, sub=HERE):
    return (Copy(n),) + tuple(sub)


def at_branch(i, sub=HERE):
    return (Branch(i),) + tuple(sub)


def subterm(t, prefix):
    """Term found by walking ``prefix`` (which must stop on a node, not a point)."""
    for step in prefix:
        if isinstance(step, Branch) and isinstance(t, Sum):
            t = t.ts[step.i]
        elif isinstance(step, Copy) and isinstance(t, Lim):
            t = t.t
        else:
            raise BadAddress(f"step {step} does not descend into {t}")
    return t


def validate_address(t, a):
    """Raise BadAddress unless ``a`` names a point of the space denoted by ``t``."""
    a = tuple(a)
    node = t
    for pos, step in enumerate(a):
        last = pos == len(a) - 1
        if isinstance(node, Sum):
            if not isinstance(step, Branch) or not 0 <= step.i < len(node.ts):
                raise BadAddress(f"bad branch {step} under {node}")
            node = node.ts[step.i]
            continue
        if isinstance(node, Lim):
            if isinstance(step, InfPoint) and last:
                return a
            if isinstance(step, Copy) and step.n >= 0:
                node = node.t
                continue
            raise BadAddress(f"bad step {step} under lim")
        if isinstance(node, Fin) and isinstance(step, Idx) and last:
            if 0 <= step.i < node.n:
                return a
            raise BadAddress(f"index {step.i} out of range for fin({node.n})")
        if isinstance(node, Omega) and isinstance(step, Idx) and last and step.i >= 0:
            return a
        if isinstance(node, PairsPlus) and last:
            if isinstance(step, EmptySet):
                return a
            if isinstance(step, Pair) and 0 <= step.k < step.l:
                return a
        raise BadAddress(f"step {step} does not match {node}")
    if isinstance(node, Pt):
        return a
    raise BadAddress(f"address {a} stops at a non-point node {node}")


def is_valid_address(t, a):
    try:
        validate_address(t, a)
    except BadAddress:
        return False
    return True


def is_limit_address(a):
    return bool(a) and isinstance(a[-1], (InfPoint, EmptySet))


def _format_step(step):
    if isinstance(step, (Branch, Idx)):
        return str(step.i)
    if isinstance(step, Copy):
        return f"copy{step.n}"
    if isinstance(step, InfPoint):
        return "inf"
    if isinstance(step, EmptySet):
        return "empty"
    if isinstance(step, Pair):
        return f"pair({step.k},{step.l})"
    raise BadAddress(f"unknown address step {step!r}")


def format_address(a):
    """Slash path such as ``0/copy3/inf``; the address of a one-point space is ``here``."""
    if not a:
        return "here"
    return "/".join(_format_step(s) for s in a)


def parse_address(text, t):
    """Inverse of format_address; the term decides whether a number is a branch or an index."""
    text = text.strip()
    if text == "here":
        return validate_address(t, HERE)
    steps = []
    node = t
    for part in text.split("/"):
        part = part.strip()
        if isinstance(node, Sum) and part.isdigit():
            steps.append(Branch(int(part)))
            node = node.ts[int(part)] if int(part) < len(node.ts) else node
        elif part.isdigit():
            steps.append(Idx(int(part)))
        elif part.startswith("copy") and part[4:].isdigit():
            steps.append(Copy(int(part[4:])))
            node = node.t if isinstance(node, Lim) else node
        elif part == "inf":
            steps.append(InfPoint())
        elif part == "empty":
            steps.append(EmptySet())
        elif part.startswith("pair(") and part.endswith(")"):
            try:
                k, l = (int(x) for x in part[5:-1].split(","))
            except ValueError:
                raise BadAddress(f"malformed pair step {part!r}")
            steps.append(Pair(k, l))
        else:
            raise BadAddress(f"malformed address step {part!r}")
    return validate_address(t, tuple(steps))


# ============================================================
# Cantor-Bendixson analysis
# ============================================================
def _derive_once(t):
    if isinstance(t, (Pt, Fin, Omega, EmptyTerm)):
        return EmptyTerm()
    if isinstance(t, PairsPlus):
        return Pt()
    if isinstance(t, Lim):
        inner = _derive_once(t.t)
        if isinstance(inner, EmptyTerm):
            return Pt()
        return Lim(inner)
    if isinstance(t, Sum):
        return make_sum([_derive_once(s) for s in t.ts])
    raise TermError(f"not a space term: {t!r}")


def cb_derivative(t, k=1):
    """Term for the k-th Cantor-Bendixson derivative; EmptyTerm once it vanishes."""
    for _ in range(k):
        if isinstance(t, EmptyTerm):
            break
        t = _derive_once(t)
    return t


def cb_rank(t):
    k = 0
    while not isinstance(t, EmptyTerm):
        t = _derive_once(t)
        k += 1
    return k


def cb_level(t, a):
    """CB level of the point ``a``: the largest k with a in the k-th derivative."""
    a = validate_address(t, a)
    node = t
    for step in a:
        if isinstance(step, Branch):
            node = node.ts[step.i]
        elif isinstance(step, Copy):
            node = node.t
        elif isinstance(step, InfPoint):
            return cb_rank(node.t)
        elif isinstance(step, EmptySet):
            return 1
        else:
            return 0
    return 0


def top_count(t):
    """Number of points in the last non-empty derivative of a compact term."""
    r = cb_rank(t)
    if r == 0:
        return 0
    last = cb_derivative(t, r - 1)
    if isinstance(last, Pt):
        return 1
    if isinstance(last, Fin):
        return last.n
    if isinstance(last, Sum):
        return sum(top_count(s) for s in last.ts)
    raise TermError(f"top level of {t} is not finite")


def limit_point_count(t):
    """Number of limit points; INF when there are infinitely many."""
    d = cb_derivative(t, 1)
    if isinstance(d, EmptyTerm):
        return 0
    if cb_rank(d) > 1 or contains_omega(d):
        return INF
    return top_count(d)


def contains_omega(t):
    if isinstance(t, Omega):
        return True
    if isinstance(t, Sum):
        return any(contains_omega(s) for s in t.ts)
    if isinstance(t, Lim):
        return contains_omega(t.t)
    return False


# ============================================================
# Canonical form
# ============================================================
@dataclass(frozen=True)
class CanonicalSpace:
    compact_parts: tuple = ()
    omega_part: bool = False
    pairs_plus_count: int = 0

    def as_dict(self):
        return {
            "compactParts": [list(p) for p in self.compact_parts],
            "omegaPart": self.omega_part,
            "pairsPlusCount": self.pairs_plus_count,
        }


def summands(t):
    """Flattened summands of a term; nested sums are opened."""
    if isinstance(t, Sum):
        out = []
        for s in t.ts:
            out.extend(summands(s))
        return out
    if isinstance(t, EmptyTerm):
        return []
    return [t]


def canonical_form(t):
    """
    Homeomorphism-invariant normal form.

    A compact scattered space of rank r whose top derivative has m points is
    homeomorphic to the ordinal space omega^(r-1)*m+1, and a finite sum of
    compact pieces is absorbed by its highest-rank piece. Omega absorbs the
    isolated points, PairsPlus absorbs Omega and the isolated points.
    """
    parts = summands(t)
    pairs_plus = sum(1 for p in parts if isinstance(p, PairsPlus))
    omega = any(isinstance(p, Omega) for p in parts) and pairs_plus == 0
    compact = [p for p in parts if not isinstance(p, (Omega, PairsPlus))]

    best_rank, best_count = 0, 0
    for p in compact:
        r = cb_rank(p)
        m = top_count(p)
        if r > best_rank:
            best_rank, best_count = r, m
        elif r == best_rank:
            best_count += m

    if best_rank == 1 and (omega or pairs_plus):
        best_rank = 0
    compact_parts = ((best_rank, best_count),) if best_rank else ()
    return CanonicalSpace(compact_parts, omega, pairs_plus)


# ============================================================
# Single limit point classification
# ============================================================
OMEGA_PLUS_ONE = "OmegaPlusOne"
OMEGA_SUM_OMEGA_PLUS_ONE = "OmegaSumOmegaPlusOne"
PAIRS_PLUS_TYPE = "PairsPlusType"


def classify_single_limit(t):
    d = cb_derivative(t, 1)
    if not isinstance(d, Pt):
        raise NotSingleLimit(f"{t} does not have exactly one limit point")
    if contains_pairs_plus(t):
        return PAIRS_PLUS_TYPE
    if is_compact(t):
        return OMEGA_PLUS_ONE
    return OMEGA_SUM_OMEGA_PLUS_ONE


# ============================================================
# Canonical sequences and neighbourhoods
# ============================================================
def anchor(t):
    """A fixed point of t of highest CB level, used as the representative of a copy."""
    if isinstance(t, Pt):
        return HERE
    if isinstance(t, (Fin, Omega)):
        return (Idx(0),)
    if isinstance(t, PairsPlus):
        return (EmptySet(),)
    if isinstance(t, Lim):
        return (InfPoint(),)
    if isinstance(t, Sum):
        ranks = [cb_rank(s) for s in t.ts]
        i = ranks.index(max(ranks))
        return at_branch(i, anchor(t.ts[i]))
    raise TermError(f"no points in {t!r}")


def approach_point(t, x, j):
    """The j-th point of the canonical sequence converging to the limit point x."""
    x = validate_address(t, x)
    prefix = x[:-1]
    if isinstance(x[-1], InfPoint):
        node = subterm(t, prefix)
        return prefix + at_copy(j, anchor(node.t))
    if isinstance(x[-1], EmptySet):
        return prefix + (Pair(j, j + 1),)
    raise BadAddress(f"{x} is not a limit point")


def nbhd_depth(t, a, b):
    """
    Largest n such that b lies in the n-th canonical clopen neighbourhood of a.

    INF when a == b, -1 when b lies in no canonical neighbourhood of a. Isolated
    points only have the trivial neighbourhood.
    """
    a, b = tuple(a), tuple(b)
    if a == b:
        return INF
    if not is_limit_address(a):
        return -1
    prefix = a[:-1]
    if b[: len(prefix)] != prefix or len(b) == len(prefix):
        return -1
    step = b[len(prefix)]
    if isinstance(a[-1], InfPoint) and isinstance(step, Copy):
        return step.n
    if isinstance(a[-1], EmptySet) and isinstance(step, Pair):
        return step.k
    return -1


# ============================================================
# Truncation
# ============================================================
@dataclass
class Truncation:
    term: object
    depth: int
    points: list = field(default_factory=list)
    approach: dict = field(default_factory=dict)

    def limit_points(self):
        return list(self.approach)

    def to_frame(self):
        rows = []
        for a in self.points:
            seq = self.approach.get(a)
            rows.append({
                "Address": format_address(a),
                "Limit": seq is not None,
                "ApproachedBy": " ".join(format_address(s) for s in seq) if seq else "",
            })
        return pd.DataFrame(rows, columns=["Address", "Limit", "ApproachedBy"])


def _truncate(t, d, prefix, out):
    if isinstance(t, Pt):
        out.points.append(prefix)
    elif isinstance(t, Fin):
        out.points.extend(prefix + (Idx(i),) for i in range(t.n))
    elif isinstance(t, Omega):
        out.points.extend(prefix + (Idx(i),) for i in range(d))
    elif isinstance(t, PairsPlus):
        for l in range(1, d + 1):
            for k in range(l):
                out.points.append(prefix + (Pair(k, l),))
        x = prefix + (EmptySet(),)
        out.points.append(x)
        out.approach[x] = [prefix + (Pair(k, k + 1),) for k in range(d)]
    elif isinstance(t, Lim):
        for n in range(d):
            _truncate(t.t, d, prefix + (Copy(n),), out)
        x = prefix + (InfPoint(),)
        out.points.append(x)
        out.approach[x] = [prefix + at_copy(n, anchor(t.t)) for n in range(d)]
    elif isinstance(t, Sum):
        for i, s in enumerate(t.ts):
            _truncate(s, d, prefix + (Branch(i),), out)
    else:
        raise TermError(f"cannot truncate {t!r}")


def truncate(t, d):
    """Finite subspace keeping copies/indices 0..d-1 below every node."""
    if d < 1:
        raise TermError(f"truncation depth must be >= 1, got {d}")
    out = Truncation(term=t, depth=d)
    _truncate(t, d, HERE, out)
    return out
