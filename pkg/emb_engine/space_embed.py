"""
Embeddability of spaces denoted by terms.

The decision splits both terms into atoms (points, Lim components, the
discrete part and PairsPlus pieces) and assigns every source atom to a target
host. A Lim host of CB rank R absorbs any number of atoms of smaller effective
rank in its copies and exactly one atom of rank R through its top point; the
discrete part counts as rank 2 and PairsPlus as rank 3 when they have to sit
inside compact hosts.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from . import settings
from .errors import GlueMismatch
from .space_term import (
    HERE,
    Branch,
    Copy,
    EmptySet,
    Fin,
    Idx,
    InfPoint,
    Lim,
    Omega,
    Pair,
    PairsPlus,
    Pt,
    Sum,
    anchor,
    approach_point,
    cb_rank,
    format_address,
    is_valid_address,
    nbhd_depth,
    subterm,
    top_count,
    truncate,
    validate_address,
)
from .verdict import VerificationReport, no, yes

logger = logging.getLogger(__name__)

PATTERN = "pattern"
ORACLE = "oracle"

CB_RANK_DROP = "CBRankDrop"
LIMIT_COUNT_EXCESS = "LimitCountExcess"
LOCAL_COMPACTNESS_MISMATCH = "LocalCompactnessMismatch"
EXHAUSTED_PATTERN_SEARCH = "ExhaustedPatternSearch"


# ============================================================
# Witnesses
# ============================================================
@dataclass(frozen=True, eq=False)
class SpaceEmbWitness:
    kind: str
    apply: Callable
    description: dict = field(default_factory=dict)
    settle: int = 0
    covers: Callable = None

    def __call__(self, a):
        return tuple(self.apply(tuple(a)))


def identity_witness(t):
    return SpaceEmbWitness(
        PATTERN,
        lambda a: a,
        {"rule": "identity"},
        0,
        lambda a: is_valid_address(t, a),
    )


def shift_witness(t, offset, prefix=HERE):
    """Copy n of the Lim node at ``prefix`` goes to copy n + offset; all else is fixed."""
    prefix = tuple(prefix)
    node = subterm(t, prefix)
    if not isinstance(node, Lim):
        raise ValueError(f"no lim node at {format_address(prefix)}")
    cut = len(prefix)

    def apply(a):
        if a[:cut] == prefix and len(a) > cut and isinstance(a[cut], Copy):
            return prefix + (Copy(a[cut].n + offset),) + a[cut + 1:]
        return a

    return SpaceEmbWitness(
        PATTERN,
        apply,
        {"rule": "shift", "at": format_address(prefix), "offset": offset},
        offset,
        lambda a: is_valid_address(t, a),
    )


def restrict(w, covers):
    """Same map, declared on the piece where ``covers`` holds."""
    return SpaceEmbWitness(w.kind, w.apply, dict(w.description), w.settle, covers)


def compose(w1, w2):
    """The witness for w2 after w1."""
    kind = PATTERN if w1.kind == w2.kind == PATTERN else ORACLE
    return SpaceEmbWitness(
        kind,
        lambda a: w2(w1(a)),
        {"compose": [w1.description, w2.description]},
        max(w1.settle, w2.settle),
        w1.covers,
    )


def wedge_glue(w0, w1, z):
    """
    Union of two witnesses defined on closed pieces meeting exactly at z.

    Points covered by w0 use w0, everything else uses w1.
    """
    z = tuple(z)
    if w0(z) != w1(z):
        raise GlueMismatch(
            f"pieces disagree at {format_address(z)}: "
            f"{format_address(w0(z))} vs {format_address(w1(z))}"
        )
    first = w0.covers or (lambda a: False)

    def apply(a):
        if a == z or first(a):
            return w0(a)
        return w1(a)

    def covers(a):
        return first(a) or (w1.covers(a) if w1.covers else True)

    kind = PATTERN if w0.kind == w1.kind == PATTERN else ORACLE
    return SpaceEmbWitness(
        kind,
        apply,
        {"glue": format_address(z), "pieces": [w0.description, w1.description]},
        max(w0.settle, w1.settle),
        covers,
    )


# ============================================================
# Atoms and hosts
# ============================================================
@dataclass
class _Atom:
    prefix: tuple
    term: object
    kind: str
    rank: int


@dataclass
class _Unit:
    """A source atom, or all discrete atoms bundled into one Omega."""

    kind: str
    rank: int
    term: object
    members: list

    def local(self, a):
        if self.kind == "omega":
            for t, m in enumerate(self.members):
                cut = len(m.prefix)
                if a[:cut] == m.prefix:
                    return (Idx(a[cut].i * len(self.members) + t),)
        return a[len(self.members[0].prefix):]


def _atoms(t, prefix=HERE):
    if isinstance(t, Sum):
        out = []
        for i, s in enumerate(t.ts):
            out.extend(_atoms(s, prefix + (Branch(i),)))
        return out
    if isinstance(t, Fin):
        return [_Atom(prefix + (Idx(i),), Pt(), "pt", 1) for i in range(t.n)]
    if isinstance(t, Pt):
        return [_Atom(prefix, t, "pt", 1)]
    if isinstance(t, Omega):
        return [_Atom(prefix, t, "omega", 2)]
    if isinstance(t, PairsPlus):
        return [_Atom(prefix, t, "pairs", 3)]
    return [_Atom(prefix, t, "lim", cb_rank(t))]


def _units(atoms):
    units = []
    omegas = [a for a in atoms if a.kind == "omega"]
    for a in atoms:
        if a.kind != "omega":
            units.append(_Unit(a.kind, a.rank, a.term, [a]))
    if omegas:
        units.append(_Unit("omega", 2, Omega(), omegas))
    return units


def _absorbs(host, unit):
    """Host can take the unit without using its top point or special slot."""
    if unit.kind == "pt":
        return host.kind != "pt"
    if unit.kind == "omega":
        return host.kind in ("omega", "pairs") or (host.kind == "lim" and host.rank >= 3)
    if unit.kind == "pairs":
        return host.kind == "lim" and host.rank >= 4
    return host.kind == "lim" and host.rank > unit.rank


def _assign(units, hosts):
    plan = [{"top": None, "lower": [], "rows": [], "special": None} for _ in hosts]
    pending = []
    for u in units:
        target = next((i for i, h in enumerate(hosts) if _absorbs(h, u)), None)
        if target is None:
            pending.append(u)
        elif hosts[target].kind == "lim":
            plan[target]["lower"].append(u)
        else:
            plan[target]["rows"].append(u)

    free_top = [i for i, h in enumerate(hosts) if h.kind == "lim"]
    free_pt = [i for i, h in enumerate(hosts) if h.kind == "pt"]
    free_special = [i for i, h in enumerate(hosts) if h.kind == "pairs"]

    def take_top(rank):
        for i in free_top:
            if hosts[i].rank == rank:
                free_top.remove(i)
                return i
        return None

    order = {"lim": 0, "pairs": 1, "omega": 2, "pt": 3}
    pending.sort(key=lambda u: (order[u.kind], -u.rank))
    for u in pending:
        if u.kind == "pt":
            if not free_pt:
                return no(LIMIT_COUNT_EXCESS, "more isolated points than the target has room for")
            plan[free_pt.pop(0)]["rows"].append(u)
            continue
        slot = take_top(u.rank)
        if slot is not None:
            plan[slot]["top"] = u
            continue
        if u.kind in ("lim", "pairs") and u.rank in (2, 3) and free_special and not (
            u.kind == "lim" and u.rank == 3
        ):
            plan[free_special.pop(0)]["special"] = u
            continue
        if u.kind == "pairs":
            return no(
                LOCAL_COMPACTNESS_MISMATCH,
                "PairsPlus needs a PairsPlus summand or a point of CB level >= 2",
            )
        return no(
            LIMIT_COUNT_EXCESS,
            f"no free point of CB level {u.rank - 1} for a rank-{u.rank} piece",
        )
    return plan


# ============================================================
# Placement of units inside hosts
# ============================================================
def _finite_points(v):
    return truncate(v, 1).points


def _top_map(unit, host_term, k):
    v = host_term.t
    if unit.kind == "omega":
        spot = anchor(v)
        return lambda m: (Copy(k + m[0].i),) + spot
    if unit.kind == "pairs":
        inner = _embed_map(Omega(), v)

        def pairs_map(m):
            if isinstance(m[0], EmptySet):
                return (InfPoint(),)
            kk, l = m[0].k, m[0].l
            return (Copy(k + kk),) + inner((Idx(l - kk - 1),))

        return pairs_map

    u = unit.term.t
    p = max(1, top_count(u))
    inner = _embed_map(u, v if p == 1 else Sum((v,) * p))

    def lim_map(m):
        if isinstance(m[0], InfPoint):
            return (InfPoint(),)
        n, rest = m[0].n, m[1:]
        b = inner(rest)
        if p == 1:
            return (Copy(k + n),) + b
        return (Copy(k + n * p + b[0].i),) + b[1:]

    return lim_map


def _special_map(unit):
    if unit.kind == "pairs":
        def shifted(m):
            if isinstance(m[0], EmptySet):
                return m
            return (Pair(m[0].k + 1, m[0].l + 1),)

        return shifted

    points = _finite_points(unit.term.t)
    q = len(points)

    def squeezed(m):
        if isinstance(m[0], InfPoint):
            return (EmptySet(),)
        s = m[0].n * q + points.index(m[1:])
        return (Pair(s + 1, s + 2),)

    return squeezed


def _row_maps(host, rows):
    maps = {}
    pts = [u for u in rows if u.kind == "pt"]
    rest = [u for u in rows if u.kind != "pt"]
    np_ = len(pts)

    def slot(i):
        if host.kind == "pairs":
            return (Pair(0, 1 + i),)
        if host.kind == "omega":
            return (Idx(i),)
        return HERE

    for i, u in enumerate(pts):
        maps[id(u)] = (lambda s: lambda m: s)(slot(i))
    for u in rest:
        maps[id(u)] = lambda m: slot(np_ + m[0].i)
    return maps


@lru_cache(maxsize=None)
def _build(s, t):
    """(apply, settle, description) for an embedding of s into t, or a No verdict."""
    if cb_rank(s) > cb_rank(t):
        return no(CB_RANK_DROP, f"CB rank {cb_rank(s)} > {cb_rank(t)}")
    units = _units(_atoms(s))
    hosts = _atoms(t)
    plan = _assign(units, hosts)
    if not isinstance(plan, list):
        return plan

    placed = []
    settle = 0
    rows_desc = []
    for host, entry in zip(hosts, plan):
        lower = entry["lower"]
        for c, u in enumerate(lower):
            inner = _embed_map(u.term, host.term.t)
            placed.append((u, host, (lambda c_, f: lambda m: (Copy(c_),) + f(m))(c, inner)))
            rows_desc.append({"source": _unit_name(u), "host": format_address(host.prefix),
                              "role": "copy", "copy": c})
        if entry["top"] is not None:
            k = len(lower)
            settle = max(settle, k)
            placed.append((entry["top"], host, _top_map(entry["top"], host.term, k)))
            rows_desc.append({"source": _unit_name(entry["top"]),
                              "host": format_address(host.prefix), "role": "top", "offset": k})
        if entry["special"] is not None:
            placed.append((entry["special"], host, _special_map(entry["special"])))
            rows_desc.append({"source": _unit_name(entry["special"]),
                              "host": format_address(host.prefix), "role": "special"})
        if entry["rows"]:
            maps = _row_maps(host, entry["rows"])
            for u in entry["rows"]:
                placed.append((u, host, maps[id(u)]))
                rows_desc.append({"source": _unit_name(u),
                                  "host": format_address(host.prefix), "role": "row"})

    routes = []
    for u, host, f in placed:
        for m in u.members:
            routes.append((m.prefix, u, host.prefix, f))
    routes.sort(key=lambda r: -len(r[0]))

    def apply(a):
        for prefix, u, host_prefix, f in routes:
            if a[: len(prefix)] == prefix:
                return host_prefix + tuple(f(u.local(a)))
        raise ValueError(f"address {format_address(a)} is outside the source term")

    return apply, settle, {"assignment": rows_desc}


def _unit_name(u):
    return ",".join(format_address(m.prefix) for m in u.members)


def _embed_map(s, t):
    built = _build(s, t)
    if not isinstance(built, tuple):
        raise ValueError(f"internal placement failed: {s} into {t}")
    return built[0]


def space_embeds(s, t):
    """Decide whether the space of s embeds into the space of t."""
    built = _build(s, t)
    if not isinstance(built, tuple):
        logger.debug("space_embeds: no, %s", built.obstruction)
        return built
    apply, settle, description = built
    return yes(SpaceEmbWitness(PATTERN, apply, description, settle,
                               lambda a: is_valid_address(s, a)))


# ============================================================
# Verification
# ============================================================
def probe_indices(w, d):
    start = max(settings.settle_index(), w.settle + 1)
    return [start * (j + 1) for j in range(max(d, 2))]


def verify_space_witness(w, s, t, d):
    """
    Check a witness on the depth-d truncation of s.

    Images must be valid and pairwise distinct; for every kept limit point the
    images of far-out canonical approach points must sit in strictly deeper
    neighbourhoods of its image, or all at least d deep, and kept points away
    from it must stay shallower.
    """
    report = VerificationReport(depth=d)
    trunc = truncate(s, d)
    images = {}

    def image(a):
        if a not in images:
            try:
                b = validate_address(t, w(a))
            except Exception as e:
                report.fail(f"image of {format_address(a)} is invalid: {e}")
                b = None
            images[a] = b
        return images[a]

    for a in trunc.points:
        image(a)
    probes = {}
    for x in trunc.limit_points():
        probes[x] = [approach_point(s, x, n) for n in probe_indices(w, d)]
        for p in probes[x]:
            image(p)

    seen = {}
    for a, b in images.items():
        if b is None:
            continue
        if b in seen:
            report.fail(
                f"{format_address(a)} and {format_address(seen[b])} both map to {format_address(b)}"
            )
        else:
            seen[b] = a

    # kept points by every proper prefix of their image
    below = {}
    for a in trunc.points:
        b = images[a]
        if b is not None:
            for k in range(len(b)):
                below.setdefault(b[:k], []).append(a)

    for x, seq in probes.items():
        y = images.get(x)
        if y is None:
            continue
        depths = [nbhd_depth(t, y, images[p]) if images[p] is not None else -1 for p in seq]
        rising = all(e2 > e1 for e1, e2 in zip(depths, depths[1:]))
        if min(depths) < 0 or not (rising or min(depths) >= d):
            report.fail(
                f"canonical sequence to {format_address(x)} does not converge to "
                f"{format_address(y)} (depths {depths})"
            )
            continue
        ceiling = max(depths)
        for a in below.get(y[:-1], ()):
            if nbhd_depth(s, x, a) >= 0:
                continue
            if nbhd_depth(t, y, images[a]) >= ceiling:
                report.fail(
                    f"{format_address(a)} is away from {format_address(x)} but its image "
                    f"lies deep near {format_address(y)}"
                )

    report.points_checked = len(images)
    return report


def verify_at_depths(w, s, t, depths=None):
    """Reports for every configured depth."""
    depths = depths or settings.tested_depths()
    return [verify_space_witness(w, s, t, d) for d in depths]
