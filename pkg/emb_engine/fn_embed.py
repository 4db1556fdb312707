"""
Embeddability of functions: witnesses, deciders and verification.

f embeds in g when there are embeddings sigma of the domains and tau of the
images with tau(f(x)) = g(sigma(x)). Two deciders are provided: one for
domains that are finite sums of points, fin, omega and lim(pt), and one for
locally constant functions over arbitrary terms.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import networkx as nx

from . import settings
from .errors import InvalidWitness, NotContinuous, UnsupportedDomain
from .fn_rep import (
    Approach,
    Const,
    FnFin,
    FnLim,
    FnOmega,
    FnOracle,
    FnPt,
    FnSum,
    Periodic,
    closeness,
    continuity_check,
    d0,
    d1,
    evaluate,
    evaluate_node,
    family_key,
    is_locally_constant,
    key_index,
    key_limit,
    key_value,
    profile,
    tail_node,
    tail_value,
    value_sort_key,
)
from .space_embed import (
    ORACLE,
    PATTERN,
    SpaceEmbWitness,
    compose,
    identity_witness,
    probe_indices,
    space_embeds,
    verify_space_witness,
)
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
    Pt,
    Sum,
    anchor,
    approach_point,
    format_address,
    is_compact,
    is_valid_address,
    subterm,
    truncate,
)
from .verdict import VerificationReport, no, yes

logger = logging.getLogger(__name__)

IMAGE_CARDINALITY = "ImageCardinality"
LIMIT_VALUE_MISMATCH = "LimitValueMismatch"
FIBER_CARDINALITY = "FiberCardinality"
FIBER_SPACE = "FiberSpace"
CONVERGENCE_CAPACITY = "ConvergenceCapacity"
EXHAUSTED_ASSIGNMENT = "ExhaustedAssignment"
CONTINUITY = "Continuity"

CONTINUOUS = "Continuous"
D0 = "D0"
D1 = "D1"


# ============================================================
# Witnesses
# ============================================================
@dataclass(frozen=True, eq=False)
class FnEmbWitness:
    sigma: SpaceEmbWitness
    tau: Callable
    description: dict = field(default_factory=dict)

    def as_dict(self):
        return {"sigma": self.sigma.description, "tau": self.description}


def identity_fn_witness(f):
    return FnEmbWitness(identity_witness(f.domain), lambda v: v, {"rule": "identity"})


def fn_compose(w1, w2):
    """Witness for f <= h from witnesses for f <= g and g <= h."""
    return FnEmbWitness(
        compose(w1.sigma, w2.sigma),
        lambda v: w2.tau(w1.tau(v)),
        {"compose": [w1.description, w2.description]},
    )


def _fmt(v):
    from .parser import format_value

    return format_value(v)


# ============================================================
# Class D shapes
# ============================================================
@dataclass
class _Fam:
    """Isolated points prefix/step(n), n >= start, valued on key at index n + base."""

    prefix: tuple
    key: tuple
    base: int
    start: int
    omega: bool

    def point(self, n):
        return self.prefix + ((Idx(n),) if self.omega else (Copy(n),))


@dataclass
class _Comp:
    prefix: tuple
    inf: object
    tail: object
    start: int
    fam: _Fam = None

    @property
    def approach(self):
        return self.fam is not None

    def inf_point(self):
        return self.prefix + (InfPoint(),)

    def point(self, n):
        return self.prefix + (Copy(n),)


@dataclass
class _Discrete:
    """Omega node with a const tail: indices >= start all take ``value``."""

    prefix: tuple
    start: int
    value: object

    def point(self, n):
        return self.prefix + (Idx(n),)


def in_class_d(t):
    if isinstance(t, Sum):
        return all(in_class_d(s) for s in t.ts)
    return isinstance(t, (Pt, Fin, Omega)) or t == Lim(Pt())


class FnShape:
    """
    Finite description of a class D function.

    ``K`` is a global index threshold: on every key, values with index >= K
    are generic (their fibre is exactly one point per family on the key) and
    everything else in the image is special.
    """

    def __init__(self, f):
        self.f = f
        self.cod = f.codomain
        self.points = []
        self.comps = []
        self.discrete = []
        self.fams = []
        self._walk(f.domain, f.body, HERE)
        self.keys = []
        for fam in self.fams:
            if fam.key not in self.keys:
                self.keys.append(fam.key)
        self.K = self._threshold()
        self.iso = {}
        for a, v in self.points:
            self.iso.setdefault(v, []).append(a)
        for fam in self.fams:
            for n in range(fam.start, self.K - fam.base):
                self.iso.setdefault(key_value(fam.key, n + fam.base), []).append(fam.point(n))
        self.special = set(self.iso)
        self.special.update(c.inf for c in self.comps)
        self.special.update(c.tail.value for c in self.comps if not c.approach)
        self.special.update(d.value for d in self.discrete)

    def _walk(self, t, node, prefix):
        if isinstance(node, FnSum):
            for i, (s, p) in enumerate(zip(t.ts, node.parts)):
                self._walk(s, p, prefix + (Branch(i),))
        elif isinstance(node, FnPt):
            self.points.append((prefix, node.value))
        elif isinstance(node, FnFin):
            self.points.extend((prefix + (Idx(i),), v) for i, v in enumerate(node.values))
        elif isinstance(node, FnOmega):
            self.points.extend((prefix + (Idx(i),), v) for i, v in node.exc)
            if isinstance(node.tail, Const):
                self.discrete.append(_Discrete(prefix, node.threshold, node.tail.value))
            else:
                d = node.tail.desc
                self.fams.append(_Fam(prefix, family_key(self.cod, d), d.base, node.threshold, True))
        elif isinstance(node, FnLim) and isinstance(node.tail, Periodic):
            raise UnsupportedDomain(f"periodic tail at {format_address(prefix)}")
        elif isinstance(node, FnLim) and isinstance(t.t, Pt):
            self.points.extend((prefix + (Copy(n),), sub.value) for n, sub in node.exc)
            comp = _Comp(prefix, node.inf, node.tail, node.threshold)
            if isinstance(node.tail, Approach):
                d = node.tail.desc
                comp.fam = _Fam(prefix, family_key(self.cod, d), d.base, node.threshold, False)
                self.fams.append(comp.fam)
            self.comps.append(comp)
        else:
            raise UnsupportedDomain(f"{t} is outside sums of pt, fin, omega and lim(pt)")

    def _explicit_values(self):
        out = [v for _, v in self.points]
        out += [c.inf for c in self.comps]
        out += [c.tail.value for c in self.comps if not c.approach]
        out += [d.value for d in self.discrete]
        out += [key_limit(k) for k in self.keys if key_limit(k) is not None]
        return out

    def _threshold(self):
        k = max((fam.start + fam.base for fam in self.fams), default=0)
        for v in self._explicit_values():
            for key in self.keys:
                idx = key_index(key, v)
                if idx is not None:
                    k = max(k, idx + 1)
        limits = sorted({key[1] for key in self.keys if key[0] == "q"})
        for c1, c2 in itertools.combinations(limits, 2):
            gap = abs(c1 - c2)
            j = 0
            while Fraction(1, 2 ** j) * 2 >= gap:
                j += 1
            k = max(k, j)
        return k

    def in_image(self, v):
        if v in self.special:
            return True
        for fam in self.fams:
            idx = key_index(fam.key, v)
            if idx is not None and idx >= self.K:
                return True
        return False

    def generic_key(self, v):
        """(key, index) for a generic image value, else None."""
        if v in self.special or v is None:
            return None
        for key in self.keys:
            idx = key_index(key, v)
            if idx is not None and idx >= self.K:
                return key, idx
        return None

    def width(self, key):
        return sum(1 for fam in self.fams if fam.key == key)

    def iso_cap(self, v):
        """Isolated points over v usable for stray source points."""
        if any(not c.approach and c.tail.value == v for c in self.comps):
            return INF
        if any(d.value == v for d in self.discrete):
            return INF
        return len(self.iso.get(v, []))

    def aleph_hosts(self, v, used):
        """Places that can take infinitely many discrete points over v."""
        hosts = [("discrete", i) for i, d in enumerate(self.discrete) if d.value == v]
        hosts += [
            ("comp", j) for j, c in enumerate(self.comps)
            if j not in used and not c.approach and c.tail.value == v
        ]
        return hosts


# ============================================================
# Class D search
# ============================================================
@dataclass
class Plan:
    assignment: dict
    keymap: dict
    tau: dict
    slots: dict
    aleph: dict
    pools: dict


def _assignments(F, G):
    cap = settings.max_assignments()
    seen = 0
    for perm in itertools.permutations(range(len(G.comps)), len(F.comps)):
        if any(F.comps[i].approach != G.comps[j].approach for i, j in enumerate(perm)):
            continue
        seen += 1
        if seen > cap:
            raise _SearchCap()
        yield dict(enumerate(perm))


class _SearchCap(Exception):
    pass


def _keymaps(F, G, A):
    fixed = {}
    for i, j in A.items():
        c = F.comps[i]
        if c.approach:
            target = G.comps[j].fam.key
            if fixed.setdefault(c.fam.key, target) != target:
                return
    free = [k for k in F.keys if k not in fixed]
    for choice in itertools.product(G.keys, repeat=len(free)):
        T = dict(fixed)
        T.update(zip(free, choice))
        yield T


def _plan(F, G, A, T):
    """A normalized witness plan for one assignment, or an Obstruction-like (kind, detail)."""
    forced = {}

    def force(q, q2, why):
        if forced.setdefault(q, q2) != q2:
            return (LIMIT_VALUE_MISMATCH, f"{why}: {_fmt(q)} would map to both "
                                          f"{_fmt(forced[q])} and {_fmt(q2)}")
        return None

    for i, j in A.items():
        c, h = F.comps[i], G.comps[j]
        err = force(c.inf, h.inf, "limit values")
        if err:
            return err
        if not c.approach:
            err = force(c.tail.value, h.tail.value, "tail values")
            if err:
                return err

    strict = set()
    for key in F.keys:
        L, L2 = key_limit(key), key_limit(T[key])
        if L is not None and F.in_image(L):
            if L2 is None:
                return (CONVERGENCE_CAPACITY, f"values converging to {_fmt(L)} need a convergent target")
            err = force(L, L2, "family limits")
            if err:
                return err
        elif L2 is not None:
            strict.add(L2)

    targets = list(forced.values())
    if len(set(targets)) != len(targets):
        return (LIMIT_VALUE_MISMATCH, "two image values are forced onto one target value")
    used = set(A.values())
    aleph = {}
    for q, q2 in forced.items():
        if q2 in strict:
            return (CONVERGENCE_CAPACITY, f"{_fmt(q2)} is a limit of image families")
        if not G.in_image(q2):
            return (LIMIT_VALUE_MISMATCH, f"{_fmt(q2)} is not a value of the target")
        if len(F.iso.get(q, [])) > G.iso_cap(q2):
            return (FIBER_CARDINALITY, f"fibre over {_fmt(q)} is larger than over {_fmt(q2)}")
        if any(d.value == q for d in F.discrete):
            hosts = G.aleph_hosts(q2, used)
            if not hosts:
                return (FIBER_CARDINALITY, f"infinite discrete fibre over {_fmt(q)} has no host")
            aleph[q] = hosts[0]

    slots = {}
    for key in F.keys:
        target = T[key]
        free_slots = [fam for fam in G.fams if fam.key == target and fam.omega]
        free_slots += [c.fam for j, c in enumerate(G.comps)
                       if j not in used and c.approach and c.fam.key == target]
        need = [fam for fam in F.fams if fam.key == key and fam.omega]
        if len(need) > len(free_slots):
            return (CONVERGENCE_CAPACITY, f"{len(need)} discrete families need room in "
                                          f"{len(free_slots)} free target families")
        for fam, slot in zip(need, free_slots):
            slots[id(fam)] = slot

    free = sorted((q for q in F.special if q not in forced), key=value_sort_key)
    if free:
        matching, pools = _match_free(F, G, free, forced, strict, used)
        if matching is None:
            return (FIBER_CARDINALITY, "no injective placement of the remaining image values")
        for q in free:
            forced[q] = matching[q]
            if any(d.value == q for d in F.discrete):
                aleph[q] = G.aleph_hosts(matching[q], used)[0]
    else:
        pools = {}
    return Plan(A, T, forced, slots, aleph, pools)


def _match_free(F, G, free, forced, strict, used):
    taken = set(forced.values())
    candidates = [v for v in sorted(G.special, key=value_sort_key)
                  if v not in taken and v not in strict]
    pool_keys = [k for k in G.keys if G.width(k) > 0]

    def fits(q, target):
        demand = len(F.iso.get(q, []))
        needs_aleph = any(d.value == q for d in F.discrete)
        if isinstance(target, tuple) and target[0] == "pool":
            return not needs_aleph and demand <= G.width(target[1])
        if demand > G.iso_cap(target):
            return False
        return not needs_aleph or bool(G.aleph_hosts(target, used))

    graph = nx.Graph()
    left = [("src", i) for i in range(len(free))]
    graph.add_nodes_from(left, bipartite=0)
    rights = [("val", v) for v in candidates]
    rights += [("pool", k, j) for k in pool_keys for j in range(len(free))]
    graph.add_nodes_from(rights, bipartite=1)
    for i, q in enumerate(free):
        for r in rights:
            target = r[1] if r[0] == "val" else r
            if fits(q, target):
                graph.add_edge(("src", i), r)
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    if any(node not in matching for node in left):
        return None, {}

    out, pools = {}, {}
    counters = {k: 0 for k in pool_keys}
    for i, q in enumerate(free):
        r = matching[("src", i)]
        if r[0] == "val":
            out[q] = r[1]
        else:
            m = G.K + 2 * counters[r[1]]
            counters[r[1]] += 1
            out[q] = key_value(r[1], m)
            pools[out[q]] = (r[1], m)
    return out, pools


# ============================================================
# Class D witness construction
# ============================================================
def class_d_witness(f, g, F, G, plan):
    A, T, table = plan.assignment, plan.keymap, plan.tau
    order = {key: i for i, key in enumerate(F.keys)}
    width = max(len(F.keys), 1)

    def psi(key, k):
        return G.K + 2 * (width * (k - F.K) + order[key]) + 1

    def tau(v):
        if v in table:
            return table[v]
        hit = F.generic_key(v)
        if hit is None:
            return None
        key, k = hit
        return key_value(T[key], psi(key, k))

    spare = {}
    fixed = {}

    def host_point(kind, idx, j):
        if kind == "comp":
            c = G.comps[idx]
            return c.point(c.start + j)
        d = G.discrete[idx]
        return d.point(d.start + j)

    for q in sorted(F.iso, key=value_sort_key):
        q2 = table[q]
        spots = list(G.iso.get(q2, []))
        if q2 in plan.pools:
            key, m = plan.pools[q2]
            spots = [fam.point(m - fam.base) for fam in G.fams if fam.key == key]
        unlimited = [("comp", j) for j, c in enumerate(G.comps)
                     if not c.approach and c.tail.value == q2]
        unlimited += [("discrete", i) for i, d in enumerate(G.discrete) if d.value == q2]
        for n, a in enumerate(F.iso[q]):
            if n < len(spots):
                fixed[a] = spots[n]
                continue
            host = unlimited[0]
            j = spare.get(host, 0)
            fixed[a] = host_point(*host, j)
            spare[host] = j + 1

    rules = {}
    for i, j in A.items():
        c, h = F.comps[i], G.comps[j]
        fixed[c.inf_point()] = h.inf_point()
        if c.approach:
            rules[c.prefix] = ("family", c.fam, h.fam, T[c.fam.key])
        else:
            rules[c.prefix] = ("const", c.start, ("comp", j))

    groups = {}
    for d in F.discrete:
        groups.setdefault(d.value, []).append(d)
    for q, members in groups.items():
        host = plan.aleph[q]
        for r, d in enumerate(members):
            rules[d.prefix] = ("aleph", d.start, host, r, len(members))
    for fam in F.fams:
        if fam.omega:
            rules[fam.prefix] = ("family", fam, plan.slots[id(fam)], T[fam.key])

    def apply(a):
        a = tuple(a)
        if a in fixed:
            return fixed[a]
        rule = rules.get(a[:-1])
        if rule is None:
            raise InvalidWitness(f"{format_address(a)} is outside the witness")
        step = a[-1]
        n = step.i if isinstance(step, Idx) else step.n
        if rule[0] == "family":
            _, fam, slot, _ = rule
            k = n + fam.base
            return slot.point(psi(fam.key, k) - slot.base)
        if rule[0] == "const":
            _, start, host = rule
            return host_point(*host, spare.get(host, 0) + n - start)
        _, start, host, r, count = rule
        return host_point(*host, spare.get(host, 0) + count * (n - start) + r)

    settle = F.K + 1
    description = {
        "limits": {format_address(F.comps[i].prefix): format_address(G.comps[j].prefix)
                   for i, j in A.items()},
        "values": {_fmt(q): _fmt(v) for q, v in sorted(table.items(), key=lambda kv: value_sort_key(kv[0]))},
        "families": {_key_text(k): _key_text(v) for k, v in T.items()},
    }
    sigma = SpaceEmbWitness(PATTERN, apply, description, settle,
                            lambda a: is_valid_address(f.domain, a))
    return FnEmbWitness(sigma, tau, {"values": description["values"],
                                     "families": description["families"]})


def _key_text(key):
    if key[0] == "q":
        return f"q({key[1]},{'+' if key[2] > 0 else '-'})"
    return key[0]


def _discontinuous_comps(S):
    return sum(1 for c in S.comps
               if (c.tail.value if not c.approach else key_limit(c.fam.key)) != c.inf)


def _infinite_fibres(S):
    """Values whose fibre is infinite: const tails of lim and omega nodes."""
    return {c.tail.value for c in S.comps if not c.approach} | {d.value for d in S.discrete}


def _decide_class_d(f, g):
    F, G = FnShape(f), FnShape(g)
    if F.fams and not G.fams:
        return no(IMAGE_CARDINALITY, "infinite image into a finite image")
    if not F.fams and not G.fams and len(F.special) > len(G.special):
        return no(IMAGE_CARDINALITY, f"{len(F.special)} image values into {len(G.special)}")
    if len(F.comps) > len(G.comps):
        return no(FIBER_SPACE, f"{len(F.comps)} limit points into {len(G.comps)}")
    inf_f, inf_g = _infinite_fibres(F), _infinite_fibres(G)
    if len(inf_f) > len(inf_g):
        return no(FIBER_CARDINALITY, f"{len(inf_f)} infinite fibres into {len(inf_g)}")
    if _discontinuous_comps(F) > _discontinuous_comps(G):
        return no(CONTINUITY, "a discontinuity has nowhere to go")

    first = None
    try:
        for A in _assignments(F, G):
            for T in _keymaps(F, G, A):
                plan = _plan(F, G, A, T)
                if isinstance(plan, Plan):
                    logger.debug("fn_embeds: class D plan %s", plan.assignment)
                    return yes(class_d_witness(f, g, F, G, plan))
                first = first or plan
            if first is None:
                first = (CONVERGENCE_CAPACITY, "families cannot share one target key")
    except _SearchCap:
        return no(EXHAUSTED_ASSIGNMENT, "assignment search cap reached")
    if first is None:
        return no(EXHAUSTED_ASSIGNMENT, "no kind-compatible assignment of limit points")
    return no(*first)


# ============================================================
# Locally constant functions
# ============================================================
def _decide_locally_constant(f, g):
    pf, pg = profile(f), profile(g)
    vf, vg = pf.values(), pg.values()
    if len(vf) > len(vg):
        return no(IMAGE_CARDINALITY, f"{len(vf)} image values into {len(vg)}")
    graph = nx.Graph()
    left = [("src", i) for i in range(len(vf))]
    right = [("dst", j) for j in range(len(vg))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    fibre_maps = {}
    for i, q in enumerate(vf):
        for j, q2 in enumerate(vg):
            verdict = space_embeds(pf.fiber_term(q), pg.fiber_term(q2))
            if verdict:
                graph.add_edge(("src", i), ("dst", j))
                fibre_maps[i, j] = verdict.witness
    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    if any(node not in matching for node in left):
        return no(FIBER_SPACE, "no injective matching of fibres")
    table = {q: vg[matching[("src", i)][1]] for i, q in enumerate(vf)}
    maps = {q: fibre_maps[i, matching[("src", i)][1]] for i, q in enumerate(vf)}
    return yes(fibre_witness(f, g, pf, pg, table, maps))


def fibre_witness(f, g, pf, pg, table, maps):
    """Union of fibre embeddings; used for finite images where all fibres are clopen."""

    def apply(a):
        q = evaluate(f, a)
        b = maps[q](pf.to_fiber(q, a))
        return pg.from_fiber(table[q], b)

    description = {"values": {_fmt(q): _fmt(v) for q, v in table.items()},
                   "fibres": {_fmt(q): w.description for q, w in maps.items()}}
    sigma = SpaceEmbWitness(ORACLE, apply, description,
                            max((w.settle for w in maps.values()), default=0),
                            lambda a: is_valid_address(f.domain, a))
    return FnEmbWitness(sigma, lambda v: table.get(v), {"values": description["values"]})


def fn_embeds(f, g):
    """Decide f <= g; Yes carries a witness, No an obstruction."""
    if in_class_d(f.domain) and in_class_d(g.domain):
        return _decide_class_d(f, g)
    if is_locally_constant(f) and is_locally_constant(g):
        return _decide_locally_constant(f, g)
    raise UnsupportedDomain(
        "fn_embeds needs class D domains or two locally constant functions"
    )


# ============================================================
# Continuous / d0 / d1
# ============================================================
def classify_discontinuous(f):
    """
    CONTINUOUS, or (D0 | D1, witness) embedding d0 or d1 into f at the first bad lim node.

    A const tail missing its limit value gives d0; an approach tail converging
    elsewhere gives d1.
    """
    if not is_compact(f.domain):
        raise UnsupportedDomain("classify_discontinuous needs a compact domain")
    hit = continuity_check(f)
    if hit.continuous:
        return CONTINUOUS, None
    prefix = hit.path
    node = subterm(f.domain, prefix)
    body = _node_at(f.body, prefix)
    start = body.threshold
    point = anchor(node.t)
    step = 1
    if isinstance(hit.tail, Periodic):
        parity, point, v = _periodic_break(node.t, f.codomain, hit)
        start += (start - parity) % 2
        step = 2
        values = {0: v, 1: hit.inf_value}
        source = d0()
    elif isinstance(hit.tail, Const):
        values = {0: hit.tail.value, 1: hit.inf_value}
        source = d0()
    else:
        k = key_index(family_key(f.codomain, hit.tail.desc), hit.inf_value)
        if k is not None:
            start = max(start, k - hit.tail.desc.base + 1)
        values = None
        source = d1()

    def apply(a):
        if isinstance(a[0], InfPoint):
            return prefix + (InfPoint(),)
        return prefix + (Copy(start + step * a[0].n),) + point

    def tau(v):
        if values is not None:
            return values.get(v)
        if v == 0:
            return hit.inf_value
        return tail_value(f.codomain, hit.tail, start + v - 1)

    sigma = SpaceEmbWitness(PATTERN, apply, {"rule": "subsequence", "at": format_address(prefix),
                                             "from": start, "step": step}, start,
                            lambda a: is_valid_address(source.domain, a))
    kind = D0 if values is not None else D1
    logger.debug("classify_discontinuous: %s at %s", kind, format_address(prefix))
    return kind, FnEmbWitness(sigma, tau, {"rule": kind, "at": format_address(prefix)})


def _point_where(t, node, cod, keep):
    """Address of some point of the node whose value passes ``keep``, or None."""
    if isinstance(node, FnPt):
        return HERE if keep(node.value) else None
    if isinstance(node, FnFin):
        return next(((Idx(i),) for i, v in enumerate(node.values) if keep(v)), None)
    if isinstance(node, FnSum):
        for i, (s, p) in enumerate(zip(t.ts, node.parts)):
            hit = _point_where(s, p, cod, keep)
            if hit is not None:
                return (Branch(i),) + hit
        return None
    if isinstance(node, FnOmega):
        for i, v in node.exc:
            if keep(v):
                return (Idx(i),)
        for i in (node.threshold, node.threshold + 1):
            if keep(tail_value(cod, node.tail, i)):
                return (Idx(i),)
        return None
    if keep(node.inf):
        return (InfPoint(),)
    copies = list(node.exc) + [(n, tail_node(t.t, cod, node.tail, n))
                               for n in (node.threshold, node.threshold + 1)]
    for n, sub in copies:
        hit = _point_where(t.t, sub, cod, keep)
        if hit is not None:
            return (Copy(n),) + hit
    return None


def _periodic_break(t, cod, hit):
    """A copy parity and a point inside it whose value is not the lim value."""
    for parity, sub in ((0, hit.tail.even), (1, hit.tail.odd)):
        point = _point_where(t, sub, cod, lambda v: v != hit.inf_value)
        if point is not None:
            return parity, point, evaluate_node(t, sub, cod, point)
    raise NotContinuous("periodic tail agrees with its lim value")


def _node_at(body, prefix):
    for step in prefix:
        if isinstance(step, Branch):
            body = body.parts[step.i]
        else:
            body = dict(body.exc)[step.n]
    return body


# ============================================================
# Verification
# ============================================================
def _families(f):
    if isinstance(f, FnOracle):
        return None
    try:
        return profile(f).families
    except NotContinuous:
        return None


def verify_fn_witness(w, f, g, d):
    """
    Check (sigma, tau) on the depth-d truncation of the domain of f.

    sigma gets the space checks; every kept point and canonical probe must
    satisfy g(sigma(a)) == tau(f(a)); tau must be injective on the values
    seen and carry approach families towards the image of their limit.
    """
    report = verify_space_witness(w.sigma, f.domain, g.domain, d)
    trunc = truncate(f.domain, d)
    points = list(trunc.points)
    for x in trunc.limit_points():
        points.extend(trunc.approach[x])
        points.extend(approach_point(f.domain, x, n) for n in probe_indices(w.sigma, d))
    seen = {}
    for a in points:
        try:
            v = evaluate(f, a)
            lhs = evaluate(g, w.sigma(a))
        except Exception as e:
            report.fail(f"evaluation failed at {format_address(a)}: {e}")
            continue
        rhs = w.tau(v)
        if lhs != rhs:
            report.fail(f"g(sigma({format_address(a)})) = {_fmt(lhs)} but tau({_fmt(v)}) = {_fmt(rhs)}")
        if rhs in seen and seen[rhs] != v:
            report.fail(f"tau merges {_fmt(seen[rhs])} and {_fmt(v)}")
        seen.setdefault(rhs, v)

    for fam in _families(f) or []:
        limit = key_limit(fam.key)
        if limit is None:
            continue
        target = w.tau(limit)
        if target is None:
            continue
        ks = [fam.start + fam.base + n for n in probe_indices(w.sigma, d)]
        images = [w.tau(key_value(fam.key, k)) for k in ks]
        if any(v is None for v in images):
            report.fail(f"tau is undefined on the family converging to {_fmt(limit)}")
            continue
        depth = [closeness(g.codomain, v, target) for v in images]
        if not all(b > a for a, b in zip(depth, depth[1:])):
            report.fail(f"tau does not carry the family converging to {_fmt(limit)} "
                        f"towards {_fmt(target)}")
    report.points_checked = max(report.points_checked, len(points))
    return report


def verify_fn_at_depths(w, f, g, depths=None):
    depths = depths or settings.tested_depths()
    return [verify_fn_witness(w, f, g, d) for d in depths]
