"""
From graphs to functions and back.

A graph G becomes a function on omega^2+1 into omega+1: the limit points go to
w, and the isolated point n of copy m carries a code recording whether the
pair of vertices it names is an edge. Injective homomorphisms of graphs turn
into embeddings of these functions, and the graph can be read back from the
function. Through a regular pseudo-embedding the same functions live on any
term with infinitely many limit points.
"""

import logging
import math
from dataclasses import dataclass

from . import settings
from .errors import InvalidWitness, TooFewLimitPoints, UnsupportedDomain
from .fn_embed import FnEmbWitness, verify_fn_witness
from .fn_rep import FnOracle, OmegaPlusOneCod, W, evaluate
from .graph import extend_injection, graph_from_edges, graph_to_json, ihom_decide, is_ihom
from .space_embed import ORACLE, SpaceEmbWitness, identity_witness, probe_indices
from .space_term import (
    Branch,
    Copy,
    Idx,
    InfPoint,
    Lim,
    Omega,
    Sum,
    approach_point,
    cb_rank,
    contains_pairs_plus,
    format_address,
    is_valid_address,
    lim_power,
    nbhd_depth,
    truncate,
    validate_address,
)
from .verdict import VerificationReport

logger = logging.getLogger(__name__)

OMEGA_SQUARED = lim_power(2)


# ============================================================
# Pairings
# ============================================================
def pair0(m, n):
    """Cantor pairing; pair0(m, n) != pair0(n, m) for m != n."""
    if m < 0 or n < 0:
        raise ValueError(f"pair0 needs naturals, got ({m}, {n})")
    return (m + n) * (m + n + 1) // 2 + n


def unpair0(z):
    if z < 0:
        raise ValueError(f"unpair0 needs a natural, got {z}")
    w = (math.isqrt(8 * z + 1) - 1) // 2
    n = z - w * (w + 1) // 2
    return w - n, n


def pair1(m, n):
    """Code of the unordered pair {m, n}."""
    if m == n:
        raise ValueError(f"pair1 needs two distinct vertices, got {m}")
    m, n = min(m, n), max(m, n)
    return pair0(m, n - m - 1)


def unpair1(z):
    m, k = unpair0(z)
    return m, m + k + 1


def pair2(i, m, p):
    if i not in (0, 1):
        raise ValueError(f"pair2 tag must be 0 or 1, got {i}")
    return 2 * pair0(m, p) + i


def unpair2(z):
    m, p = unpair0(z // 2)
    return z % 2, m, p


def check_encodings(bound=None):
    """decode(encode) is the identity on every code below ``bound``."""
    bound = bound if bound is not None else settings.encoding_check_bound()
    for z in range(bound):
        if pair0(*unpair0(z)) != z or pair1(*unpair1(z)) != z or pair2(*unpair2(z)) != z:
            logger.warning("encoding round trip fails at %d", z)
            return False
    return True


# ============================================================
# Functions of graphs
# ============================================================
def vertex_code(g, m, n, p):
    """Value of the graph function at the isolated point for (m, n, p)."""
    if m != n and g.has_edge(m, n):
        return pair2(1, pair1(m, n), p)
    return pair2(0, pair0(m, n), p)


def graph_to_fn_eval(g, a):
    """Value at a point of omega^2+1: w at limit points, codes elsewhere."""
    a = validate_address(OMEGA_SQUARED, a)
    if isinstance(a[-1], InfPoint):
        return W
    m, k = a[0].n, a[1].n
    n, p = unpair0(k)
    return vertex_code(g, m, n, p)


def graph_fn(g):
    """The graph function of g on omega^2+1 as an oracle."""
    return FnOracle(OMEGA_SQUARED, OmegaPlusOneCod(), lambda a: graph_to_fn_eval(g, a),
                    {"rule": "graph", "graph": graph_to_json(g)})


def restricted_graph_fn(g):
    """The graph function on the isolated points only, indexed by pair0(m, k)."""

    def rule(a):
        m, k = unpair0(a[0].i)
        return graph_to_fn_eval(g, (Copy(m), Copy(k)))

    return FnOracle(Omega(), OmegaPlusOneCod(), rule, {"rule": "restricted graph",
                                                       "graph": graph_to_json(g)})


def recover_graph(f, m, pe=None):
    """
    Read the graph on support m back from a graph function.

    {a, b} is an edge iff the probes (a, pair0(b, 0)) and (b, pair0(a, 0))
    take the same value. With ``pe`` the probes are pulled back through it.
    """
    if pe is None:
        def at(y):
            if isinstance(f.domain, Omega):
                return (Idx(pair0(y[0].n, y[1].n)),)
            return y
    else:
        at = pe.preimage
    edges = []
    for a in range(m):
        for b in range(a + 1, m):
            left = evaluate(f, at((Copy(a), Copy(pair0(b, 0)))))
            right = evaluate(f, at((Copy(b), Copy(pair0(a, 0)))))
            if left == right:
                edges.append((a, b))
    return graph_from_edges(m, edges)


# ============================================================
# Witnesses from injective homomorphisms
# ============================================================
def ihom_to_fn_witness(mapping, g, h):
    """
    Embedding of the graph function of g into that of h along an ihom.

    A non-edge {m, n} sent onto an edge would lose its orientation, so its
    isolated points move to even or odd positions by the order of m and n.
    """
    if not is_ihom(mapping, g, h):
        raise InvalidWitness(f"{mapping} is not an injective homomorphism")
    hv = extend_injection(mapping, h.support)

    def split(m, n):
        return m != n and not g.has_edge(m, n) and h.has_edge(hv(m), hv(n))

    def apply(a):
        if a == (InfPoint(),):
            return a
        m = a[0].n
        if isinstance(a[1], InfPoint):
            return (Copy(hv(m)), InfPoint())
        n, p = unpair0(a[1].n)
        if split(m, n):
            p = 2 * p + (0 if m < n else 1)
        return (Copy(hv(m)), Copy(pair0(hv(n), p)))

    def tau(v):
        if v is W:
            return W
        if not isinstance(v, int) or v < 0:
            return None
        i, c, p = unpair2(v)
        if i == 1:
            m, n = unpair1(c)
            if not g.has_edge(m, n):
                return None
            return pair2(1, pair1(hv(m), hv(n)), p)
        m, n = unpair0(c)
        if m != n and g.has_edge(m, n):
            return None
        return vertex_code(h, hv(m), hv(n), 2 * p + (0 if m < n else 1) if split(m, n) else p)

    sigma = SpaceEmbWitness(ORACLE, apply, {"rule": "ihom", "map": {str(k): v for k, v in
                                                                   sorted(mapping.items())}},
                            g.support, lambda a: is_valid_address(OMEGA_SQUARED, a))
    return FnEmbWitness(sigma, tau, {"rule": "ihom codes"})


# ============================================================
# Regular pseudo-embeddings
# ============================================================
def _outer_lim(t, prefix):
    """First lim node (pre-order) whose child has a limit point."""
    if isinstance(t, Lim):
        return (prefix, t) if cb_rank(t.t) >= 2 else None
    if isinstance(t, Sum):
        for i, s in enumerate(t.ts):
            hit = _outer_lim(s, prefix + (Branch(i),))
            if hit is not None:
                return hit
    return None


def _inner_lim(t, prefix):
    """First lim node inside t whose copies are finite."""
    if isinstance(t, Lim):
        if cb_rank(t.t) == 1:
            return prefix, t
        return _inner_lim(t.t, prefix + (Copy(0),))
    if isinstance(t, Sum):
        for i, s in enumerate(t.ts):
            hit = _inner_lim(s, prefix + (Branch(i),))
            if hit is not None:
                return hit
    return None


@dataclass(frozen=True)
class RegularPE:
    """
    A pseudo-embedding of part of t onto omega^2+1.

    Copy m of the lim node at ``outer`` holds a convergent sequence at
    ``inner``: its top point goes to (m, w) and its isolated points, listed
    copy by copy through ``cells``, go to (m, j). The top point of the outer
    node goes to the top point; every other point also goes there when the
    pseudo-embedding is extended to the whole space.
    """

    term: object
    outer: tuple
    inner: tuple
    cells: tuple

    @property
    def width(self):
        return len(self.cells)

    def locate(self, a):
        """(m, j) for points in the sequences (j None at their top), else None."""
        cut = len(self.outer)
        if a[:cut] != self.outer or len(a) == cut or not isinstance(a[cut], Copy):
            return None
        m = a[cut].n
        rest = a[cut + 1:]
        k = len(self.inner)
        if rest[:k] != self.inner:
            return None
        tail = rest[k:]
        if isinstance(tail[0], InfPoint):
            return m, None
        return m, tail[0].n * self.width + self.cells.index(tail[1:])

    def project(self, a):
        """Image in omega^2+1; points off the sequences go to the top point."""
        hit = self.locate(tuple(a))
        if hit is None:
            return (InfPoint(),)
        m, j = hit
        return (Copy(m), InfPoint()) if j is None else (Copy(m), Copy(j))

    def preimage(self, y):
        y = tuple(y)
        if y == (InfPoint(),):
            return self.outer + (InfPoint(),)
        base = self.outer + (Copy(y[0].n),) + self.inner
        if isinstance(y[1], InfPoint):
            return base + (InfPoint(),)
        j = y[1].n
        return base + (Copy(j // self.width),) + self.cells[j % self.width]

    def copy_of(self, a):
        cut = len(self.outer)
        if a[:cut] == self.outer and len(a) > cut and isinstance(a[cut], Copy):
            return a[cut].n
        return None

    def as_dict(self):
        return {"outer": format_address(self.outer), "inner": format_address(self.inner),
                "cellsPerCopy": self.width}


def build_regular_pe(t):
    hit = _outer_lim(t, ())
    if hit is None:
        raise TooFewLimitPoints(f"{t} has finitely many limit points")
    if contains_pairs_plus(t):
        raise UnsupportedDomain("regular pseudo-embeddings are not built on pairs+ summands")
    outer, node = hit
    inner, seq = _inner_lim(node.t, ())
    cells = tuple(truncate(seq.t, 1).points)
    pe = RegularPE(t, outer, inner, cells)
    logger.debug("build_regular_pe: %s", pe.as_dict())
    return pe


def verify_regular_pe(pe, d):
    """
    Regularity clauses and the pseudo-embedding law on the depth-d truncation.

    Fibres of the sequences part must be single points; canonical sequences
    whose images are not eventually constant must converge iff their images do.
    """
    report = VerificationReport(depth=d)
    trunc = truncate(pe.term, d)
    fibres = {}
    for a in trunc.points:
        if pe.locate(a) is not None or a == pe.outer + (InfPoint(),):
            fibres.setdefault(pe.project(a), []).append(a)
    for y, xs in fibres.items():
        if len(xs) > 1:
            report.fail(f"{len(xs)} points over {format_address(y)}")
    for x in trunc.limit_points():
        y = pe.project(x)
        seq = [approach_point(pe.term, x, n) for n in probe_indices(identity_witness(pe.term), d)]
        images = [pe.project(p) for p in seq]
        if len(set(images)) == 1:
            continue
        depths = [nbhd_depth(OMEGA_SQUARED, y, b) for b in images]
        if min(depths) < 0 or not all(b > a for a, b in zip(depths, depths[1:])):
            report.fail(f"images of the sequence to {format_address(x)} do not converge "
                        f"to {format_address(y)}")
    report.points_checked = len(trunc.points)
    return report


def reduce_on_space(g, t, pe=None):
    """The graph function of g pulled back to t along the regular pseudo-embedding."""
    pe = pe or build_regular_pe(t)
    return FnOracle(t, OmegaPlusOneCod(), lambda a: graph_to_fn_eval(g, pe.project(a)),
                    {"rule": "graph after pseudo-embedding", "graph": graph_to_json(g),
                     "pe": pe.as_dict()})


def lift_witness(w, pe):
    """
    Carry a witness between graph functions on omega^2+1 up to t.

    Points on the sequences move through the pseudo-embedding; other points
    of copy m move to the same place in the copy that (m, w) is sent to;
    everything else stays.
    """

    def copy_image(m):
        y = w.sigma((Copy(m), InfPoint()))
        return y[0].n

    def apply(a):
        a = tuple(a)
        if pe.locate(a) is not None:
            return pe.preimage(w.sigma(pe.project(a)))
        m = pe.copy_of(a)
        if m is None:
            return a
        cut = len(pe.outer)
        return pe.outer + (Copy(copy_image(m)),) + a[cut + 1:]

    sigma = SpaceEmbWitness(ORACLE, apply, {"rule": "lifted", "from": w.sigma.description,
                                            "pe": pe.as_dict()},
                            w.sigma.settle, lambda a: is_valid_address(pe.term, a))
    return FnEmbWitness(sigma, w.tau, {"rule": "lifted", "tau": w.description})


# ============================================================
# The check
# ============================================================
def reduction_check(g, h, t, d):
    """
    One instance of: g <=ihom h iff the pulled-back graph functions embed.

    Yes is backed by a lifted witness verified at depth d. No is backed by
    recovering both graphs from their functions and confirming the ihom No.
    """
    pe = build_regular_pe(t)
    fg, fh = reduce_on_space(g, t, pe), reduce_on_space(h, t, pe)
    verdict = ihom_decide(g, h)
    report = {"ihom": "yes" if verdict else "no", "depth": d,
              "forwardWitnessVerified": None, "recoveryConsistent": None}
    if verdict:
        witness = lift_witness(ihom_to_fn_witness(verdict.witness, g, h), pe)
        check = verify_fn_witness(witness, fg, fh, d)
        report["forwardWitnessVerified"] = check.passed
        report["failures"] = check.failures[:5]
        report["biconditionalHolds"] = check.passed
    else:
        m = max(g.support, h.support)
        rg, rh = recover_graph(fg, m, pe), recover_graph(fh, m, pe)
        consistent = (rg == graph_from_edges(m, g.edges) and rh == graph_from_edges(m, h.edges)
                      and not ihom_decide(rg, rh))
        report["recoveryConsistent"] = consistent
        report["obstruction"] = verdict.obstruction.as_dict()
        report["biconditionalHolds"] = consistent
    logger.info("reduction_check: ihom=%s holds=%s", report["ihom"], report["biconditionalHolds"])
    return report
