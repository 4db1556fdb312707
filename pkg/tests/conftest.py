import random

import pytest

from emb_engine.fn_rep import (
    Approach,
    ApproachDesc,
    Const,
    FinCod,
    FnFin,
    FnLim,
    FnOmega,
    FnPt,
    FnRep,
    FnSum,
    OmegaPlusOneCod,
    Periodic,
    W,
)
from emb_engine.graph import graph_from_edges
from emb_engine.set_rep import Alt, SetFin, SetLim, SetPt, SetSum, check_set
from emb_engine.space_term import Fin, Lim, Omega, Pt, lim_power, make_sum

CLASS_D_PARTS = (Pt(), Fin(1), Fin(2), Omega(), Lim(Pt()))
COMPACT_PARTS = (Pt(), Fin(2), Lim(Pt()), lim_power(2))


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def random_graph(rng):
    def make(support, p=0.5):
        edges = [(a, b) for a in range(support) for b in range(a + 1, support)
                 if rng.random() < p]
        return graph_from_edges(support, edges)

    return make


def _value(rng, cod):
    if isinstance(cod, FinCod):
        return rng.randrange(cod.k)
    return rng.choice([0, 1, 2, 3, W])


def _copies(rng, most):
    return sorted(rng.sample(range(4), rng.randint(0, most)))


def _tail(rng, child, cod, periodic):
    kinds = ["const"]
    if not isinstance(cod, FinCod):
        kinds.append("approach")
    if periodic and child is not None:
        kinds.append("periodic")
    kind = rng.choice(kinds)
    if kind == "approach":
        return Approach(ApproachDesc(rng.randrange(3)))
    if kind == "periodic":
        return Periodic(_node(rng, child, cod, periodic), _node(rng, child, cod, periodic))
    return Const(_value(rng, cod))


def _node(rng, t, cod, periodic):
    if isinstance(t, Pt):
        return FnPt(_value(rng, cod))
    if isinstance(t, Fin):
        return FnFin(tuple(_value(rng, cod) for _ in range(t.n)))
    if isinstance(t, Omega):
        exc = tuple((i, _value(rng, cod)) for i in _copies(rng, 2))
        return FnOmega(exc, _tail(rng, None, cod, False))
    if isinstance(t, Lim):
        tail = _tail(rng, t.t, cod, periodic)
        # half the time the top point agrees with the tail
        if rng.random() < 0.5 and isinstance(tail, Const):
            inf = tail.value
        elif rng.random() < 0.5 and isinstance(tail, Approach):
            inf = W
        else:
            inf = _value(rng, cod)
        exc = tuple((n, _node(rng, t.t, cod, periodic)) for n in _copies(rng, 3))
        return FnLim(inf, exc, tail)
    return FnSum(tuple(_node(rng, s, cod, periodic) for s in t.ts))


@pytest.fixture
def random_fn(rng):
    """Seeded functions on sums of one to three parts drawn from ``parts``."""

    def make(parts=CLASS_D_PARTS, cod=None, periodic=False, domain=None):
        if cod is None:
            cod = rng.choice([FinCod(3), OmegaPlusOneCod()])
        if domain is None:
            domain = make_sum([rng.choice(parts) for _ in range(rng.randint(1, 3))])
        return FnRep(domain, cod, _node(rng, domain, cod, periodic))

    return make


def _set(rng, t):
    if isinstance(t, Pt):
        return SetPt(rng.random() < 0.5)
    if isinstance(t, Fin):
        return SetFin(tuple(rng.random() < 0.5 for _ in range(t.n)))
    if isinstance(t, Lim):
        tail = _set(rng, t.t)
        if rng.random() < 0.5:
            tail = Alt(tail, _set(rng, t.t))
        exc = tuple((n, _set(rng, t.t)) for n in _copies(rng, 2))
        return SetLim(rng.random() < 0.5, exc, tail)
    return SetSum(tuple(_set(rng, s) for s in t.ts))


@pytest.fixture
def random_set(rng):
    """Seeded (term, set) pairs over sums of compact parts."""

    def make():
        t = make_sum([rng.choice(COMPACT_PARTS) for _ in range(rng.randint(1, 2))])
        return t, check_set(t, _set(rng, t))

    return make


@pytest.fixture
def edge01():
    return graph_from_edges(2, [(0, 1)])


@pytest.fixture
def triangle():
    return graph_from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def four_cycle():
    return graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])


@pytest.fixture
def empty_graph():
    return graph_from_edges(0, [])


@pytest.fixture
def omega1():
    return Lim(Pt())


@pytest.fixture
def omega2():
    return lim_power(2)


@pytest.fixture
def omega3():
    return lim_power(3)
