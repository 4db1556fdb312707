"""Seeded corpora checking the deciders against each other and against exhaustive oracles."""

import itertools

import pytest

from emb_engine.fn_embed import (
    CONTINUOUS,
    D0,
    D1,
    FIBER_CARDINALITY,
    IMAGE_CARDINALITY,
    classify_discontinuous,
    fn_embeds,
    verify_fn_at_depths,
    verify_fn_witness,
)
from emb_engine.fn_rep import (
    Approach,
    ApproachDesc,
    Const,
    FinCod,
    FnLim,
    FnPt,
    FnRep,
    FnSum,
    OmegaPlusOneCod,
    W,
    d0,
    d1,
    is_continuous,
    is_locally_constant,
)
from emb_engine.graph import all_graphs, edge_touched, is_ihom
from emb_engine.labelling import gamma_label, label_leq, lambda_label, witness_from_labels
from emb_engine.rank import (
    escalate,
    escalation_witness,
    fn_rank,
    high_rank_witness,
    rank_delta2,
    rank_oracle,
    sep_rank,
)
from emb_engine.reduction import OMEGA_SQUARED, graph_fn, recover_graph, reduction_check
from emb_engine.set_rep import Alt, SetLim, SetPt, check_set, closure, complement, is_empty
from emb_engine.space_embed import space_embeds, verify_at_depths
from emb_engine.space_term import (
    EmptyTerm,
    Fin,
    Lim,
    Omega,
    PairsPlus,
    Pt,
    Sum,
    cb_derivative,
    cb_rank,
    lim_power,
)

SEQ = Lim(Pt())
ODDS = SetLim(False, (), Alt(SetPt(False), SetPt(True)))
TOP = SetLim(True, (), SetPt(False))
TWO_VALUED_PARTS = (Pt(), Fin(2), Lim(Pt()))
COMPACT_PARTS = (Pt(), Fin(2), Lim(Pt()), lim_power(2))


def permutation_ihom(g, h):
    src = edge_touched(g)
    return any(is_ihom(dict(zip(src, image)), g, h)
               for image in itertools.permutations(range(h.support), len(src)))


def _all_pass(reports):
    return all(r.passed for r in reports)


def _continuous_fns(random_fn, count):
    out = []
    while len(out) < count:
        f = random_fn()
        if is_continuous(f):
            out.append(f)
    return out


def _extend(f, g):
    """f followed by the summands of g, as one function on the larger sum."""
    parts = f.domain.ts if isinstance(f.domain, Sum) else (f.domain,)
    nodes = f.body.parts if isinstance(f.body, FnSum) else (f.body,)
    return FnRep(Sum(parts + (g.domain,)), f.codomain, FnSum(nodes + (g.body,)))


class TestGraphReduction:
    def test_recovery_on_every_graph_of_support_five(self):
        for g in all_graphs(5):
            assert recover_graph(graph_fn(g), 5) == g

    def test_every_pair_of_support_four(self):
        graphs = list(all_graphs(4))
        for g, h in itertools.product(graphs, repeat=2):
            report = reduction_check(g, h, OMEGA_SQUARED, 6)
            assert (report["ihom"] == "yes") == permutation_ihom(g, h)
            if report["ihom"] == "yes":
                assert report["forwardWitnessVerified"], (g, h, report.get("failures"))
            else:
                assert report["recoveryConsistent"], (g, h)
            assert report["biconditionalHolds"]


class TestQuasiOrder:
    def test_reflexive_with_verified_witnesses(self, random_fn):
        for _ in range(500):
            f = random_fn()
            verdict = fn_embeds(f, f)
            assert verdict, (f, verdict.obstruction)
            assert _all_pass(verify_fn_at_depths(verdict.witness, f, f)), f

    def test_transitive_on_sampled_chains(self, random_fn):
        pool = [random_fn(cod=OmegaPlusOneCod()) for _ in range(24)]
        below = {}
        for i, j in itertools.product(range(len(pool)), repeat=2):
            verdict = fn_embeds(pool[i], pool[j])
            if verdict:
                below[i, j] = verdict.witness
        for (i, j), (k, m) in itertools.product(below, repeat=2):
            if j == k:
                assert (i, m) in below, (pool[i], pool[j], pool[m])
        for (i, j), w in below.items():
            assert verify_fn_witness(w, pool[i], pool[j], 4).passed


class TestLabels:
    @staticmethod
    def sequence_fn(rng, cod):
        values = [0, 1, 2] if isinstance(cod, FinCod) else [0, 1, 2, W]
        u = rng.choice(values)
        tail = Const(u)
        if u is W and rng.random() < 0.5:
            tail = Approach(ApproachDesc(rng.randrange(3)))
        copies = sorted(rng.sample(range(5), rng.randint(0, 3)))
        exc = tuple((n, FnPt(rng.choice(values))) for n in copies)
        return FnRep(SEQ, cod, FnLim(u, exc, tail))

    def test_gamma_labels_decide_continuous_sequences(self, rng):
        for _ in range(300):
            cod = rng.choice([FinCod(3), OmegaPlusOneCod()])
            f, g = self.sequence_fn(rng, cod), self.sequence_fn(rng, cod)
            expected = bool(fn_embeds(f, g))
            assert bool(label_leq(gamma_label(f), gamma_label(g))) == expected, (f, g)

    def test_lambda_labels_give_verified_embeddings(self, rng):
        checked = 0
        while checked < 100:
            cod = rng.choice([FinCod(3), OmegaPlusOneCod()])
            f, g = self.sequence_fn(rng, cod), self.sequence_fn(rng, cod)
            if not (is_locally_constant(f) and is_locally_constant(g)):
                continue
            checked += 1
            verdict = label_leq(lambda_label(f), lambda_label(g))
            if not verdict:
                continue
            decided = fn_embeds(f, g)
            assert decided, (f, g)
            assert _all_pass(verify_fn_at_depths(decided.witness, f, g))
            built = witness_from_labels(f, g, verdict.witness)
            assert _all_pass(verify_fn_at_depths(built, f, g))


class TestTrichotomy:
    def test_every_function_is_continuous_or_contains_d0_or_d1(self, random_fn):
        sources = {D0: d0(), D1: d1()}
        for _ in range(200):
            f = random_fn(parts=COMPACT_PARTS, periodic=True)
            kind, w = classify_discontinuous(f)
            assert (kind == CONTINUOUS) == is_continuous(f), f
            if kind == CONTINUOUS:
                assert w is None
                continue
            source = sources[kind]
            assert _all_pass(verify_fn_at_depths(w, source, f)), (kind, f)

    def test_d0_and_d1_are_incomparable(self):
        assert fn_embeds(d0(), d1()).obstruction.kind == FIBER_CARDINALITY
        assert fn_embeds(d1(), d0()).obstruction.kind == IMAGE_CARDINALITY

    def test_neither_embeds_in_a_continuous_function(self, random_fn):
        for f in _continuous_fns(random_fn, 50):
            assert not fn_embeds(d0(), f), f
            assert not fn_embeds(d1(), f), f


class TestSetRanks:
    def test_closed_sets_have_rank_one(self, random_set):
        for _ in range(50):
            _, s = random_set()
            c = closure(s)
            assert rank_delta2(c) == (0 if is_empty(c) else 1), c

    @pytest.mark.parametrize("s", [
        complement(TOP),
        SetLim(False, (), SetLim(False, (), SetPt(True))),
    ])
    def test_isolated_points_have_rank_two(self, s):
        assert rank_delta2(s) == 2

    def test_oracle_on_every_small_sequence_set(self):
        tails = [SetPt(True), SetPt(False),
                 Alt(SetPt(True), SetPt(False)), Alt(SetPt(False), SetPt(True))]
        tables = [()]
        for k in range(1, 4):
            for copies in itertools.combinations(range(4), k):
                for members in itertools.product((False, True), repeat=k):
                    tables.append(tuple((n, SetPt(m)) for n, m in zip(copies, members)))
        assert len(tables) == 65
        for inf, tail, exc in itertools.product((False, True), tails, tables):
            s = check_set(SEQ, SetLim(inf, exc, tail))
            assert rank_oracle(s) == rank_delta2(s), s

    def test_odds_against_evens_and_top(self):
        assert sep_rank(ODDS, complement(ODDS)) == 2


class TestFunctionRanks:
    def test_rank_grows_along_embeddings(self, random_fn):
        for _ in range(200):
            f = random_fn(parts=TWO_VALUED_PARTS, cod=FinCod(2))
            g = _extend(f, random_fn(parts=TWO_VALUED_PARTS, cod=FinCod(2)))
            verdict = fn_embeds(f, g)
            assert verdict, (f, g)
            assert fn_rank(f) <= fn_rank(g)

    def test_rank_respects_sampled_embeddings(self, random_fn):
        pool = [random_fn(parts=TWO_VALUED_PARTS, cod=FinCod(2)) for _ in range(20)]
        for f, g in itertools.product(pool, repeat=2):
            if fn_embeds(f, g):
                assert fn_rank(f) <= fn_rank(g), (f, g)

    def test_witness_ranks_strictly_increase(self):
        ranks = [rank_delta2(high_rank_witness(k)[1]) for k in range(1, 6)]
        assert ranks == sorted(set(ranks))

    def test_escalation(self, random_fn):
        for _ in range(50):
            f = random_fn(parts=TWO_VALUED_PARTS, cod=FinCod(2))
            g = escalate(f)
            assert fn_rank(g) > fn_rank(f)
            assert verify_fn_witness(escalation_witness(f), f, g, 5).passed


CB_CORPUS = [
    (Pt(), 1, EmptyTerm()),
    (Fin(1), 1, EmptyTerm()),
    (Fin(4), 1, EmptyTerm()),
    (Omega(), 1, EmptyTerm()),
    (Lim(Pt()), 2, Pt()),
    (lim_power(2), 3, Lim(Pt())),
    (lim_power(3), 4, lim_power(2)),
    (lim_power(5), 6, lim_power(4)),
    (PairsPlus(), 2, Pt()),
    (Sum((Pt(), Pt())), 1, EmptyTerm()),
    (Sum((Lim(Pt()), Lim(Pt()))), 2, Sum((Pt(), Pt()))),
    (Sum((Omega(), Lim(Pt()))), 2, Pt()),
    (Sum((Fin(3), lim_power(2))), 3, Lim(Pt())),
    (Lim(Fin(2)), 2, Pt()),
    (Lim(Sum((Pt(), Lim(Pt())))), 3, Lim(Pt())),
    (Lim(Lim(Fin(2))), 3, Lim(Pt())),
    (Sum((PairsPlus(), Lim(Pt()))), 2, Sum((Pt(), Pt()))),
    (Sum((lim_power(2), lim_power(2), Pt())), 3, Sum((Lim(Pt()), Lim(Pt())))),
    (Lim(Sum((Lim(Pt()), Lim(Pt())))), 3, Lim(Sum((Pt(), Pt())))),
    (Sum((Omega(), PairsPlus(), lim_power(3))), 4, Sum((Pt(), lim_power(2)))),
]


def simple_term(a, m):
    """m disjoint copies of lim^a(pt)."""
    if m == 1:
        return lim_power(a)
    return Sum((lim_power(a),) * m)


class TestCantorBendixson:
    @pytest.mark.parametrize("term, rank, derivative", CB_CORPUS)
    def test_corpus(self, term, rank, derivative):
        assert cb_rank(term) == rank
        assert cb_derivative(term, 1) == derivative
        assert cb_derivative(term, rank) == EmptyTerm()

    def test_simple_terms_follow_rank_then_multiplicity(self):
        terms = [(a, m) for a in range(5) for m in range(1, 5)]
        for (a, m), (b, n) in itertools.product(terms, repeat=2):
            s, t = simple_term(a, m), simple_term(b, n)
            verdict = space_embeds(s, t)
            assert bool(verdict) == (a < b or (a == b and m <= n)), (s, t)
            if verdict:
                depths = None if a <= 2 else [3]
                assert _all_pass(verify_at_depths(verdict.witness, s, t, depths)), (s, t)
