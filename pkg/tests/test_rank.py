import pytest

from emb_engine.errors import BoundExceeded, NotDisjoint, UnsupportedFn
from emb_engine.fn_embed import verify_fn_witness
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
    constant_fn,
    d0,
)
from emb_engine.rank import (
    class_separators,
    difference_chain,
    escalate,
    escalation_witness,
    fn_rank,
    high_rank_witness,
    rank_delta2,
    rank_oracle,
    sep_rank,
    sep_rank_oracle,
    separation_chain,
)
from emb_engine.set_rep import (
    Alt,
    SetFin,
    SetLim,
    SetPt,
    complement,
    constant_set,
    difference,
    indicator,
    intersect,
    is_empty,
)
from emb_engine.space_term import Branch, InfPoint, Lim, Pt, Sum, lim_power

SEQ = Lim(Pt())
ODDS = SetLim(False, (), Alt(SetPt(False), SetPt(True)))
EVENS = SetLim(False, (), Alt(SetPt(True), SetPt(False)))
TOP = SetLim(True, (), SetPt(False))


class TestSeparation:
    def test_top_point_against_the_rest(self):
        assert sep_rank(TOP, complement(TOP)) == 1

    def test_odds_against_evens_and_top(self):
        assert sep_rank(ODDS, complement(ODDS)) == 2
        chain = separation_chain(ODDS, complement(ODDS))
        assert chain[-1] == TOP

    def test_odds_against_evens(self):
        assert sep_rank(ODDS, EVENS) == 1

    def test_sets_must_be_disjoint(self):
        with pytest.raises(NotDisjoint):
            sep_rank(ODDS, constant_set(SEQ, True))

    def test_separators(self):
        seps = list(class_separators(ODDS, EVENS))
        assert len(seps) == 2
        for c in seps:
            assert is_empty(intersect(c, EVENS))
            assert is_empty(difference(ODDS, c))
        assert min(rank_delta2(c) for c in seps) == sep_rank(ODDS, EVENS)


class TestDelta2Rank:
    @pytest.mark.parametrize("s, rank", [
        (constant_set(SEQ, False), 0),
        (constant_set(SEQ, True), 1),
        (TOP, 1),
        (ODDS, 2),
        (complement(TOP), 2),
    ])
    def test_ranks(self, s, rank):
        assert rank_delta2(s) == rank
        assert len(difference_chain(s)) == rank

    @pytest.mark.parametrize("s", [TOP, ODDS, complement(TOP), EVENS])
    def test_oracle_agrees(self, s):
        assert rank_oracle(s) == rank_delta2(s)

    def test_separation_oracle_agrees(self):
        assert sep_rank_oracle(ODDS, EVENS) == 1
        assert sep_rank_oracle(ODDS, complement(ODDS)) == 2

    def test_oracle_class_limit(self):
        with pytest.raises(BoundExceeded):
            rank_oracle(SetFin((True,) * 13))


class TestFunctionRank:
    def test_d0(self):
        assert fn_rank(d0()) == 2

    def test_odds_indicator(self):
        assert fn_rank(indicator(SEQ, FinCod(2), ODDS)) == 2

    def test_constant(self, omega2):
        assert fn_rank(constant_fn(omega2, FinCod(2), 1)) == 1

    def test_infinite_image(self):
        f = FnRep(SEQ, OmegaPlusOneCod(), FnLim(W, (), Approach(ApproachDesc(0))))
        with pytest.raises(UnsupportedFn):
            fn_rank(f)


class TestWitnesses:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_ranks_grow(self, k):
        term, s = high_rank_witness(k)
        assert term == lim_power(k)
        assert rank_delta2(s) == k + 1

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_oracle_agrees(self, k):
        _, s = high_rank_witness(k)
        assert rank_oracle(s) == k + 1

    @pytest.mark.parametrize("k", [0, 7])
    def test_bound(self, k):
        with pytest.raises(BoundExceeded):
            high_rank_witness(k)


class TestEscalate:
    def test_d0(self):
        g = escalate(d0())
        assert g.domain == Sum((SEQ, lim_power(2)))
        assert fn_rank(g) == 3

    def test_constant(self):
        g = escalate(constant_fn(SEQ, FinCod(2), 0))
        assert g.domain == Sum((SEQ, SEQ))
        assert fn_rank(g) == 2

    def test_repeated(self):
        g = escalate(escalate(d0()))
        assert fn_rank(g) == 4

    def test_original_embeds(self):
        f = d0()
        g = escalate(f)
        w = escalation_witness(f)
        assert w.sigma((InfPoint(),)) == (Branch(0), InfPoint())
        assert verify_fn_witness(w, f, g, 5).passed

    def test_needs_two_values_at_most(self):
        f = FnRep(Sum((SEQ, Pt())), FinCod(3), FnSum((FnLim(1, (), Const(0)), FnPt(2))))
        with pytest.raises(UnsupportedFn):
            escalate(f)
