import pytest

from emb_engine.errors import InvalidWitness, TooFewLimitPoints, UnsupportedDomain
from emb_engine.fn_embed import verify_fn_witness
from emb_engine.fn_rep import W, evaluate
from emb_engine.graph import graph_from_edges
from emb_engine.reduction import (
    OMEGA_SQUARED,
    build_regular_pe,
    check_encodings,
    graph_fn,
    graph_to_fn_eval,
    ihom_to_fn_witness,
    lift_witness,
    pair0,
    pair1,
    pair2,
    recover_graph,
    reduce_on_space,
    reduction_check,
    restricted_graph_fn,
    unpair0,
    unpair1,
    unpair2,
    verify_regular_pe,
)
from emb_engine.space_term import Branch, Copy, Fin, Idx, InfPoint, Lim, PairsPlus, Pt, Sum


class TestPairings:
    def test_cantor(self):
        assert [pair0(0, 0), pair0(1, 0), pair0(0, 1), pair0(2, 1)] == [0, 1, 2, 7]
        assert unpair0(7) == (2, 1)

    def test_unordered(self):
        assert pair1(3, 1) == pair1(1, 3) == 4
        assert unpair1(4) == (1, 3)
        with pytest.raises(ValueError):
            pair1(2, 2)

    def test_tagged(self):
        assert pair2(1, 4, 0) == 21
        assert unpair2(21) == (1, 4, 0)
        with pytest.raises(ValueError):
            pair2(2, 0, 0)

    def test_negative(self):
        with pytest.raises(ValueError):
            pair0(-1, 0)

    def test_round_trips(self):
        assert check_encodings(5000)


class TestGraphFunction:
    def test_edge_code(self, edge01):
        assert graph_to_fn_eval(edge01, (Copy(0), Copy(1))) == 1

    def test_non_edge_code(self, edge01):
        assert graph_to_fn_eval(edge01, (Copy(0), Copy(3))) == 30

    def test_limit_points(self, edge01):
        assert graph_to_fn_eval(edge01, (Copy(2), InfPoint())) is W
        assert evaluate(graph_fn(edge01), (InfPoint(),)) is W

    def test_edge_codes_agree_from_both_ends(self, triangle):
        f = graph_fn(triangle)
        assert evaluate(f, (Copy(0), Copy(pair0(2, 0)))) == evaluate(f, (Copy(2), Copy(pair0(0, 0))))

    def test_recovery(self, rng, random_graph):
        for _ in range(20):
            g = random_graph(rng.randint(0, 6))
            assert recover_graph(graph_fn(g), g.support) == g
            assert recover_graph(restricted_graph_fn(g), g.support) == g


class TestForwardWitness:
    def test_edge_into_triangle(self, edge01, triangle):
        w = ihom_to_fn_witness({0: 1, 1: 2}, edge01, triangle)
        report = verify_fn_witness(w, graph_fn(edge01), graph_fn(triangle), 4)
        assert report.passed, report.failures

    def test_non_edge_onto_an_edge(self, triangle):
        g = graph_from_edges(3, [(0, 1), (1, 2)])
        w = ihom_to_fn_witness({0: 0, 1: 1, 2: 2}, g, triangle)
        report = verify_fn_witness(w, graph_fn(g), graph_fn(triangle), 3)
        assert report.passed, report.failures

    def test_not_an_ihom(self, edge01, triangle):
        with pytest.raises(InvalidWitness):
            ihom_to_fn_witness({0: 0, 1: 0}, edge01, triangle)


class TestRegularPE:
    def test_omega_squared_is_the_identity(self):
        pe = build_regular_pe(OMEGA_SQUARED)
        assert (pe.outer, pe.inner, pe.width) == ((), (), 1)
        assert pe.project((Copy(2), Copy(5))) == (Copy(2), Copy(5))
        assert pe.preimage((Copy(2), InfPoint())) == (Copy(2), InfPoint())

    def test_omega_cubed(self, omega3):
        pe = build_regular_pe(omega3)
        assert pe.inner == (Copy(0),)
        assert pe.project((Copy(1), Copy(3), Copy(0))) == (InfPoint(),)
        assert pe.project((Copy(1), Copy(0), Copy(4))) == (Copy(1), Copy(4))

    def test_inside_a_sum(self, omega2):
        pe = build_regular_pe(Sum((Fin(2), omega2)))
        assert pe.outer == (Branch(1),)
        assert pe.project((Branch(0), Idx(0))) == (InfPoint(),)

    @pytest.mark.parametrize("term", [Fin(5), Lim(Pt()), PairsPlus()])
    def test_too_few_limit_points(self, term):
        with pytest.raises(TooFewLimitPoints):
            build_regular_pe(term)

    def test_pairs_summand(self, omega2):
        with pytest.raises(UnsupportedDomain):
            build_regular_pe(Sum((PairsPlus(), omega2)))

    @pytest.mark.parametrize("depth", [2, 3])
    def test_regularity(self, omega2, omega3, depth):
        assert verify_regular_pe(build_regular_pe(omega2), depth).passed
        assert verify_regular_pe(build_regular_pe(omega3), depth).passed

    def test_reduced_function(self, omega3, triangle):
        pe = build_regular_pe(omega3)
        f = reduce_on_space(triangle, omega3, pe)
        assert recover_graph(f, 3, pe) == triangle

    def test_lifted_witness(self, omega3, edge01, triangle):
        pe = build_regular_pe(omega3)
        w = lift_witness(ihom_to_fn_witness({0: 2, 1: 0}, edge01, triangle), pe)
        fg, fh = reduce_on_space(edge01, omega3, pe), reduce_on_space(triangle, omega3, pe)
        report = verify_fn_witness(w, fg, fh, 2)
        assert report.passed, report.failures


class TestReductionCheck:
    def test_yes(self, edge01, triangle):
        report = reduction_check(edge01, triangle, OMEGA_SQUARED, 3)
        assert report["ihom"] == "yes"
        assert report["forwardWitnessVerified"] is True
        assert report["biconditionalHolds"] is True

    def test_no(self, triangle, four_cycle, omega3):
        report = reduction_check(triangle, four_cycle, omega3, 3)
        assert report["ihom"] == "no"
        assert report["recoveryConsistent"] is True
        assert report["obstruction"]["kind"] == "NoInjectiveHomomorphism"

    def test_identity(self, four_cycle):
        assert reduction_check(four_cycle, four_cycle, OMEGA_SQUARED, 3)["biconditionalHolds"]
