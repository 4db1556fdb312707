import pytest

from emb_engine.errors import TermError, UnsupportedDomain
from emb_engine.fn_rep import (
    Approach,
    ApproachDesc,
    Const,
    FinCod,
    FnLim,
    FnRep,
    OmegaPlusOneCod,
    W,
    d0,
    evaluate,
    is_continuous,
)
from emb_engine.set_rep import (
    Alt,
    SetFin,
    SetLim,
    SetPt,
    SetSum,
    check_set,
    closure,
    complement,
    constant_set,
    contains,
    difference,
    fiber_set,
    image_values,
    indicator,
    intersect,
    is_empty,
    union,
)
from emb_engine.space_term import Copy, Fin, Idx, InfPoint, Lim, Omega, Pt, Sum

SEQ = Lim(Pt())
ODDS = SetLim(False, (), Alt(SetPt(False), SetPt(True)))
TOP = SetLim(True, (), SetPt(False))


class TestAlgebra:
    def test_complement_takes_the_top_point(self):
        assert complement(ODDS) == SetLim(True, (), Alt(SetPt(True), SetPt(False)))

    def test_union_with_complement_is_everything(self):
        assert union(ODDS, complement(ODDS)) == constant_set(SEQ, True)

    def test_intersection_with_complement_is_empty(self):
        assert is_empty(intersect(ODDS, complement(ODDS)))

    def test_difference(self):
        evens = difference(complement(ODDS), TOP)
        assert evens == SetLim(False, (), Alt(SetPt(True), SetPt(False)))

    def test_exceptions_survive(self):
        s = SetLim(False, ((0, SetPt(True)),), SetPt(False))
        assert intersect(s, ODDS) == SetLim(False, (), SetPt(False))
        assert union(s, ODDS) == SetLim(False, ((0, SetPt(True)),), Alt(SetPt(False), SetPt(True)))

    def test_sums_and_fins(self):
        t = Sum((Fin(2), Pt()))
        s = check_set(t, SetSum((SetFin((True, False)), SetPt(False))))
        assert complement(s) == SetSum((SetFin((False, True)), SetPt(True)))
        assert not is_empty(s)


class TestClosure:
    def test_infinite_set_gains_its_limit(self):
        assert closure(ODDS) == SetLim(True, (), Alt(SetPt(False), SetPt(True)))

    def test_finite_set_is_closed(self):
        s = SetLim(False, ((0, SetPt(True)),), SetPt(False))
        assert closure(s) == s

    def test_nested(self, omega2):
        s = check_set(omega2, SetLim(False, (), SetLim(False, (), SetPt(True))))
        c = closure(s)
        assert c == SetLim(True, (), SetLim(True, (), SetPt(True)))


class TestMembership:
    def test_odds(self):
        assert contains(SEQ, ODDS, (Copy(3),))
        assert not contains(SEQ, ODDS, (Copy(2),))
        assert not contains(SEQ, ODDS, (InfPoint(),))

    def test_exception_beats_tail(self):
        s = SetLim(False, ((1, SetPt(False)),), Alt(SetPt(False), SetPt(True)))
        assert not contains(SEQ, s, (Copy(1),))
        assert contains(SEQ, s, (Copy(3),))

    def test_fin(self):
        assert contains(Fin(3), SetFin((False, True, False)), (Idx(1),))


class TestValidation:
    def test_needs_compact_term(self):
        with pytest.raises(UnsupportedDomain):
            check_set(Omega(), SetPt(True))

    def test_shape_mismatch(self):
        with pytest.raises(TermError):
            check_set(Fin(2), SetFin((True,)))
        with pytest.raises(TermError):
            check_set(SEQ, SetPt(True))


class TestFunctions:
    def test_fibres_of_d0(self):
        assert fiber_set(d0(), 1) == TOP
        assert fiber_set(d0(), 0) == SetLim(False, (), SetPt(True))

    def test_infinite_image(self):
        f = FnRep(SEQ, OmegaPlusOneCod(), FnLim(W, (), Approach(ApproachDesc(0))))
        with pytest.raises(UnsupportedDomain):
            fiber_set(f, W)

    def test_image_values(self):
        assert image_values(d0()) == [0, 1]
        f = FnRep(SEQ, FinCod(3), FnLim(2, (), Const(2)))
        assert image_values(f) == [2]

    def test_indicator(self):
        f = indicator(SEQ, FinCod(2), ODDS)
        assert evaluate(f, (Copy(3),)) == 1
        assert evaluate(f, (Copy(4),)) == 0
        assert evaluate(f, (InfPoint(),)) == 0
        assert not is_continuous(f)

    def test_indicator_of_a_constant_set(self):
        f = indicator(SEQ, FinCod(2), constant_set(SEQ, True))
        assert is_continuous(f)
        assert fiber_set(f, 1) == constant_set(SEQ, True)
