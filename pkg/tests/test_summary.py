import pandas as pd

from emb_engine.reduction import OMEGA_SQUARED
from emb_engine.summary import (
    BATCH_COLUMNS,
    SUMMARY_COLUMNS,
    build_reduction_summary,
    reduction_batch,
    verification_frame,
)
from emb_engine.verdict import VerificationReport


def _row(source, target, ihom, holds):
    return {
        "Source": source, "Target": target, "Depth": 2, "Ihom": ihom,
        "ForwardWitnessVerified": holds if ihom == "yes" else None,
        "RecoveryConsistent": holds if ihom == "no" else None,
        "BiconditionalHolds": holds,
    }


def test_batch_covers_every_ordered_pair(edge01, triangle):
    df = reduction_batch([edge01, triangle], OMEGA_SQUARED, 2, workers=1)
    assert list(df.columns) == BATCH_COLUMNS
    assert list(zip(df["Source"], df["Target"])) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert df["Ihom"].tolist() == ["yes", "yes", "no", "yes"]
    assert df["BiconditionalHolds"].all()


def test_summary_of_a_batch(edge01, triangle):
    df = reduction_batch([edge01, triangle], OMEGA_SQUARED, 2, workers=1)
    summary = build_reduction_summary(df).set_index("Source")
    assert summary.loc[0, "YesCount"] == 2
    assert summary.loc[1, "NoCount"] == 1
    assert summary.loc[1, "ConsistentCount"] == 1
    assert (summary["Final_Flag"] == "Pass").all()


def test_broken_pair_fails_its_source():
    df = pd.DataFrame([
        _row(0, 0, "yes", True),
        _row(0, 1, "no", False),
        _row(1, 0, "yes", True),
    ], columns=BATCH_COLUMNS)
    summary = build_reduction_summary(df)
    assert list(summary.columns) == SUMMARY_COLUMNS
    assert summary["Final_Flag"].tolist() == ["Fail", "Pass"]
    assert summary["BrokenCount"].tolist() == [1, 0]


def test_empty_summary():
    summary = build_reduction_summary(pd.DataFrame(columns=BATCH_COLUMNS))
    assert summary.empty
    assert list(summary.columns) == SUMMARY_COLUMNS


def test_verification_frame():
    bad = VerificationReport(depth=3, failures=["a", "b"], points_checked=5)
    good = VerificationReport(depth=4, points_checked=9)
    df = verification_frame([bad, good])
    assert len(df) == 3
    assert df["Passed"].tolist() == [False, False, True]
    assert df.iloc[-1]["Failure"] == ""


def test_verification_frame_of_one_report():
    assert len(verification_frame(VerificationReport(depth=1))) == 1
