import logging
from concurrent.futures import ProcessPoolExecutor

import pandas as pd

from . import settings
from .reduction import reduction_check
from .verdict import VerificationReport

logger = logging.getLogger(__name__)

BATCH_COLUMNS = [
    "Source", "Target", "Depth", "Ihom",
    "ForwardWitnessVerified", "RecoveryConsistent", "BiconditionalHolds",
]

SUMMARY_COLUMNS = [
    "Source", "Pairs", "YesCount", "NoCount",
    "VerifiedCount", "ConsistentCount", "BrokenCount", "Final_Flag",
]


# ============================================================
# Batch reduction checks
# ============================================================
def _check_row(job):
    i, j, g, h, t, d = job
    r = reduction_check(g, h, t, d)
    return {
        "Source": i,
        "Target": j,
        "Depth": d,
        "Ihom": r["ihom"],
        "ForwardWitnessVerified": r["forwardWitnessVerified"],
        "RecoveryConsistent": r["recoveryConsistent"],
        "BiconditionalHolds": r["biconditionalHolds"],
    }


def reduction_batch(graphs, t, d, workers=None):
    """
    Run reduction_check over every ordered pair of graphs.

    Parameters
    ----------
    graphs : list of FiniteGraph
        Graphs named by their position in the list.
    t : term
        Space the graph functions are pulled back to.
    d : int
        Verification depth.
    workers : int
        Process count; 1 runs serially. Defaults to the configured value.

    Returns
    -------
    pandas.DataFrame
        One row per (Source, Target) pair, in row-major order.
    """
    workers = workers or settings.batch_workers()
    jobs = [(i, j, g, h, t, d) for i, g in enumerate(graphs) for j, h in enumerate(graphs)]
    logger.info("reduction_batch: %d pairs, %d worker(s)", len(jobs), workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_check_row, jobs))
    else:
        rows = [_check_row(job) for job in jobs]

    return pd.DataFrame(rows, columns=BATCH_COLUMNS)


# ============================================================
# Per-source summary
# ============================================================
def final_flag(row):
    if row["BrokenCount"] > 0:
        return "Fail"
    return "Pass"


def build_reduction_summary(df):
    """One row per source graph: verdict counts and a Pass/Fail flag."""
    if df is None or df.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)

    def reduce_pairs(group):
        verdicts = group["Ihom"].tolist()
        return pd.Series({
            "Pairs": len(group),
            "YesCount": verdicts.count("yes"),
            "NoCount": verdicts.count("no"),
            "VerifiedCount": int((group["ForwardWitnessVerified"] == True).sum()),  # noqa: E712
            "ConsistentCount": int((group["RecoveryConsistent"] == True).sum()),  # noqa: E712
            "BrokenCount": int((group["BiconditionalHolds"] != True).sum()),  # noqa: E712
        })

    summary = (
        df.groupby("Source")[["Ihom", "ForwardWitnessVerified", "RecoveryConsistent",
                              "BiconditionalHolds"]]
          .apply(reduce_pairs)
          .reset_index()
    )
    summary["Final_Flag"] = summary.apply(final_flag, axis=1)
    return summary[SUMMARY_COLUMNS]


# ============================================================
# Verification reports as tables
# ============================================================
def verification_frame(reports):
    """One row per failure (or one clean row) for each report given."""
    if isinstance(reports, VerificationReport):
        reports = [reports]
    rows = []
    for r in reports:
        failures = r.failures or [""]
        for msg in failures:
            rows.append({
                "Depth": r.depth,
                "Passed": r.passed,
                "PointsChecked": r.points_checked,
                "Failure": msg,
            })
    return pd.DataFrame(rows, columns=["Depth", "Passed", "PointsChecked", "Failure"])
