import json
import os

from emb_engine.report_export import save_report, to_json, to_plain, verdict_to_dict
from emb_engine.space_embed import space_embeds
from emb_engine.verdict import VerificationReport, no


def test_no_verdict():
    assert verdict_to_dict(no("EdgeCount", "3 edges into 1")) == {
        "verdict": "no", "obstruction": {"kind": "EdgeCount", "detail": "3 edges into 1"}}


def test_yes_verdict_carries_the_witness(omega1, omega2):
    plain = to_plain(space_embeds(omega1, omega2))
    assert plain["verdict"] == "yes"
    assert "kind" in plain["witness"]


def test_nested_results():
    report = {"reports": [VerificationReport(depth=2, failures=["x"])], 3: ("a", "b")}
    plain = json.loads(to_json(report))
    assert plain["reports"][0] == {"passed": False, "depth": 2, "pointsChecked": 0, "failures": ["x"]}
    assert plain["3"] == ["a", "b"]


def test_save_report(tmp_path):
    path = save_report({"rank": 3}, "space rank", str(tmp_path / "out"))
    assert os.path.basename(path).startswith("space_rank_")
    assert path.endswith(".json")
    with open(path) as f:
        assert json.load(f) == {"rank": 3}
