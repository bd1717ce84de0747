import pathlib

import pytest

import mgen

ROOT = pathlib.Path(__file__).resolve().parents[2]
TOY = ROOT / "fixtures" / "toy"
EVAL = ROOT / "fixtures" / "eval"


def test_render_and_placeholders():
    assert mgen.placeholders("EquivalenceDetector") == {"class_version1", "class_version2"}
    text = mgen.render("EquivalenceDetector", {"class_version1": "A", "class_version2": "B"})
    assert "```A```" in text and "`{yes}`" in text


def test_missing_binding_raises_with_code():
    with pytest.raises(mgen.MgenError) as info:
        mgen.render("EquivalenceDetector", {"class_version1": "A"})
    assert info.value.code == "UnboundPlaceholder"


def test_response_parsing():
    blocks = mgen.extract_fenced_code("x\n```kotlin\na\nb\n```\n")
    assert blocks == [{"language": "kotlin", "text": "a\nb", "unterminated": False}]
    assert mgen.extract_braced_token("{no}, because it differs") == ("no", "because it differs")
    assert mgen.extract_braced_token("not sure")[0] == "no-answer"


def test_strip_comments_keeps_literals():
    assert mgen.strip_comments('val s = "// kept" // dropped') == 'val s = "// kept"'


def test_parse_mutant_regions():
    original = "fun a() {\n  return 1\n}\n"
    reply = "```\nfun a() {\n  // MUTANT <START>\n  return 0\n  // MUTANT <END>\n}\n```"
    m = mgen.parse_mutant(reply, original)
    assert m["status"] == "Generated"
    assert m["regions"] == [(3, 3)]
    assert m["unmarked_source"] == "fun a() {\n  return 0\n}\n"


def test_score_and_rounding():
    items = [("Judge", "Equivalent", True)] * 65 + [("Judge", "Equivalent", False)] * 17
    items += [("Judge", "NonEquivalent", False)] * 205 + [("Judge", "NonEquivalent", True)] * 72
    s = mgen.score(items, "UnsureAsEquivalent")
    assert (s["tp"], s["fp"], s["tn"], s["fn"]) == (65, 17, 205, 72)
    assert mgen.round_half_up(s["precision"], 2) == pytest.approx(0.79)
    assert mgen.round_half_up(s["recall"], 2) == pytest.approx(0.47)
    assert mgen.percent_half_up(9095, 31677) == 29


def test_cli_eval_equiv_matches_fixture():
    code, out, _ = mgen.run_cli(
        ["eval-equiv", "--labels", str(EVAL / "labels.jsonl"), "--verdicts", str(EVAL / "verdicts.jsonl")]
    )
    assert code == 0
    assert out == (EVAL / "expected.txt").read_text()


def test_replay_pipeline_and_summary(tmp_path):
    out = tmp_path / "out"
    code, stdout, _ = mgen.run_cli(["pipeline", "--config", str(TOY / "config.json"), "--out", str(out)])
    assert code == 0
    assert "Mutant funnel" in stdout
    summary = mgen.summarize(str(out))
    assert summary["totals"]["certified_tests"] >= 3
    assert mgen.summary_table(str(out)) == (out / "summary.txt").read_text()
