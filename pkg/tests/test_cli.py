import json

import pytest

from queens_completion.board import PartialConfig, is_valid_partial
from queens_completion.cli import main
from queens_completion.constructions import third_construction
from queens_completion.certificates import dump_certificate, min_cover_value
from queens_completion.formats import dump_board


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def records(text):
    return [json.loads(line) for line in text.splitlines()]


def test_complete_nauck_board(capsys):
    code, out, _ = run(capsys, "complete", "--board", "b4,d5", "--n", "8", "--format", "structured")
    assert code == 0
    board = next(r for r in records(out) if r["record"] == "completion")
    assert [4, 2] in board["queens"] and [5, 4] in board["queens"]
    assert is_valid_partial([tuple(q) for q in board["queens"]], 8) and len(board["queens"]) == 8


def test_complete_n3_incompletable(capsys):
    code, out, _ = run(capsys, "complete", "--n", "3")
    assert code == 2 and "incompletable (exhaustive)" in out


def test_pipeline_is_byte_deterministic(capsys):
    args = ("complete", "--n", "200", "--strategy", "pipeline", "--seed", "7", "--format", "structured")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0 and out1 == out2
    assert records(out1)[-1]["status"] == "completed"


def test_budget_is_inconclusive(capsys):
    code, out, _ = run(capsys, "complete", "--n", "12", "--board", "a1,b3", "--strategy", "exact",
                       "--budget-nodes", "1")
    assert code in (0, 3)


def test_count(capsys):
    assert run(capsys, "count", "--n", "8", "--board", "b4,d5")[1].startswith("2 completions")
    assert run(capsys, "count", "--n", "4")[1].startswith("2 completions")
    full = "b1,d2,a3,c4"
    assert run(capsys, "count", "--n", "4", "--board", full)[1].startswith("1 completions")


def test_count_refuses_large_n_without_cap(capsys):
    code, _, err = run(capsys, "count", "--n", "14")
    assert code == 1 and "ceiling" in err
    code, out, _ = run(capsys, "count", "--n", "14", "--cap", "3")
    assert code == 0 and "3 completions" in out


def test_parse_error_has_position(capsys, tmp_path):
    code, _, err = run(capsys, "complete", "--n", "8", "--board", "b4,q9")
    assert code == 1 and "line 1, column 4" in err
    bad = tmp_path / "board.json"
    bad.write_text('{"n": 8,\n "queens": [[1,2],,]}')
    code, _, err = run(capsys, "complete", "--file", str(bad))
    assert code == 1 and "line 2" in err


def test_file_input(capsys, tmp_path):
    path = tmp_path / "b.json"
    path.write_text(dump_board(PartialConfig(8, [(4, 2), (5, 4)])))
    assert run(capsys, "count", "--file", str(path))[0] == 0


def test_certify_third_construction(capsys, tmp_path):
    code, out, _ = run(capsys, "certify", "--n", "12", "--board", "f5,h6,e7,g8", "--format", "structured")
    assert code == 2
    recs = records(out)
    assert recs[-1]["status"] == "certified" and recs[0]["record"] == "certificate"


def test_certify_completable(capsys):
    code, out, _ = run(capsys, "certify", "--n", "8", "--board", "b4,d5")
    assert code == 0 and "no certificate exists" in out


def test_certify_no_lp_certificate_path(capsys):
    # a small incompletable board whose LP is still feasible
    code, out, _ = run(capsys, "certify", "--n", "6", "--board", "a1,d2", "--format", "structured")
    rec = records(out)[-1]
    assert code == 2 and rec["status"] in ("certified", "no_certificate_incompletable")


def test_verify_pass_and_tamper(capsys, tmp_path):
    cfg = third_construction(12)
    text = dump_certificate(cfg, min_cover_value(cfg).dual)
    good = tmp_path / "good.json"
    good.write_text(text)
    code, out, _ = run(capsys, "certify", "--verify", str(good))
    assert code == 2 and out.startswith("PASS")
    doc = json.loads(text)
    # drop a weight-1 line and restate the value so only the cover check can fail
    doc["weights"] = doc["weights"][1:]
    doc["value"] = "5/1"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "certify", "--verify", str(bad), "--format", "structured")
    rec = records(out)[-1]
    assert code == 3 and rec["passed"] is False and "witness" in rec


def test_construct(capsys):
    code, out, _ = run(capsys, "construct", "third", "--n", "12", "--format", "structured")
    assert code == 0 and records(out)[0]["queens"] == [[5, 6], [6, 8], [7, 5], [8, 7]]
    code, out, _ = run(capsys, "construct", "near-diagonal", "--n", "7", "--format", "structured")
    assert records(out)[0]["queens"] == [[1, 2], [2, 4], [3, 6], [4, 1], [5, 3], [6, 5], [7, 7]]
    code, _, err = run(capsys, "construct", "near-diagonal", "--n", "9")
    assert code == 1 and "mod 6" in err


def test_construct_central_n0(capsys):
    code, out, _ = run(capsys, "construct", "central", "--n", "1747", "--format", "structured")
    summary = records(out)[-1]
    assert code == 2 and summary["verified"] is True and summary["value"] == "220107/166"


def test_construct_regularize_figure(capsys, tmp_path):
    code, out, _ = run(capsys, "construct", "regularize", "--n", "3", "--figures", str(tmp_path))
    assert code == 0 and (tmp_path / "weighting_n3.png").stat().st_size > 0
    assert "5/2" in out


def test_qc_scan(capsys, tmp_path):
    code, out, _ = run(capsys, "qc-scan", "--n", "6", "--format", "structured", "--figures", str(tmp_path))
    recs = [r for r in records(out) if r["record"] == "threshold"]
    assert code == 0 and {r["n"]: r["qc"] for r in recs} == {2: None, 3: None, 4: 0, 5: 1, 6: 0}
    assert (tmp_path / "qc_scan.png").exists()


def test_probe_and_embed(capsys):
    code, out, _ = run(capsys, "probe", "--n", "8", "--k", "2", "--trials", "10", "--format", "structured")
    assert code == 0 and records(out)[-1]["trials"] == 10
    code, out, _ = run(capsys, "embed", "--n", "4", "--board", "a1", "--format", "structured")
    assert code == 0 and records(out)[-1]["n_star"] == 5


def test_bench(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("QUEENS_THREADS", "2")
    args = ("bench", "lp", "--n", "4..6", "--seeds", "3", "--format", "structured")
    code, out1, _ = run(capsys, *args)
    assert code == 0
    rows = [r for r in records(out1) if r["record"] == "row"]
    assert [r["max_gap"] for r in rows] == ["0/1"] * 3
    assert run(capsys, *args)[1] == out1
    code, out, _ = run(capsys, "bench", "pipeline", "--n", "64", "--seeds", "2", "--figures", str(tmp_path))
    assert code == 0 and (tmp_path / "bench_pipeline.png").exists()


def test_usage_errors(capsys, monkeypatch):
    with pytest.raises(SystemExit) as exc:
        main(["bench"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["bench", ""])
    assert exc.value.code == 1
    assert run(capsys, "complete")[0] == 1
    monkeypatch.setenv("QUEENS_THREADS", "many")
    assert run(capsys, "bench", "lp", "--n", "4", "--seeds", "1")[0] == 1
