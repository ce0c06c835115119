import io
from importlib.resources import files
import json
from fractions import Fraction

import pytest

from tatebound.cli import (
    CorpusError,
    RunConfig,
    emit_json,
    exit_code,
    load_corpus,
    main,
    parse_n_range,
    render_text,
    run,
    run_corpus,
    summarize,
)

from conftest import CORPUS, gens


def config(label, n_max=3, **kw):
    coeffs, pts, p = CORPUS[label]
    return RunConfig(tuple(map(Fraction, coeffs)), gens(pts), p, 1, n_max, **kw)


@pytest.fixture(scope="module")
def report_10082():
    return run(config("10082"))


def test_parse_n_range():
    assert parse_n_range("3") == (3, 3)
    assert parse_n_range("1..5") == (1, 5)


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig((0, 0, 0, 1, 1), (), 4)
    with pytest.raises(ValueError):
        RunConfig((0, 0, 0, 1, 1), (), 3, 3, 2)


def test_report_shape(report_10082):
    r = report_10082
    assert r["schema"] == 1 and r["status"] == "ok" and exit_code(r) == 0
    assert r["local"]["conductor"] == 10082
    assert r["local"]["discriminant_factorization"] == [1, [2, 3], [71, 3]]
    assert [row["kappa_lower_bound"] for row in r["theorem1"]] == [0, 4, 6]
    assert all(row["claim"].startswith("2^") for row in r["theorem1"])
    assert r["theorem1"][0]["vacuous"]
    text = render_text(r)
    assert "10082" in text


def test_json_is_deterministic(report_10082):
    a = emit_json(report_10082)
    b = emit_json(run(config("10082")))
    assert a == b
    assert json.loads(a) == json.loads(emit_json(json.loads(a)))


def test_summary_keys(report_10082):
    s = summarize(report_10082)
    assert s["raw_bound"] == {"1": 0, "2": 4, "3": 6}
    assert s["sqrt_q"] == -2 and s["zeta4_in_L1"] is True


def test_main_exit_codes(capsys):
    assert main(["--curve", "1,0,0,543,10026", "--gens", "(-13,35);(39,282)", "--p", "3", "--n", "1..2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [row["kappa_lower_bound"] for row in out["theorem1"]] == [2, 4]
    # additive at 2
    assert main(["--curve", "0,0,0,-1,0", "--p", "2", "--n", "1", "--no-image-check"]) == 2
    assert main(["--curve", "0,0,0,-1", "--p", "2"]) == 1
    assert main(["--p", "2"]) == 1
    assert "required" in capsys.readouterr().err


def test_verify_group_theory_flag(capsys):
    assert main(["--verify-group-theory"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["submodule_lattice"]["ok"] and out["H_structure"]["ok"]


def _write(tmp_path, lines):
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_corpus_mismatch_names_field(tmp_path):
    entry = {
        "label": "13467-bad",
        "curve": [1, 0, 0, 543, 10026],
        "generators": "(-13,35);(39,282)",
        "p": 3,
        "n": [1, 2],
        "expected": {"discriminant": -53279263160, "conductor": 13467},
        "source": {"discriminant": "deliberately wrong"},
    }
    out = io.StringIO()
    assert run_corpus(_write(tmp_path, [json.dumps(entry)]), out=out) == 1
    text = out.getvalue()
    assert "discriminant: expected -53279263160, computed -53279263161" in text
    assert "[source: deliberately wrong]" in text
    assert "conductor" not in text.split("FAIL", 1)[1].split("\n", 2)[1]


def test_empty_corpus(tmp_path):
    out = io.StringIO()
    assert run_corpus(_write(tmp_path, ["# nothing here"]), out=out) == 0
    assert "warning" in out.getvalue()


def test_malformed_corpus_reports_line(tmp_path):
    path = _write(tmp_path, ['{"label": "a", "curve": [0,0,0,1,1], "p": 5}', "{not json"])
    with pytest.raises(CorpusError, match=":2:"):
        load_corpus(path)
    assert main(["--corpus", str(path)]) == 1


def test_shipped_corpus_loads():
    entries = load_corpus(files("tatebound") / "data" / "corpus.jsonl")
    assert [e.label for e in entries] == ["10082", "15650", "13467"]
    assert all(e.source for e in entries)
