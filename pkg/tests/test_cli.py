import json

import pytest

from documents import sample_documents
from lmhodge.cli import main

DOCS = sample_documents()

EXPECTED = {
    "rmf": "Exists", "rmf-none": "NotExists", "admissible": "Admissible", "orbit": "Generates",
    "fan": "Fan", "fan-z1": "Fan", "fan-square": "NotFan", "weakfan": "NoViolationFound", "sigma-upsilon": "Constructed",
    "kummer": "Kummer(2)", "b1": "Computed", "build-fan": "Constructed", "probe": "Covered",
}


def run(argv, capsys):
    status = main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def write(tmp_path, name, doc):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


@pytest.mark.parametrize("name", sorted(DOCS))
def test_documents_give_definite_verdicts(name, tmp_path, capsys):
    argv, doc = DOCS[name]
    status, out, _ = run(argv + [write(tmp_path, name, doc)], capsys)
    report = json.loads(out)
    assert status == 0
    assert report["verdict"] == EXPECTED[name]
    assert report["kind"] == doc["kind"]
    assert len(report["input_digest"]) == 64


@pytest.mark.parametrize("name", ["orbit", "fan", "build-fan"])
def test_reports_are_byte_identical(name, tmp_path, capsys):
    argv, doc = DOCS[name]
    path = write(tmp_path, name, doc)
    outs = [run(argv + [path, "--threads", str(t)], capsys)[1] for t in (1, 1, 4)]
    assert outs[0] == outs[1] == outs[2]


def test_square_window_report_names_the_bad_intersection(tmp_path, capsys):
    argv, doc = DOCS["fan-square"]
    report = json.loads(run(argv + [write(tmp_path, "sq", doc)], capsys)[1])
    witness = report["fan_axiom"]["witness"]
    assert not report["fan_axiom"]["ok"] and len(witness) == 1
    assert len(witness[0]["intersection"]["generators"]) == 1


def test_out_option_writes_file(tmp_path, capsys):
    argv, doc = DOCS["b1"]
    target = tmp_path / "report.json"
    status, out, _ = run(argv + [write(tmp_path, "b1", doc), "--out", str(target)], capsys)
    assert status == 0 and out == ""
    assert json.loads(target.read_text())["verdict"] == "Computed"


def test_timings_only_on_request(tmp_path, capsys):
    argv, doc = DOCS["b1"]
    path = write(tmp_path, "b1", doc)
    assert "timings" not in json.loads(run(argv + [path], capsys)[1])
    assert "wall_seconds" in json.loads(run(argv + [path, "--timings"], capsys)[1])["timings"]


def test_window_option(tmp_path, capsys):
    argv, doc = DOCS["build-fan"]
    path = write(tmp_path, "bf", doc)
    report = json.loads(run(argv + [path, "--window", "0:1"], capsys)[1])
    assert [c["n"] for c in report["cones"]] == [[0], [1]]
    assert run(argv + [path, "--window", "3:1"], capsys)[0] == 3


@pytest.mark.parametrize("name,mutate", [
    ("rmf", lambda d: {**d, "kind": "fan"}),
    ("fan", lambda d: {**d, "payload": {**d["payload"], "cones": []}}),
    ("rmf", lambda d: {**d, "payload": {**d["payload"], "rank": -1}}),
    ("rmf", lambda d: []),
    ("kummer", lambda d: {**d, "payload": {**d["payload"], "face": [5]}}),
])
def test_malformed_documents_exit_3(name, mutate, tmp_path, capsys):
    argv, doc = DOCS[name]
    status, out, err = run(argv + [write(tmp_path, "bad", mutate(doc))], capsys)
    assert status == 3 and out == ""
    assert err.startswith(("error:", "invalid input:"))


def test_float_and_missing_file_exit_3(tmp_path, capsys):
    argv, _ = DOCS["rmf"]
    assert run(argv + [write(tmp_path, "f", '{"kind": "rmf", "payload": {"rank": 1.0}}')], capsys)[0] == 3
    assert run(argv + [str(tmp_path / "missing.json")], capsys)[0] == 3


def test_empty_cone_list_exits_3(tmp_path, capsys):
    argv, doc = DOCS["fan-z1"]
    bad = {**doc, "payload": {"cones": []}}
    status, _, err = run(argv + [write(tmp_path, "empty", bad)], capsys)
    assert status == 3 and "empty" in err


def test_corpus_command(capsys):
    status, out, _ = run(["corpus", "run", "7.1.5"], capsys)
    report = json.loads(out)
    assert status == 0 and report["verdict"] == "PASS"
    assert run(["corpus", "run", "9.9.9"], capsys)[0] == 3
