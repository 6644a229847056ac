import json
import shutil
import subprocess
import sys

import pytest

from monicrep.cli import EXIT_BOUNDED, EXIT_INPUT, EXIT_NEGATIVE, EXIT_POSITIVE, fixture_dir, main, run

FIX = fixture_dir()


def fx(name):
    return str(FIX / f"{name}.json")


def json_out(capsys, argv):
    code = main(argv + ["--report", "json"])
    return json.loads(capsys.readouterr().out), code


@pytest.mark.parametrize("argv, code", [
    (["check-monic", fx("example_4_2_X")], EXIT_POSITIVE),
    (["check-monic", fx("example_4_2_Y")], EXIT_NEGATIVE),
    (["check-gp", fx("example_4_2_X")], EXIT_POSITIVE),
    (["check-gp", fx("example_4_2_Y")], EXIT_NEGATIVE),
    (["check-gp", fx("non_gorenstein")], EXIT_BOUNDED),
    (["check-gp", fx("triangular_t3"), "--rep", "M"], EXIT_POSITIVE),
    (["check-monic", fx("triangular_t3"), "--rep", "N"], EXIT_NEGATIVE),
    (["coker-phi", fx("example_4_2_X")], EXIT_POSITIVE),
    (["coker-phi", fx("example_4_2_Y")], EXIT_INPUT),
    (["window", fx("example_4_2_X"), "-N", "2"], EXIT_POSITIVE),
    (["window", fx("example_4_2_Y")], EXIT_NEGATIVE),
    (["algebra-info", fx("non_gorenstein")], EXIT_POSITIVE),
])
def test_exit_codes(argv, code):
    assert run(argv)[1] == code


def test_check_monic_report(capsys):
    doc, code = json_out(capsys, ["check-monic", fx("example_4_2_Y")])
    ff = doc["result"]["monic"]["first_failure"]
    assert (ff["vertex"], ff["condition"]) == ("1", "m2")
    assert doc["inputs"][0]["file"] == "example_4_2_Y.json"
    assert len(doc["inputs"][0]["sha256"]) == 64
    assert doc["exit_code"] == code == EXIT_NEGATIVE


def test_bounded_verdict_names_bound(capsys):
    doc, _ = json_out(capsys, ["check-gp", fx("non_gorenstein"), "--bound", "4"])
    v = doc["result"]["verdict"]
    assert v["status"] == "GPUpToBound" and v["bound"] == 4 and doc["bound"] == 4


def test_window_failure_stage(capsys):
    doc, _ = json_out(capsys, ["window", fx("example_4_2_Y")])
    assert doc["result"]["failed_stage"] == "phi-injectivity"


def test_json_reports_are_byte_identical(capsys):
    outs = []
    for _ in range(2):
        main(["check-gp", fx("example_4_2_X"), "--report", "json"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "wall_clock_s" not in outs[0]


def test_timing_flag_adds_wall_clock(capsys):
    doc, _ = json_out(capsys, ["check-monic", fx("example_4_2_X"), "--timing"])
    assert doc["wall_clock_s"] >= 0


def test_text_report(capsys):
    code = main(["check-monic", fx("example_4_2_X")])
    out = capsys.readouterr().out
    assert "monic: yes" in out and out.rstrip().endswith(f"exit: {code}")


def test_malformed_input_reports_location(tmp_path, capsys):
    doc = json.loads((FIX / "example_4_2_X.json").read_text())
    doc["representations"]["X"]["arrows"]["alpha"] = [[1, 0]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    out, code = json_out(capsys, ["check-monic", str(bad)])
    assert code == EXIT_INPUT
    assert "alpha" in json.dumps(out["error"])

    bad.write_text("{ not json")
    out, code = json_out(capsys, ["check-monic", str(bad)])
    assert code == EXIT_INPUT and out["error"]["where"]


def test_missing_file_is_an_input_error(tmp_path):
    assert run(["check-monic", str(tmp_path / "absent.json")])[1] == EXIT_INPUT


def _quiver_file(tmp_path, name, n):
    vertices = [str(i + 1) for i in range(n)]
    arrows = [{"name": f"a{i}", "source": str(i + 1), "target": str(i)} for i in range(1, n)]
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps({"vertices": vertices, "arrows": arrows}))
    return str(p)


def test_quiver_tensor(tmp_path, capsys):
    a2, a3, pt = (_quiver_file(tmp_path, n, k) for n, k in [("a2", 2), ("a3", 3), ("pt", 1)])
    doc, code = json_out(capsys, ["quiver-tensor", a2, a2])
    r = doc["result"]
    assert (r["vertices"], r["arrows"], r["relations"], r["hereditary"]) == (4, 4, 1, False)
    assert code == EXIT_NEGATIVE
    r = json_out(capsys, ["quiver-tensor", a2, a3])[0]["result"]
    assert (r["vertices"], r["arrows"], r["relations"]) == (6, 7, 2)
    out = tmp_path / "prod.json"
    doc, code = json_out(capsys, ["quiver-tensor", a3, pt, "--out", str(out)])
    assert code == EXIT_POSITIVE and doc["result"]["hereditary"]
    written = json.loads(out.read_text())
    assert len(written["quiver"]["vertices"]) == 3 and written["relations"] == []


def test_quiver_tensor_accepts_workspace_file(capsys):
    r = json_out(capsys, ["quiver-tensor", fx("triangular_t3"), fx("sink_witness")])[0]["result"]
    assert (r["vertices"], r["arrows"]) == (6, 7)


def test_suite_without_harnesses(capsys):
    doc, code = json_out(capsys, ["suite", "--budget", "0"])
    res = doc["result"]
    assert code == EXIT_POSITIVE and res["failed"] == 0
    assert res["notes"] == ["budget 0: harnesses skipped"]
    assert {i["file"] for i in doc["inputs"]} == {p.name for p in FIX.glob("*.json")}


def test_suite_names_corrupted_fixture(tmp_path, capsys):
    for p in FIX.glob("*.json"):
        shutil.copy(p, tmp_path / p.name)
    (tmp_path / "sink_witness.json").write_text('{"quivers": ')
    doc, code = json_out(capsys, ["suite", "--budget", "0", "--fixtures", str(tmp_path)])
    failed = [i["item"] for i in doc["result"]["items"] if not i["ok"]]
    assert code == EXIT_NEGATIVE and failed == ["sink_witness"]


def test_suite_changed_expectation_fails(tmp_path, capsys):
    p = FIX / "example_4_2_X.json"
    doc = json.loads(p.read_text())
    doc["expected"][0]["exit"] = 1
    (tmp_path / p.name).write_text(json.dumps(doc))
    out, code = json_out(capsys, ["suite", "--budget", "0", "--fixtures", str(tmp_path)])
    assert code == EXIT_NEGATIVE and out["result"]["failed"] == 1


def test_full_suite_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        main(["suite", "--report", "json", "--budget", "200"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["exit_code"] == EXIT_POSITIVE and doc["seed"] == 0


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "monicrep.cli", "check-monic", fx("sink_witness")],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_POSITIVE and "monic: yes" in proc.stdout
