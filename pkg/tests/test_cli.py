import json

import pytest

from vlsidesk import cli

from conftest import CASES_DIR, load_case


def write_case(tmp_path, doc, name="case.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


RING_CASE = {
    "schema": 1,
    "analysis": "ring_analyze",
    "params": {"stages": [["50n", "50n"], ["40n", "60n"], ["50n", "50n"],
                          ["60n", "40n"], ["60n", "40n"]]},
    "meta": {"label": "五"},
}


def test_run_ring_case(tmp_path, capsys):
    rc = cli.main(["run", write_case(tmp_path, RING_CASE)])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["period"]["value"] == pytest.approx(5e-7)
    assert out["results"]["duty"]["value"] == pytest.approx(0.52)
    assert out["results"]["period"]["unit"] == "s"


def test_run_is_deterministic(tmp_path, capsys):
    path = write_case(tmp_path, RING_CASE)
    cli.main(["run", path])
    first = capsys.readouterr().out
    cli.main(["run", path])
    second = capsys.readouterr().out
    assert first == second


def test_table_format(tmp_path, capsys):
    rc = cli.main(["run", write_case(tmp_path, RING_CASE), "--format", "table"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "analysis: ring_analyze" in out
    assert "duty" in out and "0.52" in out


def test_unknown_analysis_exits_1(tmp_path, capsys):
    doc = {"schema": 1, "analysis": "warp_drive", "params": {}}
    rc = cli.main(["run", write_case(tmp_path, doc)])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "invalid_case"


def test_missing_required_field_named(tmp_path, capsys):
    doc = {"schema": 1, "analysis": "ring_design",
           "params": {"n_stages": 5, "period": "2n"}}
    rc = cli.main(["validate", write_case(tmp_path, doc)])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert "duty" in err["error"]["message"]


def test_validate_ok(tmp_path, capsys):
    rc = cli.main(["validate", write_case(tmp_path, RING_CASE)])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "OK"


def test_bad_json_exits_1(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cli.main(["run", str(p)]) == 1


def test_unreadable_file_exits_1(tmp_path):
    assert cli.main(["run", str(tmp_path / "missing.json")]) == 1


def test_violation_verdicts_still_exit_0(tmp_path, capsys):
    # a failing timing check is a successful analysis; the verdict is data
    case = load_case("timing_pipeline_stage_check")
    rc = cli.main(["run", write_case(tmp_path, case)])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    edge = out["results"]["edges"]["value"][0]
    assert edge["setup_violation"] and edge["hold_violation"]


def test_analysis_error_exits_2(tmp_path, capsys):
    doc = {"schema": 1, "analysis": "ring_design",
           "params": {"n_stages": 5, "period": "2n", "duty": 0.05}}
    rc = cli.main(["run", write_case(tmp_path, doc)])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["code"] == "analysis_error"


def test_wrong_schema_version_rejected(tmp_path):
    doc = dict(RING_CASE, schema=2)
    assert cli.main(["validate", write_case(tmp_path, doc)]) == 1


def test_extra_param_rejected(tmp_path):
    doc = {"schema": 1, "analysis": "gray_code",
           "params": {"n_bits": 3, "bogus": 1}}
    assert cli.main(["validate", write_case(tmp_path, doc)]) == 1


def test_si_suffix_strings_accepted(tmp_path, capsys):
    doc = {"schema": 1, "analysis": "wire_rc",
           "params": {"length": "9", "width": "0.375m",
                      "r_sheet": 0.025, "c_fringe_per_edge": "50f",
                      "fringe_edges": 1}}
    rc = cli.main(["run", write_case(tmp_path, doc)])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["results"]["r"]["value"] == pytest.approx(600.0)


def test_bad_quantity_string_exits_1(tmp_path):
    doc = {"schema": 1, "analysis": "gray_code", "params": {"n_bits": 3}}
    doc["params"] = {"n_bits": 3}
    ok = cli.main(["validate", write_case(tmp_path, doc)])
    assert ok == 0
    doc2 = {"schema": 1, "analysis": "wire_rc",
            "params": {"length": "9zz", "width": 1, "r_sheet": 1}}
    rc = cli.main(["run", write_case(tmp_path, doc2)])
    assert rc == 1  # a bad quantity string is malformed input


def test_list_command(capsys):
    rc = cli.main(["list"])
    assert rc == 0
    listing = json.loads(capsys.readouterr().out)
    assert "ring_analyze" in listing
    assert "elmore" in listing
    assert listing["gray_code"]["properties"]["n_bits"]["type"] == "integer"


def test_float_formatting_six_significant_digits(tmp_path, capsys):
    doc = {"schema": 1, "analysis": "charge_share_voltage",
           "params": {"c_out": 1.0, "c_exposed": [2.0], "v_dd": 1.0}}
    cli.main(["run", write_case(tmp_path, doc)])
    out = capsys.readouterr().out
    assert "0.333333" in out


def test_every_shipped_case_validates_and_runs():
    paths = sorted(CASES_DIR.glob("*.json"))
    assert len(paths) > 50
    for p in paths:
        case = load_case(p.stem)
        assert cli.validate_case(case) == case["analysis"]
        report = cli.run_case(case)
        assert report["analysis"] == case["analysis"]


def test_shipped_cases_render_identically_twice():
    for p in sorted(CASES_DIR.glob("*.json"))[:10]:
        case = load_case(p.stem)
        a = cli.render_json(cli.run_case(case))
        b = cli.render_json(cli.run_case(case))
        assert a == b
