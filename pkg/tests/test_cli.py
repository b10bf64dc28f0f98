import json
from fractions import Fraction
from pathlib import Path

import pytest

from polylip.cli import (
    EXIT_INPUT,
    EXIT_OK,
    InputError,
    emit_json,
    main,
    parse_instance_text,
    parse_rational,
    run_queries,
)

ROOT = Path(__file__).resolve().parent.parent
AXIS_FILE = ROOT / "instances" / "axis_target.json"
GAP_FILE = ROOT / "instances" / "support_gap.json"


def write(tmp_path, doc, name="inst.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


def base_doc(**extra):
    doc = {
        "dims": {"ambient": 2},
        "sets": {"Box": {"hrep": {"A": [[1, 0], [-1, 0], [0, 1], [0, -1]], "b": [1, 1, 1, 1]}},
                 "F": {"vrep": {"vertices": [[1, 0], [0, 1]]}}},
        "points": {"p": [0, 0], "q": ["3", "1/2"]},
        "queries": [],
    }
    doc.update(extra)
    return doc


class TestRationals:
    @pytest.mark.parametrize("text,value", [(3, Fraction(3)), ("-2/4", Fraction(-1, 2)), ("7", Fraction(7))])
    def test_accepted(self, text, value):
        assert parse_rational(text, "p") == value

    @pytest.mark.parametrize("bad", [0.5, True, "1/0", "abc", None, [1]])
    def test_rejected(self, bad):
        with pytest.raises(InputError):
            parse_rational(bad, "p")


class TestParsing:
    def test_unknown_top_level_key(self):
        with pytest.raises(InputError):
            parse_instance_text(json.dumps(base_doc(extra=1)))

    def test_dimension_mismatch(self):
        doc = base_doc(points={"p": [0, 0, 0]},
                       queries=[{"id": "d", "op": "distance", "args": {"Omega": "Box", "x": "p"}}])
        with pytest.raises(InputError):
            parse_instance_text(json.dumps(doc))

    def test_dangling_name(self):
        doc = base_doc(queries=[{"id": "d", "op": "distance", "args": {"Omega": "Nope", "x": "p"}}])
        with pytest.raises(InputError):
            parse_instance_text(json.dumps(doc))

    def test_unknown_op(self):
        doc = base_doc(queries=[{"id": "d", "op": "teleport", "args": {}}])
        with pytest.raises(InputError):
            parse_instance_text(json.dumps(doc))

    def test_exit_code_for_bad_rational(self, tmp_path, capsys):
        doc = base_doc(points={"p": ["1/0", 0]})
        assert main(["eval", write(tmp_path, doc)]) == EXIT_INPUT
        assert "error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["eval", str(tmp_path / "absent.json")]) == EXIT_INPUT


class TestReports:
    def test_empty_query_list(self):
        inst = parse_instance_text(json.dumps(base_doc()))
        report, code = run_queries(inst)
        assert code == EXIT_OK and report["results"] == []
        assert report["schema_version"] == 1

    def test_values_and_projection(self):
        doc = base_doc(queries=[
            {"id": "d", "op": "distance", "args": {"Omega": "Box", "x": "q"}},
            {"id": "d1", "op": "distance", "args": {"Omega": "Box", "x": "q"}, "options": {"norm": "1"}},
            {"id": "g", "op": "gauge", "args": {"F": "F", "x": "q"}},
            {"id": "mp", "op": "metric_projection", "args": {"Omega": "Box", "x": "q"}},
        ])
        report, code = run_queries(parse_instance_text(json.dumps(doc)))
        res = {r["id"]: r for r in report["results"]}
        assert code == EXIT_OK
        assert res["d"]["value"] == {"finite": "2"}
        assert res["d1"]["value"] == {"finite": "2"}
        assert res["g"]["value"] == {"finite": "7/2"}
        assert res["mp"]["point"] == ["1", "1/2"] and res["mp"]["squared_distance"] == "4"

    def test_out_of_domain_query(self):
        doc = base_doc(points={"p": [-1, 0]}, queries=[
            {"id": "s", "op": "singular_subdifferential", "args": {"function": "gauge", "F": "F", "x": "p"}}])
        report, code = run_queries(parse_instance_text(json.dumps(doc)))
        assert code == EXIT_OK
        assert report["results"][0]["status"] == "out-of-domain"
        assert report["results"][0]["code"] == 3

    def test_json_round_trip(self, tmp_path, capsys):
        assert main(["check", str(AXIS_FILE), "--format", "json"]) == EXIT_OK
        out = capsys.readouterr().out
        assert emit_json(json.loads(out)) == out

    def test_byte_reproducible(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for target in (a, b):
            assert main(["verify", str(AXIS_FILE), "--format", "json", "--radii", "4",
                         "--samples", "6", "--seed", "2", "-o", str(target)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_axis_fixture_text(self, capsys):
        assert main(["check", str(AXIS_FILE)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "[time] minimal_time = 2" in out
        assert "[proj] generalized_projection = {" in out
        assert ("[out] minimal_time_criterion: LIPSCHITZ (criterion: minimal time at projection "
                "faces; sufficient only; every face cone trivial)") in out
        assert "reference fixture" in out
        assert "[at-target] minimal_time_criterion: NOT LIPSCHITZ" in out

    def test_axis_fixture_json(self):
        inst = parse_instance_text(AXIS_FILE.read_text(encoding="utf-8"))
        report, _ = run_queries(inst, "check")
        res = {r["id"]: r for r in report["results"]}
        assert res["time"]["value"] == {"finite": "2"}
        assert res["proj"]["set"]["text"] in (["x2 = 0", "x1 = 0"], ["x1 = 0", "x2 = 0"])
        assert res["out"]["verdict"]["conclusion"] == "sufficient-condition-holds"

    def test_gap_instance_escalates(self):
        inst = parse_instance_text(GAP_FILE.read_text(encoding="utf-8"))
        report, _ = run_queries(inst, "check")
        exact = {o["query"]: o["exact"] for o in report["oracle"] if "exact" in o}
        assert exact["out"]["lipschitz"] is False
        assert exact["inside"]["lipschitz"] is True

    def test_sufficient_failure_reports_escalation(self, tmp_path, capsys):
        doc = base_doc(
            sets={"Pt": {"hrep": {"A": [[1, 0], [0, 1]], "b": [0, 0], "kinds": ["=", "="]}},
                  "F": {"vrep": {"vertices": [[0, 0], [0, 1]]}}},
            points={"y": [0, -2]},
            queries=[{"id": "mt", "op": "minimal_time_criterion", "args": {"F": "F", "Omega": "Pt", "x": "y"}}])
        assert main(["check", write(tmp_path, doc)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "UNDECIDED (criterion: minimal time at projection faces; sufficient only; " \
               "oracle escalation: exact oracle says NOT LIPSCHITZ (point boundary))" in out


class TestPlot:
    def test_axis_svg(self, tmp_path):
        out = tmp_path / "axis.svg"
        assert main(["plot2d", str(AXIS_FILE), "--query", "out", "-o", str(out)]) == EXIT_OK
        svg = out.read_text(encoding="utf-8")
        assert svg.startswith("<svg") or svg.startswith("<?xml")
        assert "</svg>" in svg

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        for target in (a, b):
            main(["plot2d", str(AXIS_FILE), "--query", "gauge-sing", "-o", str(target)])
        assert a.read_bytes() == b.read_bytes()

    def test_three_dimensional_input_is_refused(self, tmp_path, capsys):
        doc = {"dims": {"ambient": 3},
               "sets": {"Box": {"hrep": {"A": [[1, 0, 0], [-1, 0, 0]], "b": [1, 1]}}},
               "points": {"p": [3, 0, 0]},
               "queries": [{"id": "d", "op": "distance", "args": {"Omega": "Box", "x": "p"}}]}
        out = tmp_path / "x.svg"
        assert main(["plot2d", write(tmp_path, doc), "--query", "d", "-o", str(out)]) == EXIT_INPUT
        assert "planar" in capsys.readouterr().err
        assert not out.exists()

    def test_unknown_query(self, tmp_path):
        assert main(["plot2d", str(AXIS_FILE), "--query", "nope", "-o", str(tmp_path / "n.svg")]) == EXIT_INPUT
