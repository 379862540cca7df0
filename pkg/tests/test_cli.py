import json
import math
from pathlib import Path

import pytest

from kgraphkms import ParseError, parse_input, input_to_json, emit_report
from kgraphkms.cli import main
from kgraphkms.formats import format_number

DATA = Path(__file__).parent / "data"
EX1 = str(DATA / "example1.json")
EX2 = str(DATA / "example2.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_example_fixture_parses(self):
        doc = parse_input(Path(EX1).read_text())
        assert doc.vertices == ("u", "v", "w")
        assert doc.dynamics_type == "preferred"
        assert doc.rationally_independent
        assert doc.warnings == ()

    def test_empty_vertices_rejected(self):
        with pytest.raises(ParseError, match="vertices"):
            parse_input('{"vertices": [], "matrices": [[[1]]]}')

    def test_json_error_carries_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_input('{\n  "vertices": [,]\n}')

    def test_explicit_dynamics_fields(self):
        doc = parse_input(
            json.dumps(
                {
                    "vertices": ["a"],
                    "matrices": [[[2]], [[3]]],
                    "dynamics": {"type": "explicit", "r": [1.0, 2.0], "normalize": False},
                }
            )
        )
        assert doc.r == (1.0, 2.0)
        assert not doc.normalize
        assert any("independence" in w for w in doc.warnings)

    def test_bad_dynamics_rejected(self):
        base = {"vertices": ["a"], "matrices": [[[2]]]}
        with pytest.raises(ParseError, match="dynamics.r"):
            parse_input(json.dumps({**base, "dynamics": {"type": "explicit", "r": [1.0, 2.0]}}))
        with pytest.raises(ParseError, match="dynamics.type"):
            parse_input(json.dumps({**base, "dynamics": {"type": "weird"}}))

    def test_round_trip_byte_stable(self):
        text = Path(EX1).read_text()
        once = input_to_json(parse_input(text))
        twice = input_to_json(parse_input(once))
        assert once == twice


class TestFormatting:
    def test_rational_snap(self):
        assert format_number(0.5) == "1/2"
        assert format_number(5 / 11) == "5/11"
        assert format_number(2.0) == "2"

    def test_irrational_not_snapped(self):
        assert format_number(math.log(4) / math.log(5)).startswith("≈")
        assert format_number(math.pi).startswith("≈")

    def test_emit_report_formats(self):
        report = {"section": {"value": 0.25, "items": [1, 2]}}
        as_json = emit_report(report, "json")
        assert json.loads(as_json) == report
        as_text = emit_report(report, "text")
        assert "== section ==" in as_text
        assert "1/4" in as_text


class TestCommands:
    def test_validate_ok(self, capsys):
        code, out, _ = run(capsys, "validate", EX1)
        assert code == 0
        payload = json.loads(out)
        assert payload["validation"]["passed"]

    def test_validate_catches_commutation(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "vertices": ["v", "w"],
                    "matrices": [[[1, 1], [0, 2]], [[1, 2], [0, 2]]],
                }
            )
        )
        code, out, _ = run(capsys, "validate", str(bad))
        assert code == 2
        payload = json.loads(out)
        rules = {v["rule"] for v in payload["validation"]["violations"]}
        assert "colour-commutation" in rules

    def test_components_report(self, capsys):
        code, out, _ = run(capsys, "components", EX1)
        assert code == 0
        payload = json.loads(out)
        assert payload["components"]["order"] == [["u"], ["v"], ["w"]]
        assert payload["assumptions"]["all_pass"]

    def test_spectra_report(self, capsys):
        code, out, _ = run(capsys, "spectra", EX2)
        assert code == 0
        payload = json.loads(out)
        assert payload["spectra"]["global_radii"] == [11.0, 13.0]

    def test_kms_at_one(self, capsys):
        code, out, _ = run(capsys, "kms", EX1, "--beta", "1")
        assert code == 0
        payload = json.loads(out)
        assert payload["kms"]["extreme_count"] == 3
        vectors = sorted(
            tuple(round(s["m"][l], 9) for l in ("u", "v", "w"))
            for s in payload["kms"]["extreme_states"]
        )
        assert vectors == sorted(
            [
                (0.5, 0.0, 0.5),
                (round(5 / 11, 9), round(6 / 11, 9), 0.0),
                (1.0, 0.0, 0.0),
            ]
        )

    def test_kms_below_terminal_is_empty(self, capsys):
        code, out, _ = run(capsys, "kms", EX1, "--beta", "0.3")
        assert code == 0
        assert json.loads(out)["kms"]["extreme_count"] == 0

    def test_phase_contains_symbolic_value(self, capsys):
        code, out, _ = run(capsys, "phase", EX1)
        assert code == 0
        payload = json.loads(out)
        betas = payload["phase"]["critical_betas"]
        assert [b["symbolic"] for b in betas] == ["1", "ln(4)/ln(5)", "ln(2)/ln(4)"]
        assert betas[1]["value"] == pytest.approx(math.log(4) / math.log(5), abs=1e-15)
        assert payload["phase"]["terminal_beta"] == pytest.approx(0.5)

    def test_phase_text_format(self, capsys):
        code, out, _ = run(capsys, "phase", EX1, "--format", "text")
        assert code == 0
        assert "ln(4)/ln(5)" in out
        assert "5/11" in out

    def test_isolated_graph_refused_without_flag(self, capsys, tmp_path):
        doc = tmp_path / "two.json"
        doc.write_text(
            json.dumps(
                {
                    "vertices": ["a", "b"],
                    "matrices": [[[2, 0], [0, 3]], [[2, 0], [0, 3]]],
                }
            )
        )
        code, _, _ = run(capsys, "kms", str(doc), "--beta", "1")
        assert code == 2
        code, out, _ = run(capsys, "kms", str(doc), "--beta", "1", "--allow-violations")
        assert code == 0
        assert json.loads(out)["kms"]["extreme_count"] == 2

    def test_dumbbell_emits_parseable_document(self, capsys):
        code, out, _ = run(
            capsys, "dumbbell", "--figure", "3", "--params", "5,3,10,13,11,9,1,2,1,1"
        )
        assert code == 0
        doc = parse_input(out)
        assert doc.vertices == ("u", "v", "w")
        assert doc.matrices[0][0] == (5, 1, 1)

    def test_dumbbell_figure2_accepted(self, capsys):
        code, out, _ = run(capsys, "dumbbell", "--figure", "2", "--params", "2,2,3,3,1,1")
        assert code == 0
        doc = parse_input(out)
        assert doc.matrices == (((2, 1), (0, 3)), ((2, 1), (0, 3)))

    def test_dumbbell_rejection_exits_2(self, capsys):
        code, out, _ = run(capsys, "dumbbell", "--figure", "2", "--params", "1,1,2,2,1,2")
        assert code == 2
        assert "bridge" in json.loads(out)["dumbbell"]["relation"]

    def test_fuzz_clean(self, capsys):
        code, out, _ = run(capsys, "fuzz", "--seed", "3", "--count", "25")
        assert code == 0
        payload = json.loads(out)
        assert payload["fuzz"]["samples"] == 25
        assert payload["fuzz"]["contradictions"] == []

    def test_parse_error_exit_code(self, capsys, tmp_path):
        bad = tmp_path / "broken.json"
        bad.write_text("{nope")
        code, _, err = run(capsys, "validate", str(bad))
        assert code == 1
        assert "input error" in err

    def test_stdin_input(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(Path(EX1).read_text()))
        code, out, _ = run(capsys, "validate", "-")
        assert code == 0
        assert json.loads(out)["validation"]["passed"]
