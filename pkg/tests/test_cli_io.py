import json
import os

import pytest
import yaml

from corpus import frobenius_corpus
from formalrings.cli import main
from formalrings.constructions import cycle_ring
from formalrings.errors import AlphaViolation, ParseError, UnresolvedReference, exit_codes
from formalrings.rings import zmod
from formalrings.specio import dumps_report, emit_spec, load_ring, parse_spec


def test_emit_parse_round_trip_on_corpus():
    for label, R in frobenius_corpus():
        assert load_ring(emit_spec(R)).same_tables(R), label


def test_emit_is_canonical():
    R = cycle_ring(zmod(4), n=3)
    text = emit_spec(R)
    assert emit_spec(load_ring(text)) == text


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("format_version: 1\norder: 2\nrings: [Z/4, Z/4]\nbimodules:\n  - [ring(1), zero]\n  - [zero]\n", 6),
    ("format_version: 2\norder: 1\nrings: [Z/4]\nbimodules: [[ring(1)]]\n", 1),
    ("format_version: 1\norder: 1\nrings: [Z/4]\n", 1),
    ("format_version: 1\norder: [\n", 3),
])
def test_parse_errors_are_positioned(text, line):
    with pytest.raises(ParseError) as exc:
        load_ring(text)
    assert exc.value.line == line


def test_unknown_field_is_an_unresolved_reference():
    with pytest.raises(UnresolvedReference) as exc:
        load_ring("format_version: 1\norder: 1\nrings: [GF(6)]\nbimodules: [[ring(1)]]\n")
    assert exc.value.line == 3


def test_missing_product_table_is_reported():
    R = cycle_ring(zmod(4), n=2)
    doc = yaml.safe_load(emit_spec(R))
    del doc["products"]["1,2,1"]
    text = yaml.safe_dump(doc)
    parse_spec(text)
    with pytest.raises(ParseError, match=r"missing product table for \(1,2,1\)"):
        load_ring(text)


def _corrupted_spec(tmp_path):
    from formalrings.constructions import ring_from_name

    te = ring_from_name("trivext(GF(2))")
    R = cycle_ring(te, n=2)
    doc = yaml.safe_load(emit_spec(R))
    doc["products"] = {"1,2,1": te.mul[te.mul, 1].tolist(), "2,1,2": "zero"}
    path = tmp_path / "broken.yaml"
    path.write_text(yaml.safe_dump(doc))
    return path


def test_exit_codes_are_distinct():
    codes = exit_codes()
    codes.pop("FormalRingError")
    assert len(set(codes.values())) == len(codes)
    assert 0 not in codes.values() and 2 not in codes.values()


def test_validate_command(tmp_path, capsys):
    good = tmp_path / "cycle.yaml"
    assert main(["generate", "cycle", "--base", "Z/4", "--n", "3", "-o", str(good)]) == 0
    assert main(["validate", str(good)]) == 0
    assert main(["validate", str(_corrupted_spec(tmp_path))]) == AlphaViolation.exit_code
    err = capsys.readouterr().err
    assert "AlphaViolation" in err and "'indices': [1, 2, 1, 2]" in err
    missing = tmp_path / "missing.yaml"
    missing.write_text("format_version: 1\norder: 2\nrings: [Z/4, Z/4]\nbimodules:\n  - [ring(1)]\n  - [zero, ring(2)]\n")
    assert main(["validate", str(missing)]) == ParseError.exit_code


def test_analyze_command_outputs(tmp_path, capsys):
    spec = tmp_path / "cycle.yaml"
    main(["generate", "cycle", "--base", "Z/4", "--n", "3", "-o", str(spec)])
    capsys.readouterr()
    assert main(["analyze", str(spec)]) == 0
    assert capsys.readouterr().out.startswith("Frobenius, Nakayama (1 2 3), essential, socles coincide")
    assert main(["analyze", str(spec), "--permutation", "id"]) == 0
    out = capsys.readouterr().out
    assert "is not a Nakayama permutation" in out and "condition (2) fails at index 3" in out
    field = tmp_path / "f.yaml"
    main(["generate", "ring", "--base", "GF(2)", "-o", str(field)])
    capsys.readouterr()
    main(["analyze", str(field)])
    assert "Frobenius, Nakayama (1) (identity)" in capsys.readouterr().out


def test_json_report_is_deterministic(tmp_path, capsys):
    spec = tmp_path / "serial.yaml"
    main(["generate", "serial", "--q", "2", "--n", "3", "--bound", "6", "-o", str(spec)])
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["analyze", str(spec), "--essential", "--theorems", "--json", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["schema_version"] == 1 and len(doc["input_sha256"]) == 64
    assert doc["analysis"]["nakayama"] == "(1 2 3)"


def test_glue_command(tmp_path, capsys):
    t = tmp_path / "t.yaml"
    f = tmp_path / "f.yaml"
    main(["generate", "trivext", "--base", "GF(2)", "-o", str(t)])
    main(["generate", "ring", "--base", "GF(2)", "-o", str(f)])
    out = tmp_path / "g.yaml"
    report = tmp_path / "g.json"
    assert main(["glue", str(t), str(t), "-o", str(out), "--json", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["analysis"]["nakayama"] == "(1)(2)"
    assert doc["glue"]["left_round_trip"] and doc["glue"]["right_round_trip"]
    assert load_ring(out.read_text()).order == 2
    assert main(["glue", str(f), str(t)]) == 11
    assert "condition (D)" in capsys.readouterr().err


def test_generate_support(capsys):
    assert main(["generate", "support", "--n", "5", "--I", "2", "--base", "Z/4"]) == 0
    R = load_ring(capsys.readouterr().out)
    assert R.order == 5


def test_row_bound_flag_switches_socle_method(tmp_path, capsys):
    spec = tmp_path / "cycle.yaml"
    main(["generate", "cycle", "--base", "Z/4", "--n", "3", "-o", str(spec)])
    capsys.readouterr()
    assert main(["--max-row", "8", "analyze", str(spec), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["analysis"]["detection"]["method"] == "coordinate-formula"
    assert doc["analysis"]["nakayama"] == "(1 2 3)"
    assert "FORMALRINGS_MAX_ROW" not in os.environ


def test_flatten_bound_flag(tmp_path, capsys):
    spec = tmp_path / "cycle.yaml"
    main(["generate", "cycle", "--base", "Z/4", "--n", "2", "-o", str(spec)])
    assert main(["--max-flatten", "8", "analyze", str(spec), "--theorems"]) in (0, 10)


def test_enumerate_command_with_empty_menu(capsys):
    assert main(["enumerate", "--menu", "", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out.split("\ngenerated")[0])
    assert doc["census"]["unique"] == 0


def test_report_serialization_sorts_sets():
    assert dumps_report({"b": {3, 1}, "a": 1}) == '{\n  "a": 1,\n  "b": [\n    1,\n    3\n  ]\n}\n'
