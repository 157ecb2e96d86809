import json

import jsonschema
import pytest

from superstable import parse_instance
from superstable.cli import main
from conftest import I1_TEXT, I2_TEXT

PAIR = {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}
MATCHING = {
    "type": "object",
    "properties": {
        "pairs": {"anyOf": [{"type": "null"}, {"type": "array", "items": PAIR}]},
        "matched": {"type": "integer", "minimum": 0},
    },
    "required": ["pairs"],
    "additionalProperties": False,
}
ROTATIONS = {
    "type": "object",
    "properties": {
        "sequence": {"type": "array", "items": MATCHING},
        "rotations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "index": {"type": "integer"},
                    "removed": {"type": "array", "items": PAIR},
                    "added": {"type": "array", "items": PAIR},
                },
                "required": ["index", "removed", "added"],
            },
        },
        "arcs": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    },
    "required": ["sequence", "rotations", "arcs"],
}
IRREDUCIBLE = {
    "type": "object",
    "properties": {
        "elements": {
            "anyOf": [
                {"type": "null"},
                {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "index": {"type": "integer"},
                            "pairs": {"type": "array", "items": PAIR},
                            "witnesses": {"type": "array", "items": PAIR},
                            "p_set": {"type": "array", "items": PAIR},
                        },
                        "required": ["index", "pairs", "witnesses", "p_set"],
                    },
                },
            ]
        },
        "covers": {"type": "array"},
    },
    "required": ["elements"],
}
CHECK = {
    "type": "object",
    "properties": {
        "model": {"enum": ["super", "strong"]},
        "feasible": {"type": "boolean"},
        "violations": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "constraint": {"enum": ["1a", "1b", "1c", "3a", "3b", "3c", "3d"]},
                    "lhs": {"type": "string"},
                    "relation": {"type": "string"},
                },
                "required": ["constraint", "witness", "lhs", "relation"],
            },
        },
    },
    "required": ["model", "feasible", "violations"],
}
VERTICES = {
    "type": "object",
    "properties": {
        "model": {"enum": ["super", "strong"]},
        "count": {"type": "integer"},
        "vertices": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
    "required": ["model", "count", "vertices"],
}
MAXWEIGHT = {
    "type": "object",
    "properties": {
        "pairs": MATCHING["properties"]["pairs"],
        "matched": {"type": "integer"},
        "weight": {"type": "string", "pattern": r"^-?[0-9]+(/[0-9]+)?$"},
    },
    "required": ["pairs"],
    "additionalProperties": False,
}


@pytest.fixture
def i1_file(tmp_path):
    path = tmp_path / "i1.txt"
    path.write_text(I1_TEXT)
    return str(path)


@pytest.fixture
def i2_file(tmp_path):
    path = tmp_path / "i2.txt"
    path.write_text(I2_TEXT)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve(capsys, i1_file):
    code, out, _ = run(capsys, "solve", i1_file, "--side", "men")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, MATCHING)
    assert doc == {"pairs": [["a", "x"], ["b", "y"]], "matched": 2}
    code, out, _ = run(capsys, "solve", i1_file, "--side", "women")
    assert json.loads(out)["pairs"] == [["a", "y"], ["b", "x"]]


def test_solve_infeasible(capsys, i2_file):
    code, out, _ = run(capsys, "solve", i2_file)
    assert code == 0
    assert json.loads(out) == {"pairs": None}


def test_enumerate(capsys, i1_file):
    code, out, _ = run(capsys, "enumerate", i1_file)
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 2
    for doc in lines:
        jsonschema.validate(doc, MATCHING)
    code, out, _ = run(capsys, "enumerate", i1_file, "--limit", "1")
    assert len(out.splitlines()) == 1


def test_rotations(capsys, i1_file, i2_file):
    code, out, _ = run(capsys, "rotations", i1_file)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, ROTATIONS)
    assert len(doc["sequence"]) == 2 and len(doc["rotations"]) == 1
    assert doc["arcs"] == []
    code, out, _ = run(capsys, "rotations", i2_file)
    assert json.loads(out) == {"sequence": [], "rotations": [], "arcs": []}
    code, out, _ = run(capsys, "rotations", i1_file, "--dot")
    assert code == 0 and out.startswith("digraph rotations {")


def test_irreducible(capsys, i1_file, i2_file):
    code, out, _ = run(capsys, "irreducible", i1_file)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, IRREDUCIBLE)
    assert len(doc["elements"]) == 2 and doc["covers"] == [[0, 1]]
    code, out, _ = run(capsys, "irreducible", i2_file)
    assert json.loads(out) == {"elements": None}
    code, out, _ = run(capsys, "irreducible", i1_file, "--dot")
    assert out.startswith("digraph irreducible {")


def test_maxweight(capsys, i1_file, tmp_path):
    wfile = tmp_path / "w.txt"
    wfile.write_text("a y 5\nb x 5\na x 1\nb y 1\n")
    code, out, _ = run(capsys, "maxweight", i1_file, "--weights", str(wfile))
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, MAXWEIGHT)
    assert doc["pairs"] == [["a", "y"], ["b", "x"]] and doc["weight"] == "10"


def test_check_polytope(capsys, i1_file, tmp_path):
    pfile = tmp_path / "p.txt"
    pfile.write_text("a x 1/2\na y 1/2\nb x 1/2\nb y 1/2\n")
    code, out, _ = run(capsys, "check-polytope", i1_file, "--point", str(pfile))
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, CHECK)
    assert doc["feasible"] is True and doc["violations"] == []
    empty = tmp_path / "zero.txt"
    empty.write_text("")
    code, out, _ = run(capsys, "check-polytope", i1_file, "--point", str(empty))
    doc = json.loads(out)
    jsonschema.validate(doc, CHECK)
    assert doc["feasible"] is False and len(doc["violations"]) == 4


def test_vertices(capsys, i1_file):
    code, out, _ = run(capsys, "vertices", i1_file, "--model", "super")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, VERTICES)
    assert doc["count"] == 2
    assert all(entry[2] == "1" for vertex in doc["vertices"] for entry in vertex)


def test_gen_deterministic_and_pipes(capsys):
    args = ["gen", "--men", "4", "--women", "4", "--density", "0.8", "--tie-prob", "0.3", "--seed", "7"]
    code, first, _ = run(capsys, *args)
    assert code == 0
    code, second, _ = run(capsys, *args)
    assert first == second
    inst = parse_instance(first)
    assert inst.men == ("m1", "m2", "m3", "m4")


def test_oracle_command(capsys, i1_file):
    code, out, _ = run(capsys, "oracle", i1_file)
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines()]
    assert len(lines) == 2
    for doc in lines:
        jsonschema.validate(doc, MATCHING)


def test_exit_codes(capsys, tmp_path, i1_file):
    code, _, err = run(capsys, "bogus")
    assert code == 1 and err
    code, _, err = run(capsys)
    assert code == 1
    code, _, err = run(capsys, "solve", str(tmp_path / "missing.txt"))
    assert code == 2 and "missing.txt" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("men: a\nwomen: x\na: q\nx: a\n")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2 and "bad.txt" in err
    weights = tmp_path / "w.txt"
    weights.write_text("a x 1\na x 1\n")
    code, _, err = run(capsys, "maxweight", i1_file, "--weights", str(weights))
    assert code == 2 and "duplicate" in err


def test_no_input_mutation(capsys, i1_file):
    before = open(i1_file).read()
    run(capsys, "rotations", i1_file)
    assert open(i1_file).read() == before
