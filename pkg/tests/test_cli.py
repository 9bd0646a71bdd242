import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcfdyn.cli import main
from pcfdyn.schema import OUTCOMES, SCHEMA_VERSION, RunManifest, SchemaError, envelope, input_digest, parse_output

RUNS = [
    (["belyi", "--set", '{"points":["0","1","1/3"]}'], 0),
    (["table", "--case", "E"], 0),
    (["orbit", "--poly", "1,0,1", "--budget", "64"], 2),
    (["orbit", "--poly=-2,0,1"], 0),
    (["construct", "--set", '{"points":["-2","2"],"infinity":true}'], 0),
    (["construct", "--set", '{"points":["0","1","1/3"],"infinity":true}', "--tier", "exact"], 2),
    (["passport", "extend", "--parts", "[[2],[2]]"], 0),
    (["passport", "extend", "--parts", "[[2],[2],[2],[2]]", "--target", "rational"], 0),
    (["passport", "realize", "--passport", "[[2,1],[2,1]]"], 0),
    (["passport", "mate", "--a", '{"degree":2,"permutations":[[[1,2]]]}', "--b", '{"degree":2,"permutations":[[[1,2]]]}'], 0),
    (["passport", "dessin", "--parts", "[[2],[2],[2]]"], 0),
    (["thurston", "--points", '["0","1","inf","1/9"]', "--map", "0:0,1:1,2:2,3:3"], 0),
    (["thurston", "--points", '{"a":"-1","b":"0","c":"inf"}', "--map", "a:b,b:a,c:c"], 0),
    (["hpoly", "--set", '{"points":["1/3"]}'], 0),
]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.mark.parametrize("argv, expected", RUNS, ids=[" ".join(a[:2]) for a, _ in RUNS])
def test_exit_codes_and_schema(argv, expected, capsys):
    code, out = run(argv, capsys)
    assert code == expected
    doc = parse_output(out)
    assert doc["manifest"]["exit_code"] == code
    assert doc["subcommand"] == argv[0]


@pytest.mark.parametrize("argv", [RUNS[0][0], RUNS[11][0], RUNS[13][0]])
def test_byte_identical_output(argv, capsys):
    _, first = run(argv, capsys)
    _, second = run(argv, capsys)
    assert first == second


def test_rationals_are_strings(capsys):
    _, out = run(RUNS[0][0], capsys)
    doc = json.loads(out)
    assert doc["result"]["set"]["points"] == ["0", "1/3", "1"]
    assert isinstance(doc["result"]["beta"], str)


def test_orbit_negative_payload(capsys):
    _, out = run(RUNS[2][0], capsys)
    doc = parse_output(out)
    assert doc["result"]["finite"] is False
    assert doc["manifest"]["outcome"] == "negative"


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["thurston", "--points", '["0","1","inf"]', "--map", "0:1,1;2"], "position"),
        (["thurston", "--points", '["0","1","inf"', "--map", "0:1"], "position"),
        (["orbit", "--poly", "1,x,1"], "x"),
        (["belyi", "--set", "{}", "--precision-bits", "10"], "precision"),
        (["table", "--case", "Z"], "Z"),
        (["passport", "mate", "--a", "{}"], "--b"),
    ],
)
def test_errors_are_reported(argv, needle, capsys):
    code, out = run(argv, capsys)
    doc = parse_output(out)
    assert code == 1 and doc["manifest"]["outcome"] == "error"
    assert needle in doc["error"]["message"]


@pytest.mark.parametrize("argv", [["orbit", "--poly", "-2,0,1"], ["frobnicate"], ["table", "--bogus"]])
def test_usage_errors_exit_one(argv, capsys):
    code, out = run(argv, capsys)
    doc = parse_output(out)
    assert code == 1 and doc["error"]["type"] == "UsageError"


def test_text_output(capsys):
    code, out = run(RUNS[13][0] + ["--output", "text"], capsys)
    assert code == 0
    assert out.startswith("hpoly: accepted")
    assert "[PASS] deg h > 1 (exact)" in out


def test_multiplicity_plan_negative(capsys):
    code, out = run(["thurston", "--points", '["0","1","inf","1/9"]', "--map", "0:0,1:1,2:2,3:3", "--mults", "2:1"], capsys)
    doc = parse_output(out)
    assert code == 2
    assert doc["result"]["multiplicity_plan"]["verdict"] == "passport produced, numerical realization unsupported"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pcfdyn", "table", "--case", "E"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    doc = parse_output(proc.stdout)
    assert doc["result"]["cases"]["E"]["postcritical_set"] == ["-1", "0", "inf"] or set(
        doc["result"]["cases"]["E"]["postcritical_set"]
    ) == {"-1", "0", "inf"}


class TestSchema:
    def manifest(self, outcome="accepted"):
        return RunManifest("belyi", input_digest({"set": "x"}), {}, "0.1.0", outcome, OUTCOMES[outcome])

    def test_round_trip(self):
        doc = envelope("belyi", self.manifest(), {"beta": "0,1"})
        assert parse_output(json.dumps(doc)) == doc
        assert doc["schema"] == SCHEMA_VERSION

    def test_mismatched_exit_code(self):
        with pytest.raises(SchemaError):
            RunManifest("belyi", "sha256:0", {}, "0.1.0", "accepted", 2)

    def test_result_and_error_exclusive(self):
        doc = envelope("belyi", self.manifest(), {"beta": "0,1"})
        doc["error"] = {"type": "X", "message": "y"}
        with pytest.raises(SchemaError):
            parse_output(doc)

    def test_error_needs_error_outcome(self):
        doc = envelope("belyi", self.manifest(), error={"type": "X", "message": "y"})
        with pytest.raises(SchemaError):
            parse_output(doc)

    @settings(max_examples=50, deadline=None)
    @given(st.dictionaries(st.text(min_size=1, max_size=5), st.text(max_size=8), max_size=4))
    def test_digest_is_order_independent(self, inputs):
        flipped = dict(reversed(list(inputs.items())))
        assert input_digest(inputs) == input_digest(flipped)
        assert input_digest(inputs).startswith("sha256:")
