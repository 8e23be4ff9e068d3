"""Golden-file tests for the command-line front end.

Regenerate after an intentional output change with
``WILDHURWITZ_REGEN_GOLDEN=1 pytest tests/test_cli.py``.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from wildhurwitz.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "validate_good_chain": ["validate-graph", "good_chain.json"],
    "validate_cycle": ["validate-graph", "cycle.json"],
    "validate_bad_conductor": ["validate-graph", "bad_conductor.json"],
    "validate_missing_field": ["validate-graph", "missing_field.json"],
    "validate_malformed": ["validate-graph", "malformed.json"],
    "validate_no_file": ["validate-graph", "does_not_exist.json"],
    "validate_json": ["validate-graph", "--format", "json", "good_chain.json"],
    "reduce_cycle": ["reduce-graph", "cycle.json"],
    "reduce_cycle_json": ["reduce-graph", "--format", "json", "cycle.json"],
    "level_good_chain": ["level", "good_chain.json"],
    "level_cycle": ["level", "cycle.json"],
    "earnest_good": ["check-earnest", "good_r_half.json"],
    "earnest_bad_r1": ["check-earnest", "bad_r1.json"],
    "earnest_bad_r1_json": ["check-earnest", "--format", "json", "bad_r1.json"],
    "earnest_wrong_spec": ["check-earnest", "good_chain.json"],
    "annulus_cover_n3": ["annulus-analyze", "cover_n3.json"],
    "annulus_cover_n3_mixed": ["annulus-analyze", "--M", "8", "--N", "2", "--T", "16", "cover_n3_mixed.json"],
    "annulus_cover_n3_json": ["annulus-analyze", "--format", "json", "cover_n3.json"],
    "admissible_finite": ["skeleton-admissible", "finite_edge.json"],
    "admissible_fail": ["skeleton-admissible", "not_admissible.json"],
    "classify_finite": ["skeleton-classify", "finite_edge.json"],
    "classify_infinite": ["skeleton-classify", "infinite_chain.json"],
    "classify_invalid": ["skeleton-classify", "invalid_class.json"],
    "classify_schema_error": ["skeleton-classify", "good_chain.json"],
    "defring_finite": ["defring", "finite_edge.json"],
    "defring_infinite": ["defring", "infinite_chain.json"],
    "defring_shared_node": ["defring", "--singularities", "shared_node.json"],
    "defring_json": ["defring", "--format", "json", "finite_edge.json"],
    "lift_infinite": ["smooth-lift", "infinite_chain.json"],
    "lift_finite": ["smooth-lift", "finite_edge.json"],
    "lift_not_admissible": ["smooth-lift", "not_admissible.json"],
    "lift_json": ["smooth-lift", "--format", "json", "infinite_chain.json"],
}


def run_case(argv, capsys, monkeypatch):
    monkeypatch.chdir(DATA)
    status = main(argv)
    out = capsys.readouterr()
    return f"exit: {status}\n--- stdout\n{out.out}--- stderr\n{out.err}"


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys, monkeypatch):
    got = run_case(CASES[name], capsys, monkeypatch)
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("WILDHURWITZ_REGEN_GOLDEN"):
        path.write_text(got, encoding="utf-8")
    assert got == path.read_text(encoding="utf-8")


def test_documented_outputs(capsys, monkeypatch):
    assert run_case(["validate-graph", "good_chain.json"], capsys, monkeypatch) == (
        "exit: 0\n--- stdout\nvalid; reduced graph good; ℓ = {A:0,B:1,C:2}\n--- stderr\n")
    out = run_case(["annulus-analyze", "cover_n3.json"], capsys, monkeypatch)
    assert out.startswith("exit: 0\n--- stdout\nm=1 side=v val_d=0 alternativeA=pass\n")
    out = run_case(["check-earnest", "bad_r1.json"], capsys, monkeypatch)
    assert out.startswith("exit: 1\n--- stdout\nbranch-1 failure at i=1")


def test_input_errors_use_status_2(capsys, monkeypatch):
    for argv in (["level", "malformed.json"], ["defring", "good_chain.json"],
                 ["annulus-analyze", "bad_r1.json"], ["check-earnest", "cover_n3.json"]):
        text = run_case(argv, capsys, monkeypatch)
        assert text.startswith("exit: 2"), argv
        assert "error: " in text


def test_bad_precision_override(capsys, monkeypatch):
    assert run_case(["check-earnest", "--M", "0", "bad_r1.json"], capsys, monkeypatch).startswith("exit: 2")


def test_selftest_deterministic(capsys):
    assert main(["selftest", "--seed", "5"]) == 0
    first = capsys.readouterr().out
    assert main(["selftest", "--seed", "5"]) == 0
    assert capsys.readouterr().out == first
    assert "all suites pass" in first


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("WILDHURWITZ_SEED", "77")
    assert main(["selftest", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 77
    monkeypatch.setenv("WILDHURWITZ_SEED", "seven")
    assert main(["selftest"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wildhurwitz", "level", str(DATA / "good_chain.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "ℓ = {A:0,B:1,C:2}\n"
