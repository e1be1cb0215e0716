"""The scenario engine and its command line front end."""

import pytest

from gencontact.cli import main
from gencontact.scenario import (
    ScenarioError,
    check_names,
    load_scenario,
    parse_scenario_text,
    run_checks,
    scenario_names,
)

TINY_MODEL = """scenario = tiny
[model]
name = flat
| model flat
|
| frame T1 T2 T3
| coframe b1 b2 b3
|
| point
| point
| point
[checks]
check = courant_axioms flat
check = d_squared flat
"""

TYPES_SCENARIO = """scenario = types
[structure]
name = h
builder = heisenberg
param b = 1
[checks]
check = geometric_type h expect=(1,1);(1,1);(1,1)
"""


# -- engine level ----------------------------------------------------------


def test_shipped_scenarios_run_with_designed_exits():
    expected = {
        "s3_strong_integrability": 0,
        "s3_normality_h_cubed": 1,
        "heisenberg_duality": 0,
        "hopf_duality": 0,
        "cone_roundtrip": 0,
        "cosymplectic_normality": 0,
    }
    assert sorted(expected) == scenario_names()
    for name, wanted in expected.items():
        scenario = load_scenario(name)
        report = run_checks(scenario)
        assert report.status == wanted, "%s: %s" % (name, report.human_text())


def test_scenario_requires_checks():
    with pytest.raises(ScenarioError, match="no \\[checks\\] section"):
        parse_scenario_text("scenario = empty\n", "t.scn")


def test_check_names_cover_the_catalog():
    names = check_names()
    for needed in ("courant_axioms", "normality", "geometric_type",
                   "duality_intertwiner", "double_duality", "poon_wade"):
        assert needed in names


def test_verbatim_models_parse_and_run(tmp_path):
    path = tmp_path / "tiny.scn"
    path.write_text(TINY_MODEL)
    assert main(["run", str(path)]) == 0


def test_malformed_verbatim_model_fails_loudly(tmp_path, capsys):
    path = tmp_path / "two.scn"
    path.write_text(TINY_MODEL.replace("| point\n| point\n| point",
                                       "| point\n| point"))
    assert main(["run", str(path)]) == 2
    err = capsys.readouterr().err
    assert "failed validation" in err
    assert "at least 3 sample points" in err


def test_dual_model_cross_check_failure(tmp_path, capsys):
    path = tmp_path / "bad.scn"
    path.write_text("""scenario = bad
[dualpair]
name = h
builtin = heisenberg
dual_model = torus3
[checks]
check = double_duality h
""")
    assert main(["run", str(path)]) == 2
    assert "disagrees with model 'torus3'" in capsys.readouterr().err


# -- run subcommand --------------------------------------------------------


def test_run_prints_one_line_per_check(capsys):
    assert main(["run", "cosymplectic_normality"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("scenario: cosymplectic_normality")
    assert "check normality nil-invariant: PASS" in out
    assert "check normal_frame nil-invariant: PASS" in out
    assert "FAIL" not in out


def test_run_reports_designed_failures(capsys):
    assert main(["run", "s3_normality_h_cubed"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    # the two surviving obstruction scalars appear as residuals
    assert "-x2^3 + 3*x1^2*x2" in out
    assert "3*x1*x2^2 - x1^3" in out


def test_run_unknown_scenario(capsys):
    assert main(["run", "does_not_exist"]) == 2
    assert "error:" in capsys.readouterr().err


def test_point_subset_filters_comparisons(tmp_path, capsys):
    path = tmp_path / "types.scn"
    path.write_text(TYPES_SCENARIO)
    assert main(["run", str(path)]) == 0
    capsys.readouterr()
    assert main(["run", str(path), "--points", "0,2"]) == 0
    capsys.readouterr()
    assert main(["run", str(path), "--points", "9"]) == 2
    assert "selects nothing" in capsys.readouterr().err
    assert main(["run", str(path), "--points", "0,x"]) == 2
    assert "error:" in capsys.readouterr().err


def test_strict_mode_promotes_inconclusive(tmp_path, capsys):
    path = tmp_path / "strict.scn"
    path.write_text("""scenario = strict_probe
[structure]
name = d
builder = deformation
[checks]
check = type_sum d
""")
    assert main(["run", str(path)]) == 0
    capsys.readouterr()
    assert main(["run", str(path), "--strict"]) == 3
    assert "INCONCLUSIVE" in capsys.readouterr().out


def test_report_files_are_byte_identical(tmp_path):
    first = tmp_path / "a.txt"
    second = tmp_path / "b.txt"
    assert main(["run", "heisenberg_duality", "--report", str(first)]) == 0
    assert main(["run", "heisenberg_duality", "--report", str(second)]) == 0
    blob = first.read_bytes()
    assert blob == second.read_bytes()
    text = blob.decode()
    assert text.startswith("report.scenario = heisenberg_duality")
    assert "check.verdict = PASS" in text
    assert "elapsed" not in text and "seconds" not in text


def test_report_records_counts(tmp_path):
    path = tmp_path / "r.txt"
    assert main(["run", "cosymplectic_normality", "--report", str(path)]) == 0
    text = path.read_text()
    assert "report.checks = 5" in text
    assert "report.passed = 5" in text
    assert "report.failed = 0" in text


# -- list and explain ------------------------------------------------------


def test_list_shows_the_catalog(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for token in ("s3-family", "hopf", "triple-contact-7d", "cone_roundtrip",
                  "courant_axioms"):
        assert token in out


def test_explain_wraps_the_doc(capsys):
    assert main(["explain", "normality"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("normality:")
    body = out.splitlines()[1:]
    assert body and all(line.startswith("  ") for line in body if line)
    assert all(len(line) <= 74 for line in body)


def test_explain_unknown_check(capsys):
    assert main(["explain", "telepathy"]) == 2
    assert "unknown check" in capsys.readouterr().err
