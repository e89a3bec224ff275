"""Command line behavior: exit codes, outputs, and the CSV-to-matrix path."""

import json

import pytest

import teamforge as tf
from teamforge.cli import (
    EXIT_ERROR,
    EXIT_INFEASIBLE,
    EXIT_INVALID,
    EXIT_OK,
    EXIT_UNKNOWN,
    EXIT_USAGE,
    main,
    parse_duration,
)

from conftest import make_instance


@pytest.fixture
def five_path(five_student_instance, tmp_path):
    doc = tf.document_from_instance(
        five_student_instance,
        name="five",
        student_ids=("ana", "bo", "cai", "dee", "eve"),
    )
    path = tmp_path / "five.json"
    tf.save_instance(doc, path)
    return path


@pytest.fixture
def infeasible_path(tmp_path):
    inst = make_instance(4, 2, 2, 2, skills=(0, 1), skill_sets=[{0}] * 4, c=2)
    path = tmp_path / "stuck.json"
    tf.save_instance(tf.document_from_instance(inst, name="stuck"), path)
    return path


def test_parse_duration():
    assert parse_duration("500ms") == 0.5
    assert parse_duration("5s") == 5.0
    assert parse_duration("2m") == 120.0
    assert parse_duration("1h") == 3600.0
    assert parse_duration("3") == 3.0
    assert parse_duration(" 1.5 s ") == 1.5
    import argparse

    for bad in ("abc", "5 parsecs", "-3", "0", "1d"):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_duration(bad)


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["solve", "whatever.json"])  # --strategy is required
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["solve", "x.json", "--strategy", "S2.1", "--time-limit", "soon"])
    assert exc.value.code == EXIT_USAGE


def test_solve_and_validate_round_trip(five_path, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    code = main([
        "solve", str(five_path),
        "--strategy", "S3.1",
        "--out", str(sol_path),
    ])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "status: optimal" in out
    assert "team 0" in out and "ana" in out
    assert sol_path.exists()

    code = main(["validate", str(five_path), str(sol_path)])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "FAIL" not in out
    assert "fingerprint" in out


def test_validate_rejects_tampered_solution(five_path, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    main(["solve", str(five_path), "--strategy", "S2.1", "--out", str(sol_path)])
    capsys.readouterr()

    payload = json.loads(sol_path.read_text())
    payload["teams"] = [["ana", "bo"], ["cai", "dee", "eve"]]  # o1 drops below 16
    sol_path.write_text(json.dumps(payload))
    code = main(["validate", str(five_path), str(sol_path)])
    out = capsys.readouterr().out
    assert code == EXIT_INVALID
    assert "FAIL" in out


def test_validate_rejects_wrong_instance(five_path, four_student_instance, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    main(["solve", str(five_path), "--strategy", "S2.1", "--out", str(sol_path)])
    other = tmp_path / "other.json"
    tf.save_instance(tf.document_from_instance(four_student_instance, name="other"), other)
    code = main(["validate", str(other), str(sol_path)])
    out = capsys.readouterr().out
    assert code == EXIT_INVALID
    assert "FAIL fingerprint" in out


def test_validate_accepts_infeasible_solution(infeasible_path, tmp_path, capsys):
    sol_path = tmp_path / "sol.json"
    code = main([
        "solve", str(infeasible_path), "--strategy", "S2.1", "--out", str(sol_path),
    ])
    assert code == EXIT_INFEASIBLE
    code = main(["validate", str(infeasible_path), str(sol_path)])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "no teams recorded with status infeasible" in out


def test_solve_starved_budget_exits_unknown(five_path, capsys):
    code = main([
        "solve", str(five_path), "--strategy", "S2.1", "--time-limit", "1ms",
    ])
    out = capsys.readouterr().out
    assert code == EXIT_UNKNOWN
    assert "status: unknown" in out


def test_solve_accepts_strategy_text(five_path, capsys):
    code = main(["solve", str(five_path), "--strategy", "O3-(-4), O1"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "O3-(-4)" in out


def test_solve_error_paths(five_path, tmp_path, capsys):
    assert main(["solve", str(tmp_path / "absent.json"), "--strategy", "S2.1"]) == EXIT_ERROR
    assert main(["solve", str(five_path), "--strategy", "O9"]) == EXIT_ERROR
    assert main(["solve", str(five_path), "--strategy", "O1, O1"]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert "error:" in err


def test_generate_list(capsys):
    assert main(["generate", "--list"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("D1", "D5", "D8.2"):
        assert name in out


def test_generate_writes_instance(tmp_path, capsys):
    out_path = tmp_path / "inst.json"
    code = main(["generate", "D1", "--seed", "3", "--out", str(out_path)])
    stdout = capsys.readouterr().out
    assert code == EXIT_OK
    assert "fingerprint" in stdout
    doc = tf.load_instance(out_path)
    assert doc.name == "D1-s3"
    assert doc.instance.m == 15
    assert doc.instance == tf.generate(tf.PRESETS["D1"], 3)


def test_generate_errors(capsys):
    assert main(["generate", "D99"]) == EXIT_ERROR
    assert main(["generate"]) == EXIT_USAGE
    capsys.readouterr()


def test_bench_on_instance_file(five_path, tmp_path, capsys):
    out_dir = tmp_path / "bench"
    code = main([
        "bench",
        "--presets", "",
        "--instance", str(five_path),
        "--time-per-objective", "200ms",
        "--out-dir", str(out_dir),
    ])
    stdout = capsys.readouterr().out
    assert code == EXIT_OK
    for name in ("bench.json", "bench.csv", "bench.txt", "quality_five.png"):
        assert (out_dir / name).exists(), name
        assert name in stdout

    payload = json.loads((out_dir / "bench.json").read_text())
    assert payload["schema"] == "teamforge-bench/1"
    cells = payload["cells"]
    assert len(cells) == 10
    assert {c["strategy"] for c in cells} == set(tf.catalog())
    csv_text = (out_dir / "bench.csv").read_text()
    assert csv_text.splitlines()[0].startswith("instance,strategy,status")
    assert "five" in (out_dir / "bench.txt").read_text()


def test_bench_requires_work(capsys):
    assert main(["bench", "--presets", ""]) == EXIT_USAGE
    assert main(["bench", "--presets", "D99"]) == EXIT_ERROR
    capsys.readouterr()


VOTES_CSV = """\
from,to,value,kind
ana,bo,2,weak
bo,ana,-2,weak
cai,ana,4,strong
ana,cai,-4,strong
bo,cai,4,rating
"""

PROFILES_CSV = """\
student,pace,remote
#kind,likert:1:5,binary
ana,1,0
bo,5,0
cai,3,1
"""


def _write_pref_inputs(tmp_path):
    votes = tmp_path / "votes.csv"
    votes.write_text(VOTES_CSV)
    profiles = tmp_path / "profiles.csv"
    profiles.write_text(PROFILES_CSV)
    roster = tmp_path / "roster.txt"
    roster.write_text("# cohort\nana\nbo\ncai\n")
    return votes, profiles, roster


def test_build_prefs_end_to_end(tmp_path, capsys):
    votes, profiles, roster = _write_pref_inputs(tmp_path)
    out = tmp_path / "prefs.json"
    code = main([
        "build-prefs",
        "--votes", str(votes),
        "--profiles", str(profiles),
        "--roster", str(roster),
        "--out", str(out),
    ])
    assert code == EXIT_OK
    capsys.readouterr()

    fragment = json.loads(out.read_text())
    assert fragment["schema"] == "teamforge-preferences/1"
    assert fragment["students"] == ["ana", "bo", "cai"]
    assert fragment["scale"] == 4
    # Weak votes exist, so profile values live in [-1, 1]; every profile
    # similarity here lands in the bottom bucket. Votes then overwrite.
    assert fragment["preferences"]["rows"] == [
        [0, 2, -4],
        [-2, 0, 1],
        [4, -1, 0],
    ]

    sidecar = tmp_path / "prefs.provenance.json"
    assert sidecar.exists()
    prov = json.loads(sidecar.read_text())
    assert prov["schema"] == "teamforge-provenance/1"
    assert prov["entries"] == [
        ["ana", "bo", "weak", 2],
        ["ana", "cai", "strong", -4],
        ["bo", "ana", "weak", -2],
        ["bo", "cai", "weak", 1],
        ["cai", "ana", "strong", 4],
        ["cai", "bo", "profile", -1],
    ]


def test_build_prefs_votes_only(tmp_path, capsys):
    votes, _, _ = _write_pref_inputs(tmp_path)
    out = tmp_path / "prefs.json"
    assert main(["build-prefs", "--votes", str(votes), "--out", str(out)]) == EXIT_OK
    capsys.readouterr()
    fragment = json.loads(out.read_text())
    assert fragment["students"] == ["ana", "bo", "cai"]  # ids collected from votes
    assert fragment["preferences"]["rows"][0][1] == 2
    assert fragment["preferences"]["rows"][2][1] == 0  # no profile fill-in


def test_build_prefs_errors(tmp_path, capsys):
    votes, profiles, _ = _write_pref_inputs(tmp_path)
    assert main(["build-prefs"]) == EXIT_USAGE

    short_roster = tmp_path / "short.txt"
    short_roster.write_text("ana\nbo\n")  # votes name cai too
    assert main([
        "build-prefs", "--votes", str(votes), "--roster", str(short_roster),
    ]) == EXIT_ERROR

    bad_votes = tmp_path / "bad.csv"
    bad_votes.write_text("from,to,value,kind\nana,bo,3,strong\n")
    assert main(["build-prefs", "--votes", str(bad_votes)]) == EXIT_ERROR

    bad_header = tmp_path / "headerless.csv"
    bad_header.write_text("a,b\nana,bo\n")
    assert main(["build-prefs", "--votes", str(bad_header)]) == EXIT_ERROR

    bad_profiles = tmp_path / "badprof.csv"
    bad_profiles.write_text("student,pace\n#kind,percentile\nana,1\nbo,2\n")
    assert main(["build-prefs", "--profiles", str(bad_profiles)]) == EXIT_ERROR
    capsys.readouterr()
