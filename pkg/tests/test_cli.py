import json
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "sqpo.cli", *[str(a) for a in args]],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


def test_validate_ok():
    proc = run_cli("validate", FIXTURES / "merge_add.hierarchy.json")
    assert proc.returncode == 0
    assert proc.stdout == ""


def test_validate_broken_diamond():
    proc = run_cli("validate", FIXTURES / "broken_diamond.hierarchy.json")
    assert proc.returncode == 1
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith("PAIR a d: ")
    assert " != " in lines[0] and " at node " in lines[0]


def test_validate_missing_file():
    proc = run_cli("validate", FIXTURES / "does_not_exist.json")
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_match_counts_and_anchor():
    proc = run_cli(
        "match",
        FIXTURES / "merge_add.hierarchy.json",
        "G",
        FIXTURES / "merge_add.rule.json",
        "--kind",
        "expansive",
    )
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "merge_add.matches.json").read_text()
    matches = json.loads(proc.stdout)
    assert len(matches) == 4

    anchored = run_cli(
        "match",
        FIXTURES / "merge_add.hierarchy.json",
        "G",
        FIXTURES / "merge_add.rule.json",
        "--kind",
        "expansive",
        "--anchor",
        "cw=w1",
    )
    assert len(json.loads(anchored.stdout)) == 2


def test_match_no_matches_is_ok():
    proc = run_cli(
        "match",
        FIXTURES / "merge_add.hierarchy.json",
        "T",
        FIXTURES / "clone_delete.rule.json",
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == []


@pytest.mark.parametrize(
    "name, hier, node, rule, direction, relation",
    [
        ("merge_add", "merge_add.hierarchy.json", "G", "merge_add.rule.json", "fwd", "merge_add.relation.json"),
        ("merge_add_variant", "merge_add_variant.hierarchy.json", "G", "merge_add.rule.json", "fwd", "merge_add_variant.relation.json"),
        ("clone_delete", "clone_delete.hierarchy.json", "T", "clone_delete.rule.json", "bwd", "clone_delete.relation.json"),
        ("clone_delete_partial", "clone_delete_partial.hierarchy.json", "T", "clone_delete.rule.json", "bwd", "clone_delete.relation.json"),
        ("set_example", "set_example.hierarchy.json", "n0", "set_example.rule.json", "fwd", "set_example.relation.json"),
        ("diamond", "diamond.hierarchy.json", "k0", "diamond.rule.json", "bwd", "diamond.relation.json"),
    ],
)
def test_rewrite_matches_golden(tmp_path, name, hier, node, rule, direction, relation):
    out = tmp_path / "out.json"
    report = tmp_path / "report.json"
    proc = run_cli(
        "rewrite",
        FIXTURES / hier,
        node,
        FIXTURES / rule,
        "0",
        "--direction",
        direction,
        "--relation",
        FIXTURES / relation,
        "-o",
        out,
        "--report",
        report,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text() == (GOLDEN / f"{name}.out.json").read_text()
    assert report.read_text() == (GOLDEN / f"{name}.report.json").read_text()
    # rewritten hierarchies validate cleanly
    check = run_cli("validate", out)
    assert check.returncode == 0


def test_rewrite_canonical_flag(tmp_path):
    out = tmp_path / "out.json"
    proc = run_cli(
        "rewrite",
        FIXTURES / "merge_add.hierarchy.json",
        "G",
        FIXTURES / "merge_add.rule.json",
        "0",
        "--direction",
        "fwd",
        "--canonical",
        "-o",
        out,
        "--report",
        tmp_path / "report.json",
    )
    assert proc.returncode == 0, proc.stderr
    hierarchy = json.loads(out.read_text())
    # without clean-up the two squares keep distinct types
    assert len(hierarchy["graphs"]["T"]["nodes"]) == 3


def test_rewrite_composability_violation_exits_1(tmp_path):
    proc = run_cli(
        "rewrite",
        FIXTURES / "chain.hierarchy.json",
        "g0",
        FIXTURES / "chain.rule.json",
        "0",
        "--direction",
        "fwd",
        "--relation",
        FIXTURES / "chain.relation.json",
        "-o",
        tmp_path / "out.json",
        "--report",
        tmp_path / "report.json",
    )
    assert proc.returncode == 1
    assert "g1->g2" in proc.stderr
    assert not (tmp_path / "out.json").exists()


def test_rewrite_bad_match_index(tmp_path):
    proc = run_cli(
        "rewrite",
        FIXTURES / "merge_add.hierarchy.json",
        "G",
        FIXTURES / "merge_add.rule.json",
        "99",
        "--direction",
        "fwd",
        "--canonical",
        "-o",
        tmp_path / "out.json",
    )
    assert proc.returncode == 1
    assert "out of range" in proc.stderr


def test_rewrite_direction_requires_trivial_other_leg(tmp_path):
    proc = run_cli(
        "rewrite",
        FIXTURES / "clone_delete.hierarchy.json",
        "T",
        FIXTURES / "clone_delete.rule.json",
        "0",
        "--direction",
        "fwd",
        "--canonical",
        "-o",
        tmp_path / "out.json",
    )
    assert proc.returncode == 2
    assert "restrictive part is trivial" in proc.stderr


def test_rewrite_with_explicit_plan_file(tmp_path):
    out = tmp_path / "out.json"
    proc = run_cli(
        "rewrite",
        FIXTURES / "strict_plan.hierarchy.json",
        "G",
        FIXTURES / "strict_plan.rule.json",
        "0",
        "--direction",
        "fwd",
        "--plan",
        FIXTURES / "strict_plan.plan.json",
        "-o",
        out,
        "--report",
        tmp_path / "report.json",
    )
    assert proc.returncode == 0, proc.stderr
    hierarchy = json.loads(out.read_text())
    # fully strict: the typing object is untouched, the new node is typed t2
    assert [n["id"] for n in hierarchy["graphs"]["T"]["nodes"]] == ["t1", "t2"]
    assert hierarchy["typings"][0]["map"]["a"] == "t2"


def test_plan_file_relation_field_matches_relation_flag(tmp_path):
    out = tmp_path / "out.json"
    proc = run_cli(
        "rewrite",
        FIXTURES / "merge_add.hierarchy.json",
        "G",
        FIXTURES / "merge_add.rule.json",
        "0",
        "--direction",
        "fwd",
        "--plan",
        FIXTURES / "merge_add.plan.json",
        "-o",
        out,
        "--report",
        tmp_path / "report.json",
    )
    assert proc.returncode == 0, proc.stderr
    assert out.read_text() == (GOLDEN / "merge_add.out.json").read_text()


def test_workspace_loads_and_validates(tmp_path):
    import shutil

    from sqpo import Workspace
    from sqpo.cli import _InputError

    for name in (
        "merge_add.hierarchy.json",
        "merge_add.rule.json",
        "merge_add.plan.json",
        "diamond.relation.json",
        "clone_delete.rule.json",
    ):
        shutil.copy(FIXTURES / name, tmp_path / name)
    ws = Workspace.load(tmp_path)
    assert ws.root == tmp_path
    assert "merge_add" in ws.hierarchies
    assert "clone_delete" in ws.rules and "merge_add" in ws.rules
    assert "merge_add" in ws.plans
    assert "diamond" in ws.relations
    # a workspace containing an invalid hierarchy fails on load
    shutil.copy(
        FIXTURES / "broken_diamond.hierarchy.json",
        tmp_path / "broken_diamond.hierarchy.json",
    )
    with pytest.raises(_InputError):
        Workspace.load(tmp_path)


def test_cli_runs_are_byte_identical(tmp_path):
    results = []
    for attempt in range(2):
        out = tmp_path / f"out{attempt}.json"
        report = tmp_path / f"report{attempt}.json"
        proc = run_cli(
            "rewrite",
            FIXTURES / "diamond.hierarchy.json",
            "k0",
            FIXTURES / "diamond.rule.json",
            "0",
            "--direction",
            "bwd",
            "--relation",
            FIXTURES / "diamond.relation.json",
            "-o",
            out,
            "--report",
            report,
        )
        assert proc.returncode == 0
        results.append((out.read_bytes(), report.read_bytes()))
    assert results[0] == results[1]
