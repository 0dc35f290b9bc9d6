import json
import subprocess
import sys
import textwrap
from pathlib import Path

import pytest

from logdesk import cli, taskfile

ROOT = Path(__file__).resolve().parents[1]
TASKS = ROOT / "tasks"

INDEX2 = """
declarations:
  monoids:
    P: {ambient_rank: 2, generators: [[2, 0], [1, 1], [0, 2]]}
    N2: {free: 2}
  maps:
    incl: {source: P, target: N2, matrix: [[1, 0], [0, 1]]}
  prelog_maps:
    f: {canonical: incl}
tasks:
  - {name: classify, op: classify_map, args: {map: f}}
"""


def write(tmp_path, text, name="t.yaml"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text))
    return p


def report_of(capsys, path, *flags):
    code = cli.main(["run", str(path), "--format", "json", *flags])
    text = capsys.readouterr().out
    return code, json.loads(text)


def test_empty_task_list(tmp_path, capsys):
    code, rep = report_of(capsys, write(tmp_path, "tasks: []\n"))
    assert code == 0
    assert rep["tasks"] == []
    assert rep["exit_code"] == 0


def test_index2_classify_is_derived_log_etale(tmp_path, capsys):
    code, rep = report_of(capsys, write(tmp_path, INDEX2))
    assert code == 0
    assert rep["tasks"][0]["result"]["derived_log_etale"] is True


def test_residue_affine_passes(tmp_path, capsys):
    p = write(tmp_path, "tasks:\n  - {op: residue_check, args: {config: affine, nmax: 1}}\n")
    code, rep = report_of(capsys, p)
    assert code == 0
    assert rep["tasks"][0]["verdict"] == "pass"


def test_yaml_parse_error_has_line_and_column(tmp_path, capsys):
    p = write(tmp_path, "tasks:\n  - op: [unclosed\n")
    assert cli.main(["run", str(p)]) == 2
    err = capsys.readouterr().err
    assert "line" in err and "column" in err


def test_json_parse_error_has_line_and_column(tmp_path):
    p = write(tmp_path, '{"tasks": [\n  {"op": }\n]}', "t.json")
    with pytest.raises(taskfile.TaskFileError) as e:
        taskfile.load(p)
    assert e.value.line == 2 and e.value.column is not None


def test_unresolved_reference_is_named(tmp_path, capsys):
    p = write(tmp_path, "tasks:\n  - {op: classify_map, args: {map: ghost}}\n")
    assert cli.main(["run", str(p)]) == 2
    assert "ghost" in capsys.readouterr().err


@pytest.mark.parametrize(
    "body",
    [
        "tasks:\n  - {op: no_such_op}\n",
        "tasks:\n  - {op: residue_check, options: {qmax: 99}}\n",
        "tasks:\n  - {op: residue_check, options: {coefficients: GF4}}\n",
        "seed: -1\n",
        "surprise: 1\n",
        "- just a list\n",
    ],
)
def test_invalid_input_exits_2(tmp_path, body, capsys):
    assert cli.main(["run", str(write(tmp_path, body))]) == 2


def test_missing_file_exits_2(tmp_path, capsys):
    assert cli.main(["run", str(tmp_path / "absent.yaml")]) == 2


def test_bad_flag_exits_2(tmp_path, capsys):
    p = write(tmp_path, "tasks: []\n")
    assert cli.main(["run", str(p), "--qmax", "-1"]) == 2
    assert cli.main(["run", str(p), "--format", "xml"]) == 2


def test_expect_mismatch_fails(tmp_path, capsys):
    p = write(tmp_path, INDEX2.replace("args: {map: f}}", "args: {map: f}, expect: {derived_log_etale: false}}"))
    code, rep = report_of(capsys, p)
    assert code == 1
    row = rep["tasks"][0]
    assert row["verdict"] == "fail"
    assert row["expect"]["mismatches"] == [{"path": "derived_log_etale", "expected": False, "got": True}]


WINDOW = "tasks:\n  - {op: projective_bundle_check, args: {n: 2}}\n"


def test_window_guard_blocks_pass(tmp_path, capsys):
    code, rep = report_of(capsys, write(tmp_path, WINDOW))
    row = rep["tasks"][0]
    assert row["provenance"]["window_guard"] == {"fired": True, "acknowledged": False}
    assert row["verdict"] == "unknown"
    assert code == 3


def test_window_guard_acknowledged(tmp_path, capsys):
    code, rep = report_of(capsys, write(tmp_path, WINDOW), "--allow-inconclusive")
    assert code == 0
    assert rep["tasks"][0]["verdict"] == "pass"
    p = write(tmp_path, "tasks:\n  - {op: projective_bundle_check, args: {n: 2}, options: {acknowledge_window: true}}\n")
    code, rep = report_of(capsys, p)
    assert code == 0


def test_unsupported_is_inconclusive(tmp_path, capsys):
    p = write(
        tmp_path,
        """
        declarations:
          monoids: {P: {ambient_rank: 2, generators: [[2, 0], [1, 1], [0, 2]]}, N2: {free: 2}, N: {free: 1}}
          maps:
            incl: {source: P, target: N2, matrix: [[1, 0], [0, 1]]}
            fold: {source: N2, target: N, matrix: [[1, 1]]}
        tasks:
          - {op: base_change_check, args: {map: incl, base_change: fold}}
        """,
    )
    code, rep = report_of(capsys, p)
    assert rep["tasks"][0]["verdict"] == "unsupported"
    assert code == 3
    code, _ = report_of(capsys, p, "--allow-inconclusive")
    assert code == 0


def test_fail_beats_inconclusive():
    assert cli.exit_code(["pass", "unknown", "fail"]) == 1
    assert cli.exit_code(["pass", "unsupported"]) == 3
    assert cli.exit_code(["pass", "unsupported"], allow_inconclusive=True) == 0
    assert cli.exit_code([]) == 0


def test_report_round_trip_and_seed(tmp_path, capsys):
    code, rep = report_of(capsys, write(tmp_path, INDEX2), "--seed", "7")
    assert rep["seed"] == 7
    assert rep["tasks"][0]["provenance"]["seed"] == 7
    assert "seconds" in rep["timing"]
    decls = rep["declarations"]
    again = taskfile.build({"declarations": decls})
    assert again.declarations() == decls


def test_declarations_round_trip_every_kind():
    data = {
        "declarations": {
            "monoids": {"N": {"free": 1}, "Z": {"lattice": 1}, "P": {"ambient_rank": 2, "generators": [[2, 0], [1, 1], [0, 2]]}},
            "maps": {"sq": {"source": "N", "target": "N", "matrix": [[2]]}},
            "rings": {"A": {"monoid": "N", "log": "canonical"}, "C": {"monoid": "P", "log": "trivial", "ideal": [[2, 0]]}},
            "prelog_maps": {"f": {"canonical": "sq"}, "g": {"over_point": "A"}},
            "fans": {"F": "P2"},
            "subdivisions": {"S": {"star": "F", "ray": [1, 1]}},
            "schemes": {"X": "P1", "B": "blowup_A2", "Y": {"catalog": "Pn", "n": 1, "base": "A1"}},
        }
    }
    tf = taskfile.build(data)
    decls = tf.declarations()
    assert set(decls) == set(data["declarations"])
    assert taskfile.build({"declarations": decls}).declarations() == decls


def test_text_output_is_aligned(tmp_path, capsys):
    assert cli.main(["run", str(write(tmp_path, INDEX2))]) == 0
    out = capsys.readouterr().out
    assert out.startswith("seed: 0")
    assert "classify  pass" in out
    assert "time:" in out


def test_only_filters_tasks(tmp_path, capsys):
    code, rep = report_of(capsys, TASKS / "index2.yaml", "--only", "*witness*")
    assert [t["op"] for t in rep["tasks"]] == ["tor1_witness"]


def test_reports_are_deterministic(capsys):
    def body():
        report, _, _ = cli.execute(taskfile.load(TASKS / "index2.yaml"), cli.parser().parse_args(["run", "x"]))
        return cli.dumps(report)

    assert body() == body()


def test_tasks_run_in_declaration_order(tmp_path, capsys):
    code, rep = report_of(capsys, TASKS / "index2.yaml")
    names = [t.name for t in taskfile.load(TASKS / "index2.yaml").tasks]
    assert [t["name"] for t in rep["tasks"]] == names


@pytest.mark.parametrize("name", ["index2.yaml", "blowup_residue.yaml", "toric_invariance.yaml"])
def test_example_files_pass(name, capsys):
    code, rep = report_of(capsys, TASKS / name)
    assert code == 0, [t for t in rep["tasks"] if t["verdict"] != "pass"]
    assert all(not t.get("expect", {}).get("mismatches") for t in rep["tasks"])


def test_module_entry_point(tmp_path):
    p = write(tmp_path, INDEX2)
    r = subprocess.run([sys.executable, "-m", "logdesk", "run", str(p), "--format", "json"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["tasks"][0]["verdict"] == "pass"
