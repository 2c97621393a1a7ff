import json
import shutil
from pathlib import Path

import pytest

from otod.cli import run

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "synthetic_bundle"


@pytest.fixture
def bundle_dir(tmp_path):
    dst = tmp_path / "bundle"
    shutil.copytree(FIXTURE_DIR, dst)
    return dst


def manifest(d: Path) -> str:
    return str(d / "manifest.json")


def test_validate_ok_exits_zero(bundle_dir, capsys):
    assert run(["validate", manifest(bundle_dir)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["format_version"] == "1"


def test_validate_broken_fixture_names_file(bundle_dir, capsys):
    (bundle_dir / "id_test.features.bin").write_bytes(b"\x00" * 8)
    assert run(["validate", manifest(bundle_dir)]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is False
    assert any("id_test.features.bin" in i["message"] for i in payload["issues"])


def test_validate_missing_manifest_is_io_exit(tmp_path, capsys):
    assert run(["validate", str(tmp_path / "absent.json")]) == 2


def test_eval_writes_report_files(bundle_dir, tmp_path, capsys):
    out = tmp_path / "out"
    code = run(
        ["eval", manifest(bundle_dir), "--scorer", "otod", "--alpha",
         "0.333,0.333,0.334", "--temp", "3", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads((out / "report.json").read_text())
    assert payload["format_version"] == "1"
    assert payload["config"]["scorer"] == "otod"
    assert payload["config"]["scorer_params"]["temperature"] == 3.0
    assert set(payload["report"]["per_ood"]) == {"shifted", "noise"}
    md = (out / "report.md").read_text(encoding="utf-8")
    assert "| OOD dataset | FPR@95 ↓ | AUROC ↑ |" in md
    assert "## Run config" in md
    # the table is also printed to stdout
    assert "**Average**" in capsys.readouterr().out


def test_eval_schema_is_scorer_stable(bundle_dir, tmp_path):
    reports = {}
    for scorer in ("otod", "msp"):
        out = tmp_path / scorer
        assert run(["eval", manifest(bundle_dir), "--scorer", scorer, "--out", str(out)]) == 0
        reports[scorer] = json.loads((out / "report.json").read_text())
    assert reports["otod"]["report"]["scorer_id"] == "otod"
    assert reports["msp"]["report"]["scorer_id"] == "msp"

    def shape(node):
        if isinstance(node, dict):
            return {k: shape(v) for k, v in node.items()}
        return type(node).__name__

    assert shape(reports["otod"]["report"]) == shape(reports["msp"]["report"])


def test_eval_mds_without_train_labels_fails_before_artifacts(bundle_dir, tmp_path, capsys):
    doc = json.loads((bundle_dir / "manifest.json").read_text())
    del doc["id_train"]["labels"]
    (bundle_dir / "manifest.json").write_text(json.dumps(doc))
    out = tmp_path / "out"
    assert run(["eval", manifest(bundle_dir), "--scorer", "mds", "--out", str(out)]) == 1
    assert not out.exists()


def test_eval_threads_do_not_change_artifacts(bundle_dir, tmp_path):
    outs = []
    for i, threads in enumerate(("1", "4")):
        out = tmp_path / f"t{i}"
        assert run(
            ["eval", manifest(bundle_dir), "--scorer", "gen", "--threads", threads,
             "--out", str(out)]
        ) == 0
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]


def test_ablate_last_row_matches_full_eval(bundle_dir, tmp_path, capsys):
    out_ab = tmp_path / "ab"
    out_ev = tmp_path / "ev"
    assert run(["ablate", manifest(bundle_dir), "--temp", "3", "--out", str(out_ab)]) == 0
    assert run(["eval", manifest(bundle_dir), "--scorer", "otod", "--temp", "3",
                "--out", str(out_ev)]) == 0
    rows = json.loads((out_ab / "ablation.json").read_text())["rows"]
    full = json.loads((out_ev / "report.json").read_text())["report"]["average"]
    assert [r["parts"] for r in rows] == [
        "features", "features+logits", "features+logits+probs",
    ]
    assert rows[2]["mean_fpr_at_95"] == full["fpr_at_95"]
    assert rows[2]["mean_auroc"] == full["auroc"]
    for row in rows:
        assert 0.0 <= row["mean_fpr_at_95"] <= 1.0
        assert 0.0 <= row["mean_auroc"] <= 1.0
    assert (out_ab / "ablation.md").read_text(encoding="utf-8").count("|") > 0


def test_sweep_temp_grid_order_and_single_point(bundle_dir, tmp_path):
    out = tmp_path / "sw"
    assert run(["sweep-temp", manifest(bundle_dir), "--temps", "1,3,10",
                "--out", str(out)]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("# format_version:")
    assert lines[2] == "T,mean_fpr_at_95,mean_auroc"
    temps = [float(line.split(",")[0]) for line in lines[3:]]
    assert temps == [1.0, 3.0, 10.0]

    # a one-point grid must agree with a plain eval at that temperature
    out1 = tmp_path / "sw1"
    out_ev = tmp_path / "ev1"
    assert run(["sweep-temp", manifest(bundle_dir), "--temps", "1", "--out", str(out1)]) == 0
    assert run(["eval", manifest(bundle_dir), "--scorer", "otod", "--temp", "1",
                "--out", str(out_ev)]) == 0
    row = (out1 / "sweep.csv").read_text().splitlines()[3].split(",")
    full = json.loads((out_ev / "report.json").read_text())["report"]["average"]
    assert float(row[1]) == full["fpr_at_95"]
    assert float(row[2]) == full["auroc"]


def test_sweep_temp_rejects_nonpositive_grid(bundle_dir, tmp_path):
    assert run(["sweep-temp", manifest(bundle_dir), "--temps", "1,0,-2",
                "--out", str(tmp_path)]) == 1


def test_simulate_seeded_rerun_is_byte_identical(tmp_path):
    args = ["simulate", "--shifts", "0,0.5,1", "--n", "300", "--seed", "7"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert (a / "simulation.csv").read_bytes() == (b / "simulation.csv").read_bytes()
    assert (a / "simulation.json").read_bytes() == (b / "simulation.json").read_bytes()


def test_simulate_single_zero_shift_null(tmp_path):
    out = tmp_path / "sim"
    assert run(["simulate", "--shifts", "0", "--n", "4000", "--out", str(out)]) == 0
    points = json.loads((out / "simulation.json").read_text())["points"]
    assert len(points) == 1
    assert abs(points[0]["md"]) <= 3.0 * points[0]["stderr"]


def test_simulate_rejects_bad_shift_grid(tmp_path):
    assert run(["simulate", "--shifts", "1,2", "--out", str(tmp_path / "x")]) == 1
