import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from sdmawc.cli import main
from sdmawc.errors import InvalidArgument
from sdmawc.io import detect_kind, fmt, schema, timestamp, validate_document
from sdmawc.pmf import binary_entropy

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def load(name: str) -> dict:
    return json.loads((CONFIGS / f"{name}.json").read_text())


def dump(tmp_path: Path, doc: dict, name="cfg.json") -> str:
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSchemas:
    @pytest.mark.parametrize("name,kind", [("example1_r11", "region"), ("constant_channel", "region"),
                                           ("regression_n12", "sim"), ("leakage_tiny", "sim")])
    def test_shipped_configs_validate(self, name, kind):
        doc = load(name)
        assert detect_kind(doc) == kind
        validate_document(doc, kind)

    def test_missing_kernel(self):
        doc = load("constant_channel")
        del doc["channel"]["kernel"]
        with pytest.raises(InvalidArgument, match="kernel"):
            validate_document(doc, "region")

    def test_unknown_schema(self):
        with pytest.raises(InvalidArgument):
            schema("nope")

    def test_fmt(self):
        assert fmt(1 / 3) == "0.333333333333"
        assert fmt(None) == "" and fmt(True) == "True" and fmt(3) == "3"

    def test_timestamp_from_environment(self, monkeypatch):
        monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
        assert timestamp() == "1970-01-01T00:00:00Z"
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "86400")
        assert timestamp() == "1970-01-02T00:00:00Z"


class TestExitCodes:
    def test_region_ok(self, tmp_path):
        out = tmp_path / "o"
        assert main(["region", "--config", str(CONFIGS / "example1_r11.json"), "--out", str(out)]) == 0
        rows = read_csv(out / "region_R11.csv")
        assert rows and set(rows[0]) == {"region", "vertex", "R1", "R2", "source"}
        target = 1 - binary_entropy(0.75)  # below 1 - p = 0.25
        assert any(abs(float(r["R1"]) - target) <= 1e-6 and float(r["R2"]) == 0.0 for r in rows)
        manifest = json.loads((out / "manifest.json").read_text())
        assert {o["file"] for o in manifest["outputs"]} == {"region_R11.csv", "region_R11.json"}

    def test_missing_kernel_is_usage_error(self, tmp_path, capsys):
        doc = load("constant_channel")
        del doc["channel"]["kernel"]
        code = main(["region", "--config", dump(tmp_path, doc), "--out", str(tmp_path / "o")])
        assert code == 2
        assert "kernel" in capsys.readouterr().err

    def test_unreadable_config(self, tmp_path):
        assert main(["validate", "--config", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text("{")
        assert main(["validate", "--config", str(bad)]) == 2

    def test_zero_trials(self, tmp_path):
        code = main(["simulate", "--config", str(CONFIGS / "leakage_tiny.json"),
                     "--out", str(tmp_path / "o"), "--trials", "0"])
        assert code == 2

    def test_budget_is_resource_error(self, tmp_path):
        doc = load("regression_n12")
        doc["budget"] = 10
        code = main(["simulate", "--config", dump(tmp_path, doc), "--out", str(tmp_path / "o"),
                     "--trials", "1"])
        assert code == 3

    def test_search_budget_is_resource_error(self, tmp_path):
        doc = load("constant_channel")
        doc["search"] = {"samples": 100, "budget": 5}
        assert main(["region", "--config", dump(tmp_path, doc), "--out", str(tmp_path / "o")]) == 3

    def test_unknown_region(self, tmp_path):
        code = main(["region", "--config", str(CONFIGS / "constant_channel.json"),
                     "--out", str(tmp_path / "o"), "--region", "R99"])
        assert code == 2

    def test_non_degraded_channel_rejected_for_degraded_regions(self, tmp_path):
        doc = load("example1_r11")
        code = main(["region", "--config", dump(tmp_path, doc), "--out", str(tmp_path / "o"),
                     "--region", "D11"])
        assert code == 2

    def test_example_probability_domain(self, tmp_path):
        assert main(["example", "1a", "--out", str(tmp_path), "--p", "1.5"]) == 2

    def test_validate(self, capsys):
        assert main(["validate", "--config", str(CONFIGS / "regression_n12.json")]) == 0
        assert "valid sim config" in capsys.readouterr().out

    def test_argparse_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["region"])
        assert exc.value.code == 2


class TestOutputs:
    def test_simulate_report(self, tmp_path):
        out = tmp_path / "o"
        assert main(["simulate", "--config", str(CONFIGS / "leakage_tiny.json"), "--out", str(out),
                     "--trials", "5", "--transcript"]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["trials"] == 5 and report["leakage"]["mode"] == "exact"
        assert "derived_rates" in report
        assert len(read_csv(out / "transcript.csv")) == 5

    def test_example_1a_columns(self, tmp_path):
        assert main(["example", "1a", "--out", str(tmp_path), "--p", "0.9", "--grid", "100"]) == 0
        (row,) = read_csv(tmp_path / "example1a.csv")
        assert row["scheme1_contains"] == "True" and row["separated"] == "True"

    def test_example_2_curve(self, tmp_path):
        assert main(["example", "2", "--out", str(tmp_path), "--grid", "10"]) == 0
        rows = read_csv(tmp_path / "example2_curve.csv")
        assert [float(r["alpha"]) for r in rows] == [0.5 + k / 10 for k in range(6)]
        assert float(rows[-1]["R1_max"]) == 0.0

    def test_constant_channel_single_vertex(self, tmp_path):
        assert main(["region", "--config", str(CONFIGS / "constant_channel.json"),
                     "--out", str(tmp_path)]) == 0
        (row,) = read_csv(tmp_path / "region_R1.csv")
        assert (float(row["R1"]), float(row["R2"])) == (0.0, 0.0)

    def test_example_2_without_key_resource(self, tmp_path):
        assert main(["example", "2", "--out", str(tmp_path), "--q", "0", "--p", "0",
                     "--grid", "10"]) == 0
        rows = read_csv(tmp_path / "example2_curve.csv")
        assert all(float(r["R1_max"]) == 0.0 for r in rows)

    def test_example_1b_point(self, tmp_path):
        assert main(["example", "1b", "--out", str(tmp_path), "--p", "0.1"]) == 0
        (row,) = read_csv(tmp_path / "example1b.csv")
        assert row["key_condition"] == "True" and row["scheme2_contains"] == "True"

    def test_entry_point_runs(self, tmp_path):
        res = subprocess.run([sys.executable, "-m", "sdmawc.cli", "validate", "--config",
                              str(CONFIGS / "constant_channel.json")], capture_output=True, text=True)
        assert res.returncode == 0


def snapshot(directory: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


@pytest.mark.parametrize("argv", [
    ["region", "--config", str(CONFIGS / "example1_r11.json")],
    ["example", "1b"],
    ["example", "2", "--grid", "20"],
    ["simulate", "--config", str(CONFIGS / "leakage_tiny.json"), "--trials", "10", "--transcript"],
])
def test_reruns_are_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert snapshot(a) == snapshot(b)
