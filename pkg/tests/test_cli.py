import json

import pytest

from rooflm.cli import main


@pytest.fixture
def config_files(tmp_path):
    model = tmp_path / "model.json"
    model.write_text(
        json.dumps({"arch": "DLM", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000})
    )
    hardware = tmp_path / "hw.json"
    hardware.write_text(json.dumps({"p_max": 1e12, "b_mem": 1e10, "capacity": 1e12}))
    workload = tmp_path / "wl.json"
    workload.write_text(json.dumps({"batch": 1, "prompt_len": 0, "gen_len": 16}))
    return {"model": model, "hardware": hardware, "workload": workload}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_toy_report(self, capsys, config_files):
        code, out, err = run(
            capsys,
            "analyze",
            "--model", str(config_files["model"]),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
            "--intensity-source", "published",
        )
        assert code == 0
        assert err == ""
        assert "throughput: 7.96178e+06 tokens/s" in out
        assert "regime: MemoryBound" in out
        assert "ridge point: 100" in out

    def test_schedule_source_labeled(self, capsys, config_files):
        code, out, _ = run(
            capsys,
            "analyze",
            "--model", str(config_files["model"]),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
        )
        assert code == 0
        assert "intensity source: schedule" in out

    def test_csv_output(self, capsys, config_files, tmp_path):
        csv_path = tmp_path / "row.csv"
        code, _, _ = run(
            capsys,
            "analyze",
            "--model", str(config_files["model"]),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
            "--csv", str(csv_path),
        )
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("arch,accel,batch")

    def test_missing_file_exits_1(self, capsys, config_files, tmp_path):
        code, out, err = run(
            capsys,
            "analyze",
            "--model", str(tmp_path / "absent.json"),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
        )
        assert code == 1
        assert out == ""
        assert "absent.json" in err

    def test_malformed_json_exits_2_with_location(self, capsys, config_files, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"arch": "DLM",\n  broken')
        code, out, err = run(
            capsys,
            "analyze",
            "--model", str(bad),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
        )
        assert code == 2
        assert "line 2" in err

    def test_invalid_config_exits_2(self, capsys, config_files, tmp_path):
        bad = tmp_path / "bad_model.json"
        bad.write_text(json.dumps({"arch": "DLM", "n_l": 2, "n_h": 2, "n_d": 4, "d": 9, "alpha": 4, "N": 1000}))
        code, _, err = run(
            capsys,
            "analyze",
            "--model", str(bad),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
        )
        assert code == 2
        assert "dimension_mismatch" in err

    def test_unknown_field_lenient_warns_on_stderr(self, capsys, config_files, tmp_path):
        odd = tmp_path / "odd.json"
        odd.write_text(
            json.dumps({"arch": "DLM", "n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000, "note": "x"})
        )
        code, out, err = run(
            capsys,
            "analyze",
            "--model", str(odd),
            "--hardware", str(config_files["hardware"]),
            "--workload", str(config_files["workload"]),
            "--lenient-config",
        )
        assert code == 0
        assert "note" in err
        assert "note" not in out


class TestRidge:
    def test_default_profile(self, capsys):
        code, out, err = run(capsys, "ridge")
        assert code == 0
        assert out.strip() == "156"

    def test_custom_hardware(self, capsys, config_files):
        code, out, _ = run(capsys, "ridge", "--hardware", str(config_files["hardware"]))
        assert code == 0
        assert out.strip() == "100"


class TestSweep:
    def test_writes_report_set(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(
            json.dumps(
                {
                    "gen_lens": [8, 16],
                    "batches": [1, 2],
                    "prompt_lens": [0, 4],
                    "models": {
                        "AR": {"n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000},
                        "DLM": {"n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000},
                        "BlockDiffusion": {"n_l": 2, "n_h": 2, "n_d": 4, "d": 8, "alpha": 4, "N": 1000, "G": 4},
                    },
                    "hardware": {"p_max": 1e12, "b_mem": 1e10, "capacity": 1e12},
                }
            )
        )
        out_dir = tmp_path / "out"
        code, out, err = run(capsys, "sweep", "--spec", str(spec), "--out-dir", str(out_dir))
        assert code == 0
        assert (out_dir / "sweep.csv").exists()
        assert len(list(out_dir.glob("*.svg"))) == 4
        csv = (out_dir / "sweep.csv").read_text()
        assert len(csv.splitlines()) == 1 + 3 * 2 * 2 * 2

    def test_bad_spec_exits_2(self, capsys, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"batches": [4, 2]}))
        code, _, err = run(capsys, "sweep", "--spec", str(spec), "--out-dir", str(tmp_path / "o"))
        assert code == 2
        assert "not_increasing" in err


class TestOracleCheckCommand:
    def test_passes_and_writes_reports(self, capsys, tmp_path):
        out_dir = tmp_path / "oracle"
        code, out, err = run(capsys, "oracle-check", "--out-dir", str(out_dir))
        assert code == 0
        assert err == ""
        assert "overall: PASS" in out
        assert (out_dir / "oracle_report.txt").exists()
        csv = (out_dir / "oracle_report.csv").read_text()
        assert csv.splitlines()[0] == (
            "config,variable,point,analytic,oracle,ratio,exponent_analytic,exponent_oracle,verdict"
        )
