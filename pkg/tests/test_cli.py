import json
import struct

import pytest

from lfl.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_PASS, EXIT_TOLERANCE, main
from lfl.models.foliation import ModelKind, build_model
from lfl.services.metric_generator import seeded_fourier_metric
from lfl.utils.field_io import MAGIC, read_field

from conftest import grid


def write_config(tmp_path, name="run.json", **overrides):
    config = {
        "model": {"n": 1, "kind": "periodic_product", "sizes": [32, 32, 32]},
        "metric": {"source": "seeded_fourier", "seed": 42, "cutoff": 3, "amplitude": 0.1},
    }
    config.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestGenMetric:
    def test_writes_field_and_sidecar(self, tmp_path):
        out = tmp_path / "out"
        assert main(["gen-metric", "--config", write_config(tmp_path), "--out", str(out)]) == EXIT_PASS
        assert (out / "metric.lfld").exists()
        assert read_json(out / "metric.json")["grid"]["sizes"] == [32, 32, 32]

    def test_byte_identical_reruns(self, tmp_path):
        config = write_config(tmp_path)
        main(["gen-metric", "--config", config, "--out", str(tmp_path / "a")])
        main(["gen-metric", "--config", config, "--out", str(tmp_path / "b")])
        assert (tmp_path / "a" / "metric.lfld").read_bytes() == (tmp_path / "b" / "metric.lfld").read_bytes()

    def test_golden_configuration(self, tmp_path):
        out = tmp_path / "out"
        assert main(["gen-metric", "--config", write_config(tmp_path), "--out", str(out)]) == EXIT_PASS
        raw = (out / "metric.lfld").read_bytes()
        assert raw[:8] == MAGIC
        assert struct.unpack_from("<4IB", raw, 8) == (3, 32, 32, 32, 0)
        model = build_model(1, ModelKind.PERIODIC_PRODUCT, grid(32))
        expected = seeded_fourier_metric(model, 42, 3, 0.1, 2.0).u
        assert raw[25:] == expected.astype("<f8").tobytes()
        assert read_field(out / "metric.lfld").tobytes() == expected.tobytes()

    def test_cutoff_too_large(self, tmp_path):
        out = tmp_path / "out"
        code = main(["gen-metric", "--config", write_config(tmp_path), "--size", "8", "--out", str(out)])
        assert code == EXIT_CONFIG
        failure = read_json(out / "failure.json")
        assert failure["status"] == "error"
        assert failure["exit_code"] == EXIT_CONFIG
        assert failure["error_type"] == "ConfigError"

    def test_preset_source_rejected(self, tmp_path):
        config = write_config(tmp_path, metric={"source": "preset", "name": "zero"})
        assert main(["gen-metric", "--config", config, "--out", str(tmp_path)]) == EXIT_CONFIG


class TestChecks:
    @pytest.mark.parametrize("check", ["identity", "exactness", "integral", "remark"])
    def test_pass(self, tmp_path, check):
        out = tmp_path / "out"
        code = main(["check", check, "--config", write_config(tmp_path), "--out", str(out)])
        assert code == EXIT_PASS
        report = read_json(out / f"{check}.json")
        assert report["pass"] is True
        assert report["checks"][0]["check"] == check
        assert (out / "slice_bulk.csv").exists()

    def test_tolerance_failure(self, tmp_path):
        config = write_config(tmp_path, tolerances={"identity": 1e-300})
        assert main(["check", "identity", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_TOLERANCE
        assert read_json(tmp_path / "out" / "identity.json")["pass"] is False

    def test_reports_are_reproducible(self, tmp_path):
        config = write_config(tmp_path)
        for name in ("a", "b"):
            main(["check", "integral", "--config", config, "--out", str(tmp_path / name)])
        first, second = (read_json(tmp_path / name / "integral.json") for name in ("a", "b"))
        for report in (first, second):
            report.pop("elapsed_seconds")
            report.pop("outputs")
        assert first == second

    def test_remark_needs_dimension_three(self, tmp_path):
        config = write_config(
            tmp_path,
            model={"n": 2, "sizes": [8, 8, 8, 8, 8]},
            metric={"source": "seeded_fourier", "seed": 1, "cutoff": 1, "amplitude": 0.1},
        )
        out = tmp_path / "out"
        assert main(["check", "remark", "--config", config, "--out", str(out)]) == EXIT_CONFIG
        assert read_json(out / "failure.json")["error_type"] == "ModelMismatchError"

    @pytest.mark.parametrize("check", ["identity", "exactness", "integral", "remark"])
    def test_overflowing_metric(self, tmp_path, check):
        config = write_config(tmp_path, metric={"source": "preset", "name": "cosine", "epsilon": 800.0})
        out = tmp_path / "out"
        assert main(["check", check, "--config", config, "--size", "16", "--out", str(out)]) == EXIT_NUMERICAL
        failure = read_json(out / "failure.json")
        assert failure["exit_code"] == EXIT_NUMERICAL
        assert failure["error_type"] == "NumericalError"
        assert not (out / f"{check}.json").exists()

    def test_unknown_key(self, tmp_path):
        config = write_config(tmp_path, colour="blue")
        assert main(["check", "identity", "--config", config, "--out", str(tmp_path)]) == EXIT_CONFIG
        assert read_json(tmp_path / "failure.json")["error_type"] == "ValidationError"

    def test_missing_config(self, tmp_path):
        assert main(["check", "identity", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_CONFIG


class TestExponent:
    def test_patch_quadratic(self, tmp_path):
        config = write_config(
            tmp_path,
            model={"n": 1, "kind": "open_patch", "sizes": [21, 21, 5]},
            metric={"source": "preset", "name": "quadratic"},
        )
        out = tmp_path / "out"
        assert main(["exponent", "--config", config, "--out", str(out)]) == EXIT_PASS
        report = read_json(out / "exponent.json")
        assert report["exponent"]["eta"] == pytest.approx(1 / 3, abs=1e-6)
        assert [c["check"] for c in report["checks"]] == ["oracle"]
        assert (out / "slice_s.csv").exists()

    def test_metric_from_file(self, tmp_path):
        config = write_config(tmp_path)
        main(["gen-metric", "--config", config, "--out", str(tmp_path / "gen")])
        file_config = write_config(
            tmp_path, name="file.json", metric={"source": "file", "path": str(tmp_path / "gen" / "metric.lfld")}
        )
        out = tmp_path / "out"
        assert main(["exponent", "--config", file_config, "--out", str(out)]) == EXIT_PASS
        report = read_json(out / "exponent.json")
        assert report["exponent"]["eta"] == 0.0
        assert [c["check"] for c in report["checks"]] == ["oracle", "bound"]


def test_optimize_on_torus(tmp_path):
    config = write_config(
        tmp_path,
        model={"sizes": [8, 8, 8]},
        metric={"source": "preset", "name": "zero"},
        optimizer={"cutoff": 1, "max_iterations_phase1": 10, "stall_iterations": 5},
        seed=5,
    )
    out = tmp_path / "out"
    assert main(["optimize", "--config", config, "--out", str(out)]) == EXIT_PASS
    report = read_json(out / "optimize.json")
    assert report["exponent"]["eta"] == 0.0
    assert "mean trace" in report["exponent"]["reason"]
    trace = (out / "trace.csv").read_text().splitlines()
    assert trace[0] == "iteration,phase,temperature,min_eig,s_max,eta,simplex_size,objective"


def test_convergence(tmp_path):
    config = write_config(tmp_path, metric={"source": "seeded_fourier", "seed": 0, "cutoff": 2, "amplitude": 0.1})
    out = tmp_path / "out"
    assert main(["convergence", "--config", config, "--out", str(out)]) == EXIT_PASS
    report = read_json(out / "convergence.json")
    assert len(report["convergence"]) == 3
    assert [c["check"] for c in report["checks"]] == ["convergence"]
    assert report["pass"] is True
    assert (out / "convergence.csv").exists()


def test_report_merge(tmp_path):
    main(["check", "integral", "--config", write_config(tmp_path), "--out", str(tmp_path / "good")])
    good_report = str(tmp_path / "good" / "integral.json")
    failed = read_json(good_report)
    failed["pass"] = False
    failed["status"] = "fail"
    failed["checks"][0]["pass"] = False
    failed_path = tmp_path / "failed.json"
    failed_path.write_text(json.dumps(failed))
    bad_report = str(failed_path)

    merged = tmp_path / "merged.json"
    assert main(["report", "merge", good_report, good_report, "--out", str(merged)]) == EXIT_PASS
    assert read_json(merged)["pass"] is True
    assert main(["report", "merge", good_report, bad_report, "--out", str(merged)]) == EXIT_TOLERANCE
    merged_report = read_json(merged)
    assert merged_report["pass"] is False
    assert len(merged_report["checks"]) == 4


def test_no_command():
    assert main([]) == EXIT_CONFIG
