"""Tests for the batch command-line front end."""

import io
import json

import numpy as np
import pytest

from mirrorpair import fig2_params, tmsv_state
from mirrorpair.cli import (
    CSV_COLUMNS,
    CSV_COLUMNS_BARE,
    SweepSpec,
    check_state,
    main,
    parse_config_text,
    run_sweep,
)
from mirrorpair.errors import ConfigError


class TestConfigParsing:
    def test_comments_blanks_and_values(self):
        values = parse_config_text(
            "# a comment\n"
            "\n"
            "big_omega = 2e5   # trailing comment\n"
            "temperatures = 0.1, 4.0\n"
        )
        assert values == {"big_omega": "2e5", "temperatures": "0.1, 4.0"}

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config_text("big_omega 2e5\n")

    def test_empty_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("big_omega =\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("g = 1\ng = 2\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys"):
            parse_config_text("coupling_exponent = 3\n")


class TestSweepSpec:
    def test_defaults_center_on_resonance(self):
        spec = SweepSpec.from_config({})
        om = spec.params.big_omega
        assert spec.omega_min == pytest.approx(0.5 * om)
        assert spec.omega_max == pytest.approx(1.5 * om)
        assert spec.omega_count == 2001
        assert spec.omega_spacing == "linear"

    def test_bad_grid_rejected(self):
        params = fig2_params()
        with pytest.raises(ConfigError):
            SweepSpec(params=params, omega_min=2e5, omega_max=1e5, omega_count=10)
        with pytest.raises(ConfigError):
            SweepSpec(params=params, omega_min=-1.0, omega_max=1e5, omega_count=10)
        with pytest.raises(ConfigError):
            SweepSpec(params=params, omega_min=1e5, omega_max=2e5,
                      omega_count=10, omega_spacing="cubic")

    def test_temperatures_must_increase(self):
        params = fig2_params()
        with pytest.raises(ConfigError):
            SweepSpec(params=params, omega_min=1e5, omega_max=2e5,
                      omega_count=10, temperatures=(4.0, 0.1))

    def test_bad_physical_value_becomes_config_error(self):
        with pytest.raises(ConfigError):
            SweepSpec.from_config({"big_omega": "-1"})

    def test_grid_spacings(self):
        params = fig2_params()
        lin = SweepSpec(params=params, omega_min=1e4, omega_max=1e6,
                        omega_count=11).omega_grid()
        assert np.allclose(np.diff(lin), lin[1] - lin[0])
        log = SweepSpec(params=params, omega_min=1e4, omega_max=1e6,
                        omega_count=11, omega_spacing="log").omega_grid()
        assert np.allclose(np.diff(np.log(log)), np.log(log[1] / log[0]))
        hyb = SweepSpec(params=params, omega_min=1e4, omega_max=1e6,
                        omega_count=11, omega_spacing="hybrid").omega_grid()
        assert hyb.size > 2000  # hybrid ignores the count and uses the
        assert np.all(np.diff(hyb) > 0)  # standard dense-plus-log grid


class TestRunSweep:
    def test_single_point_sweep(self, tmp_path):
        params = fig2_params()
        spec = SweepSpec(params=params, omega_min=params.big_omega,
                         omega_max=params.big_omega, omega_count=1,
                         temperatures=(0.1,))
        summary = run_sweep(spec, tmp_path)
        lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 2
        fields = dict(zip(CSV_COLUMNS, lines[1].split(",")))
        assert float(fields["degree"]) == pytest.approx(0.01002, rel=1e-3)
        assert fields["entangled"] == "true"
        assert fields["epr"] == "true"
        entry = summary["temperatures"][0]
        assert entry["argmin_omega"] == params.big_omega
        assert entry["min_degree"] < 0.25

    def test_bare_columns(self, tmp_path):
        params = fig2_params()
        spec = SweepSpec(params=params, omega_min=params.big_omega,
                         omega_max=params.big_omega, omega_count=1,
                         temperatures=(0.1,), emit_components=False)
        run_sweep(spec, tmp_path)
        lines = (tmp_path / "sweep.csv").read_text().strip().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS_BARE)

    def test_summary_bands_and_json_shape(self, tmp_path):
        params = fig2_params()
        spec = SweepSpec(params=params, omega_min=0.5 * params.big_omega,
                         omega_max=1.5 * params.big_omega, omega_count=201,
                         temperatures=(0.1, 4.0))
        run_sweep(spec, tmp_path)
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert [e["temperature"] for e in summary["temperatures"]] == [0.1, 4.0]
        for entry in summary["temperatures"]:
            assert entry["entangled_bands"], "expected an entangled band"
            for lo, hi in entry["entangled_bands"]:
                assert lo <= entry["argmin_omega"] <= hi or len(
                    entry["entangled_bands"]) > 1

    def test_grid_file_blocks(self, tmp_path):
        params = fig2_params()
        spec = SweepSpec(params=params, omega_min=0.9 * params.big_omega,
                         omega_max=1.1 * params.big_omega, omega_count=5,
                         temperatures=(0.1, 4.0))
        run_sweep(spec, tmp_path, emit_grid=True)
        blocks = (tmp_path / "sweep.grid").read_text().strip().split("\n\n")
        assert len(blocks) == 2
        assert all(len(b.splitlines()) == 5 for b in blocks)
        for line in blocks[0].splitlines():
            assert len(line.split()) == 3

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        params = fig2_params()
        spec = SweepSpec(params=params, omega_min=0.8 * params.big_omega,
                         omega_max=1.2 * params.big_omega, omega_count=300,
                         temperatures=(0.1,))
        run_sweep(spec, tmp_path / "serial")
        import dataclasses
        run_sweep(dataclasses.replace(spec, workers=4), tmp_path / "parallel")
        serial = (tmp_path / "serial" / "sweep.csv").read_bytes()
        parallel = (tmp_path / "parallel" / "sweep.csv").read_bytes()
        assert serial == parallel


class TestCheckState:
    def test_tmsv_reported_entangled(self, tmp_path):
        path = tmp_path / "tmsv.txt"
        tmsv_state(1.0).to_file(path)
        sink = io.StringIO()
        report = check_state(path, out=sink)
        assert report["entangled"] and report["epr"]
        assert report["optimal_product"] == pytest.approx(np.exp(-4.0), rel=1e-9)
        assert "entangled:        yes" in sink.getvalue()

    def test_vacuum_reported_separable(self, tmp_path):
        path = tmp_path / "vac.txt"
        np.savetxt(path, 0.5 * np.eye(4))
        sink = io.StringIO()
        report = check_state(path, out=sink)
        assert not report["entangled"]
        assert "entangled:        no" in sink.getvalue()


class TestMainExitCodes:
    def test_sweep_happy_path(self, tmp_path):
        config = tmp_path / "cfg.txt"
        config.write_text(
            "omega_count = 3\ntemperatures = 0.1\n", encoding="utf-8"
        )
        code = main(["--sweep", "--config", str(config), "--out",
                     str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "sweep.csv").exists()

    def test_config_error_exit_2(self, tmp_path):
        config = tmp_path / "cfg.txt"
        config.write_text("bogus_key = 1\n", encoding="utf-8")
        assert main(["--sweep", "--config", str(config)]) == 2

    def test_missing_config_exit_2(self, tmp_path):
        assert main(["--sweep", "--config", str(tmp_path / "nope.txt")]) == 2

    def test_require_stable_exit_3(self, tmp_path):
        # the reference working point is formally unstable, so opting in to
        # the stability gate must abort the sweep
        config = tmp_path / "cfg.txt"
        config.write_text(
            "omega_count = 3\ntemperatures = 0.1\nrequire_stable = true\n",
            encoding="utf-8",
        )
        assert main(["--sweep", "--config", str(config),
                     "--out", str(tmp_path / "out")]) == 3

    def test_unphysical_state_exit_5(self, tmp_path):
        path = tmp_path / "bad.txt"
        np.savetxt(path, 0.05 * np.eye(4))
        assert main(["--check-state", str(path)]) == 5

    def test_workers_flag_overrides_config(self, tmp_path):
        config = tmp_path / "cfg.txt"
        config.write_text(
            "omega_count = 64\ntemperatures = 0.1\n", encoding="utf-8"
        )
        code = main(["--sweep", "--config", str(config), "--workers", "2",
                     "--out", str(tmp_path / "out")])
        assert code == 0
