"""
Tests for configuration parsing and the command line
"""
import json
import math

import pytest

from SquidSim import __version__, runner
from SquidSim.config import emit_config, get_settings, parse_config
from SquidSim.exceptions import ConfigError
from SquidSim.main import main
from SquidSim.schemas import (
    GAIN_COLUMNS,
    IMPEDANCE_COLUMNS,
    InputCircuitParams,
    SimConfig,
    StriplineParams,
    SweepSpec,
)
from SquidSim.utils import squid_from_groups

MINIMAL = """
# SQUID
critical_current = 1e-5
junction_resistance = 10
junction_capacitance = 0
loop_inductance = 3e-11
bias_current = 2e-5

# Stripline: l = c = 1, Lambda = pi
inductance_per_length = 1
capacitance_per_length = 1
length = 3.141592653589793
fundamental_mutual = 1e-9

shunt_resistance = 1
coupling_capacitance = 1
"""


@pytest.fixture
def unit_run(write_config):
    """Overdamped SQUID on the unit line with short integrations"""

    def _write(**squid_groups):
        groups = dict(beta_L=1.0, beta_c=0.0, i=2.0, phi_e=0.25)
        groups.update(squid_groups)
        return write_config(
            squid_from_groups(**groups),
            StriplineParams(
                inductance_per_length=1.0, capacitance_per_length=1.0, length=math.pi, fundamental_mutual=0.0,
            ),
            InputCircuitParams(shunt_resistance=1.0, coupling_capacitance=1.0),
            SimConfig(step=0.05, transient_skip=50.0, averaging_window=200.0),
            SweepSpec(start=0.5, stop=1.5, points=5),
        )

    return _write


class TestParseConfig:
    """Flat key-value configuration parsing"""

    def test_defaults(self):
        """Test omitted keys take their documented defaults"""
        cfg = parse_config(MINIMAL)
        assert cfg.squid.external_flux == 0.0
        assert cfg.input.source_resistance == 0.0
        assert cfg.input.input_amplitude == 1e-6
        assert cfg.sim == SimConfig()
        assert cfg.sweep.start == pytest.approx(0.5)
        assert cfg.sweep.stop == pytest.approx(1.5)
        assert (cfg.sweep.points, cfg.sweep.spacing) == (201, "linear")

    def test_invariant_violation_cites_bound(self):
        """Test a negative capacitance names the key and its invariant"""
        text = MINIMAL.replace("junction_capacitance = 0", "junction_capacitance = -1e-12")
        with pytest.raises(ConfigError) as exc_info:
            parse_config(text)
        assert any("junction_capacitance" in p and "C_J ≥ 0" in p for p in exc_info.value.problems)

    def test_unknown_key(self):
        """Test an unknown key is reported by name"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config(MINIMAL + "frobnicate = 3\n")
        assert "frobnicate: unknown key" in exc_info.value.problems

    def test_missing_key(self):
        """Test a missing required key is reported"""
        text = MINIMAL.replace("bias_current = 2e-5", "")
        with pytest.raises(ConfigError) as exc_info:
            parse_config(text)
        assert any(p.startswith("bias_current: missing") for p in exc_info.value.problems)

    def test_all_problems_reported(self):
        """Test violations in different sections are all collected"""
        text = MINIMAL.replace("junction_resistance = 10", "junction_resistance = -1")
        text = text.replace("coupling_capacitance = 1", "coupling_capacitance = 0")
        with pytest.raises(ConfigError) as exc_info:
            parse_config(text)
        assert exc_info.value.problems == [
            "junction_resistance = -1.0: violates R_J > 0",
            "coupling_capacitance = 0.0: violates C_i > 0",
        ]

    def test_bad_number(self):
        """Test a value that is not a number is reported"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config(MINIMAL.replace("length = 3.141592653589793", "length = abc"))
        assert exc_info.value.problems == ["length = 'abc': not a valid float"]

    def test_cross_field_invariant(self):
        """Test a too-short averaging window cites its bound"""
        with pytest.raises(ConfigError) as exc_info:
            parse_config(MINIMAL + "step = 1\naveraging_window = 10\n")
        assert exc_info.value.problems == ["sim: violates averaging_window ≥ 100·step"]

    def test_round_trip(self):
        """Test emitting and reparsing reproduces the configuration"""
        cfg = parse_config(MINIMAL.replace("shunt_resistance = 1", "shunt_resistance = inf"))
        text = emit_config(cfg)
        assert "shunt_resistance = inf" in text
        assert parse_config(text) == cfg

    def test_round_trip_varied(self):
        """Test round trips over configurations with every key set"""
        for k, spacing in enumerate(("linear", "log")):
            cfg = parse_config(
                MINIMAL
                + f"external_flux = {1e-16 * (k + 1)}\nsource_resistance = {0.1 * k}\nseed = {k}\n"
                + f"initial_jitter = {0.3 * k}\nsweep_points = {7 + k}\nsweep_spacing = {spacing}\n"
                + "sweep_start = 0.25\nsweep_stop = 4\nstep = 0.0025\n"
            )
            assert parse_config(emit_config(cfg)) == cfg


class TestCommands:
    """Subcommand output and exit codes"""

    def test_modes_unit_line(self, unit_run, capsys):
        """Test modes on the unit line give omega = 1..5"""
        assert main(["modes", str(unit_run()), "--count", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "index,wavenumber_per_m,omega_rad_s,inductance_h,capacitance_f,mutual_h"
        omegas = [float(line.split(",")[2]) for line in lines[1:]]
        assert omegas == pytest.approx([1.0, 2.0, 3.0, 4.0, 5.0])

    def test_impedance_header_and_flags(self, unit_run, capsys):
        """Test the impedance table header and validity flags"""
        assert main(["impedance", str(unit_run())]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(IMPEDANCE_COLUMNS) == "omega_rad_s,re_z_ohm,im_z_ohm,abs_z_ohm,warn_flag"
        assert len(lines) == 6
        assert [line.split(",")[-1] for line in lines[1:]] == ["0"] * 5

    def test_iv_below_critical_current(self, write_config, capsys):
        """Test bias below 2 I_c at small beta_L gives zero voltage"""
        path = write_config(
            squid_from_groups(0.01, 0.0, 1.0, 0.0),
            StriplineParams(
                inductance_per_length=1.0, capacitance_per_length=1.0, length=math.pi, fundamental_mutual=1e-9,
            ),
            InputCircuitParams(shunt_resistance=1.0, coupling_capacitance=1.0),
            SimConfig(step=0.005, transient_skip=50.0, averaging_window=50.0),
        )
        code = main(["iv", str(path), "--bias-start", "0", "--bias-stop", "1.9", "--bias-points", "5"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "bias_current_a,mean_voltage_v,circulating_current_a,josephson_frequency_rad_s,converged"
        assert len(lines) == 6
        for line in lines[1:]:
            fields = line.split(",")
            assert float(fields[1]) == 0.0
            assert fields[4] == "1"

    def test_gain_decoupled(self, unit_run, capsys):
        """Test gain with M_1 = 0 is zero at every frequency"""
        assert main(["gain", str(unit_run())]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(GAIN_COLUMNS)
        assert lines[0] == (
            "omega_rad_s,re_gain,im_gain,abs_gain,re_z,im_z,abs_z_loaded,screening_ratio,warn_flag"
        )
        assert all(float(line.split(",")[3]) == 0.0 for line in lines[1:])

    def test_gain_renormalized_columns(self, unit_run, capsys):
        """Test --renormalized appends the comparison columns"""
        assert main(["gain", str(unit_run()), "--renormalized"]) == 0
        header = capsys.readouterr().out.splitlines()[0]
        assert header.endswith(",warn_flag,re_gain_renormalized,im_gain_renormalized,abs_gain_renormalized")

    def test_renormalized_only_for_gain(self, unit_run):
        """Test --renormalized on another subcommand is a usage error"""
        with pytest.raises(SystemExit) as exc_info:
            main(["iv", str(unit_run()), "--renormalized"])
        assert exc_info.value.code == 2

    def test_screening_json(self, unit_run, capsys):
        """Test --json emits one document with named fields"""
        assert main(["screening", str(unit_run()), "--json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["command"] == "screening"
        row = document["rows"][0]
        assert row["omega_1_rad_s"] == pytest.approx(1.0)
        assert 0 < row["screening_ratio"] < 1

    def test_transfer_grid(self, unit_run, capsys):
        """Test transfer over a flux grid is zero at Phi = 0"""
        code = main(["transfer", str(unit_run(i=2.5)), "--flux-start", "0", "--flux-stop", "0.25", "--flux-points", "2"])
        assert code == 0
        rows = [line.split(",") for line in capsys.readouterr().out.splitlines()[1:]]
        assert float(rows[0][0]) == 0.0
        assert float(rows[0][3]) == 0.0
        assert float(rows[1][3]) != 0.0

    def test_out_file(self, unit_run, tmp_path, capsys):
        """Test --out writes the data to a file and nothing to stdout"""
        target = tmp_path / "modes.csv"
        assert main(["modes", str(unit_run()), "--count", "2", "--out", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert target.read_text(encoding="utf-8").startswith("index,")


class TestExitCodes:
    """Errors go to stderr with distinct exit codes"""

    def test_config_error(self, tmp_path, capsys):
        """Test an invalid configuration exits 2 and cites the invariant"""
        path = tmp_path / "bad.cfg"
        path.write_text(MINIMAL.replace("junction_capacitance = 0", "junction_capacitance = -1e-12"))
        assert main(["modes", str(path)]) == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "C_J ≥ 0" in captured.err

    def test_missing_file(self, tmp_path):
        """Test an unreadable configuration exits 2"""
        assert main(["modes", str(tmp_path / "absent.cfg")]) == 2

    def test_divergence(self, write_config, capsys):
        """Test a diverging integration exits 3"""
        path = write_config(
            squid_from_groups(0.01, 0.0, 2.0, 0.25),
            StriplineParams(
                inductance_per_length=1.0, capacitance_per_length=1.0, length=math.pi, fundamental_mutual=1e-9,
            ),
            InputCircuitParams(shunt_resistance=1.0, coupling_capacitance=1.0),
            SimConfig(step=0.5, transient_skip=10.0, averaging_window=100.0),
        )
        assert main(["screening", str(path)]) == 3
        assert "diverged" in capsys.readouterr().err

    def test_superconducting_screening(self, unit_run, capsys):
        """Test screening at a V = 0 bias exits 1"""
        assert main(["screening", str(unit_run(i=0.0))]) == 1
        assert "V = 0" in capsys.readouterr().err


class TestDeterminism:
    """Byte-identical output for any worker count"""

    def test_worker_counts(self, unit_run, monkeypatch, capsys):
        """Test iv output is identical with 1 and 4 workers and on repeat"""
        path = str(unit_run())
        outputs = []
        for threads in ("1", "4", "1"):
            monkeypatch.setenv("SQUIDSIM_THREADS", threads)
            assert main(["iv", path, "--bias-start", "1", "--bias-stop", "3", "--bias-points", "4"]) == 0
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1] == outputs[2]


class TestWorkerPool:
    """Lazy process pool behind the ordered map"""

    def test_pool_started_only_for_mapped_work(self, unit_run, monkeypatch):
        """Test commands without sweeps never start worker processes"""
        started = []
        monkeypatch.setattr(runner, "Pool", lambda workers: started.append(workers))
        monkeypatch.setenv("SQUIDSIM_THREADS", "4")
        assert main(["modes", str(unit_run()), "--count", "3"]) == 0
        assert main(["impedance", str(unit_run())]) == 0
        assert started == []

    def test_single_item_runs_in_process(self, monkeypatch):
        """Test a one-item map stays serial even with several workers"""
        monkeypatch.setattr(runner, "Pool", lambda workers: pytest.fail("pool started"))
        with runner.ordered_map(4) as map_fn:
            assert map_fn(abs, [-2.0]) == [2.0]
            assert map_fn(abs, []) == []


class TestSettings:
    """Environment settings read with the SQUIDSIM_ prefix"""

    def test_log_level_case_insensitive(self, monkeypatch):
        """Test a lower-case level name is accepted"""
        monkeypatch.setenv("SQUIDSIM_LOG_LEVEL", "debug")
        assert get_settings().log_level == "DEBUG"

    def test_invalid_log_level(self, unit_run, monkeypatch, capsys):
        """Test an unknown level name exits 2 without a traceback"""
        monkeypatch.setenv("SQUIDSIM_LOG_LEVEL", "LOUD")
        assert main(["modes", str(unit_run())]) == 2
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "log_level" in captured.err

    def test_version_reports_settings(self, monkeypatch, capsys):
        """Test --version prints the configured name and version"""
        monkeypatch.setenv("SQUIDSIM_APP_NAME", "squid-bench")
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])
        assert exc_info.value.code == 0
        assert capsys.readouterr().out.strip() == f"squid-bench {__version__}"
