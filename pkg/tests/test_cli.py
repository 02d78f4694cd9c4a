"""CLI contract: subcommands, config loading, determinism, exit codes."""

import subprocess
import sys

import pytest

from czsim.cli import ConfigError, load_device, load_pulse, main

DEVICE_TOML = """\
g1c_ghz = 0.08
g2c_ghz = 0.08

[q1]
freq_ghz = 6.5
anh_ghz = -0.3
levels = 4

[coupler]
freq_ghz = 5.5
anh_ghz = -0.3

[q2]
freq_ghz = 4.5
anh_ghz = -0.3
"""

PULSE_TOML = """\
amp0_ghz = 0.0083
lambda1 = 0.3395
lambda2 = 0.0601
t_f_ns = 250.0
detuning_ghz = -0.015
"""


def write(path, text):
    path.write_text(text)
    return str(path)


class TestConfigLoading:
    def test_device_preset_names(self):
        assert load_device("paper-tableI").q1.frequency == 6.5
        assert load_device("paper-tableIII").coupler.frequency == 6.317

    def test_device_toml(self, tmp_path):
        device = load_device(write(tmp_path / "d.toml", DEVICE_TOML))
        assert device.q1.frequency == 6.5
        assert device.coupler.levels == 4  # default fills in
        assert device.g2c == 0.08

    def test_pulse_toml(self, tmp_path):
        pulse = load_pulse(write(tmp_path / "p.toml", PULSE_TOML))
        assert pulse.amp0 == 0.0083
        assert pulse.t_f == 250.0
        assert pulse.drive_freq is None

    def test_unknown_source_lists_presets(self):
        with pytest.raises(ConfigError, match="paper-tableI"):
            load_device("nosuch")
        with pytest.raises(ConfigError, match="tableII-a"):
            load_pulse("nosuch")

    def test_unknown_device_key_named_with_line(self, tmp_path):
        bad = DEVICE_TOML.replace("g2c_ghz = 0.08", "g2x_ghz = 0.08")
        with pytest.raises(ConfigError, match=r"g2x_ghz.*line 2"):
            load_device(write(tmp_path / "d.toml", bad))

    def test_unknown_section_key_named(self, tmp_path):
        bad = DEVICE_TOML.replace("anh_ghz = -0.3\nlevels", "anh = -0.3\nlevels")
        with pytest.raises(ConfigError, match=r"'anh'.*line 6"):
            load_device(write(tmp_path / "d.toml", bad))

    def test_unknown_pulse_key_named(self, tmp_path):
        bad = PULSE_TOML + "ramp_ns = 10.0\n"
        with pytest.raises(ConfigError, match=r"ramp_ns.*line 6"):
            load_pulse(write(tmp_path / "p.toml", bad))

    def test_missing_key_named(self, tmp_path):
        bad = PULSE_TOML.replace("detuning_ghz = -0.015\n", "")
        with pytest.raises(ConfigError, match="detuning_ghz"):
            load_pulse(write(tmp_path / "p.toml", bad))

    def test_malformed_toml(self, tmp_path):
        with pytest.raises(ConfigError, match="malformed"):
            load_pulse(write(tmp_path / "p.toml", "amp0_ghz = = 1"))


class TestZZCommand:
    def test_prints_zz_magnitudes(self, capsys):
        assert main(["zz", "--device", "paper-tableI"]) == 0
        out = capsys.readouterr().out
        assert "12.57" in out
        assert "zeta_pert4" in out

    def test_decoupled_device_has_zero_zz(self, tmp_path, capsys):
        decoupled = DEVICE_TOML.replace("0.08", "0.0")
        path = write(tmp_path / "d.toml", decoupled)
        assert main(["zz", "--device", path]) == 0
        out = capsys.readouterr().out
        assert "zeta_exact = -0.0000 kHz" in out or "zeta_exact = +0.0000 kHz" in out

    def test_out_table_has_header(self, tmp_path, capsys):
        out_path = tmp_path / "zz.csv"
        main(["zz", "--device", "paper-tableI", "--out", str(out_path)])
        lines = out_path.read_text().splitlines()
        assert lines[0] == "# czsim 0.1.0"
        assert "# device.q1.freq_ghz = 6.5" in lines
        assert lines[-2].startswith("zeta_exact_khz,")


class TestGateReportCommand:
    def test_expected_fidelity_record(self, capsys, tmp_path):
        out_path = tmp_path / "report.csv"
        code = main([
            "gate-report", "--device", "paper-tableI",
            "--pulse", "tableII-a", "--dt", "0.02", "--out", str(out_path),
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "fidelity F = 0.999" in out
        record = [l for l in out.splitlines() if l.startswith("record: ")][0]
        fields = record.removeprefix("record: ").split(",")
        assert len(fields) == 12
        assert float(fields[7]) == pytest.approx(0.9996, abs=2e-4)
        data = out_path.read_text().splitlines()
        assert data[-2].startswith("theta00_rad,")
        assert data[-1] == record.removeprefix("record: ")


class TestSweepCommands:
    def test_zz_sweep_deterministic_across_workers(self, tmp_path, capsys,
                                                   monkeypatch):
        args = ["zz-sweep", "--device", "paper-tableI",
                "--omega2", "4.2:4.8:7"]
        a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        monkeypatch.setenv("CZSIM_WORKERS", "2")
        main(args + ["--out", str(c)])
        assert a.read_bytes() == b.read_bytes() == c.read_bytes()
        rows = [l for l in a.read_text().splitlines()
                if not l.startswith("#")]
        assert len(rows) == 1 + 7  # column row + one row per grid cell

    def test_chi_sweep_rows(self, tmp_path, capsys):
        out = tmp_path / "chi.csv"
        main(["chi-sweep", "--device", "paper-tableI",
              "--g", "0.0:0.08:3", "--out", str(out)])
        rows = [l for l in out.read_text().splitlines()
                if not l.startswith("#")]
        assert rows[0].startswith("g_ghz,")
        assert len(rows) == 4
        assert all(r.endswith(",ok") for r in rows[1:])

    def test_sweep1d_negative_grid_flag(self, tmp_path, capsys):
        out = tmp_path / "s1.csv"
        code = main([
            "sweep1d", "--device", "paper-tableI", "--tg", "50",
            "--detuning", "-0.016:-0.014:3", "--pulse", "tableII-a",
            "--dt", "0.1", "--out", str(out),
        ])
        assert code == 0
        rows = [l for l in out.read_text().splitlines()
                if not l.startswith("#")]
        assert len(rows) == 4
        assert rows[1].startswith("50.0,-0.016,")

    def test_sweep1d_fixed_mode_requires_pulse(self, tmp_path, capsys):
        code = main([
            "sweep1d", "--device", "paper-tableI", "--tg", "50",
            "--detuning", "-0.016:-0.014:3", "--dt", "0.1",
            "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 2
        assert "requires --pulse" in capsys.readouterr().err

    def test_sweep2d_single_cell(self, tmp_path, capsys):
        out = tmp_path / "s2.csv"
        code = main([
            "sweep2d", "--device", "paper-tableI", "--tg", "250:250:1",
            "--detuning", "-0.015:-0.015:1", "--pulse", "tableII-a",
            "--dt", "0.05", "--out", str(out),
        ])
        assert code == 0
        rows = [l for l in out.read_text().splitlines()
                if not l.startswith("#")]
        assert len(rows) == 2
        assert rows[1].startswith("250.0,-0.015,")
        assert rows[1].endswith(",ok")


class TestDynamicsCommand:
    def test_population_table(self, tmp_path, capsys):
        out = tmp_path / "dyn.csv"
        code = main([
            "dynamics", "--device", "paper-tableI", "--pulse", "tableII-a",
            "--dt", "0.05", "--stride", "1000", "--initial", "101",
            "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().splitlines()
        header = [l for l in lines if not l.startswith("#")]
        columns = header[0].split(",")
        assert columns[:2] == ["time_ns", "leakage"]
        assert "pop_101" in columns
        assert len(columns) == 2 + 64
        first = header[1].split(",")
        assert float(first[0]) == 0.0
        # dressed |101> carries a percent-level bare-state admixture
        assert float(first[columns.index("pop_101")]) > 0.98

    def test_initial_outside_truncation_rejected(self, tmp_path, capsys):
        code = main([
            "dynamics", "--device", "paper-tableI", "--pulse", "tableII-a",
            "--initial", "401", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 2
        assert "level truncation" in capsys.readouterr().err


class TestOptimizeCommand:
    def test_summary_and_table(self, tmp_path, capsys):
        out = tmp_path / "opt.csv"
        code = main([
            "optimize", "--device", "paper-tableI", "--tg", "50",
            "--detuning", "-0.015", "--init", "0.002,0.3,0.1",
            "--max-evals", "12", "--dt", "0.1", "--out", str(out),
        ])
        assert code == 0
        summary = capsys.readouterr().out
        assert "cost = " in summary
        assert "not converged" in summary
        rows = [l for l in out.read_text().splitlines()
                if not l.startswith("#")]
        assert rows[0].startswith("t_g_ns,")
        assert ",false," in rows[1]

    def test_bad_init_rejected(self, capsys):
        code = main([
            "optimize", "--device", "paper-tableI", "--tg", "50",
            "--detuning", "-0.015", "--init", "0.002,0.3",
        ])
        assert code == 2
        assert "--init" in capsys.readouterr().err


class TestErrorPaths:
    def test_unknown_preset_exit_code(self, capsys):
        assert main(["zz", "--device", "nosuch"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_grid_exit_code(self, tmp_path, capsys):
        code = main(["zz-sweep", "--device", "paper-tableI",
                     "--omega2", "4.2:4.8", "--out", str(tmp_path / "x")])
        assert code == 2
        assert "start:stop:count" in capsys.readouterr().err

    def test_core_validation_error_exit_code(self, tmp_path, capsys):
        # dt too coarse for the gate time trips the integrator contract
        code = main([
            "gate-report", "--device", "paper-tableI",
            "--pulse", "tableII-a", "--dt", "30.0",
        ])
        assert code == 1
        assert "t_f/dt" in capsys.readouterr().err

    def test_argparse_usage_error(self):
        with pytest.raises(SystemExit):
            main(["zz"])  # --device is required


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "czsim", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "czsim 0.1.0"
