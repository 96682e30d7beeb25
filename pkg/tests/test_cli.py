import os

import numpy as np
import pytest

from extmem import DeviceConfig, SimConfig, load_csr, throughput_vs_latency_sweep
from extmem.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def csv_rows(text):
    lines = [l for l in text.strip().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


class TestGen:
    def test_stats_and_save(self, capsys, tmp_path):
        saved = tmp_path / "g.csr"
        code, out = run_cli(
            capsys, "gen", "--graph", "urand:10:8", "--save", str(saved), "--no-timestamp"
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header[:3] == ["num_vertices", "num_edges_raw", "num_edges_dedup"]
        assert rows[0][0] == "1024"
        assert rows[0][1] == str(1024 * 8)
        g = load_csr(saved)
        assert g.num_vertices == 1024

    def test_file_graph_round_trip(self, capsys, tmp_path):
        src = tmp_path / "g.txt"
        src.write_text("0 1\n1 0\n1 2\n")
        code, out = run_cli(capsys, "gen", "--graph", f"file:{src}", "--no-timestamp")
        assert code == 0
        _, rows = csv_rows(out)
        assert rows[0][:2] == ["3", "3"]


class TestTraversalCommands:
    def test_bfs_histogram_and_trace(self, capsys, tmp_path):
        trace_path = tmp_path / "t.trace"
        code, out = run_cli(
            capsys, "bfs", "--graph", "urand:10:8", "--source", "max-degree",
            "--trace", str(trace_path), "--no-timestamp",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["depth", "num_vertices"]
        assert rows[0] == ["0", "1"]
        assert trace_path.exists()

    def test_sssp_summary(self, capsys):
        code, out = run_cli(
            capsys, "sssp", "--graph", "urand:9:6", "--weight-seed", "3", "--no-timestamp"
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["iterations", "reached_vertices"]
        assert int(rows[0][0]) >= 1


class TestRaf:
    def test_spec_example_monotone(self, capsys):
        code, out = run_cli(
            capsys, "raf", "--graph", "urand:16:32",
            "--alignments", "32,128,512,4096", "--no-timestamp",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["alignment_bytes", "useful_bytes", "fetched_bytes", "raf", "avg_transfer_bytes"]
        assert len(rows) == 4
        rafs = [float(r[3]) for r in rows]
        assert all(b >= a for a, b in zip(rafs, rafs[1:]))

    def test_jobs_do_not_change_output(self, capsys, tmp_path):
        args = [
            "raf", "--graph", "urand:12:8", "--alignments", "32,64,128",
            "--cache", "4KiB", "--no-timestamp",
        ]
        code1, _ = run_cli(capsys, *args, "--out", str(tmp_path / "a.csv"))
        code2, _ = run_cli(capsys, *args, "--out", str(tmp_path / "b.csv"), "--jobs", "2")
        assert code1 == code2 == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestPredict:
    def test_requirements_row(self, capsys):
        code, out = run_cli(capsys, "predict", "--profile", "gen4", "--d", "89.6", "--no-timestamp")
        assert code == 0
        _, rows = csv_rows(out)
        min_iops, max_latency_ns = float(rows[0][1]), float(rows[0][2])
        assert min_iops == pytest.approx(268e6, rel=0.01)
        assert max_latency_ns == pytest.approx(2870, rel=0.01)

    def test_optimal_row(self, capsys):
        code, out = run_cli(
            capsys, "predict", "--profile", "gen4", "--optimal",
            "--device-iops", "6MIOPS", "--device-latency", "1us", "--no-timestamp",
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][0]) == 4000.0

    def test_curve(self, capsys):
        code, out = run_cli(
            capsys, "predict", "--profile", "gen4", "--curve", "--graph", "urand:12:16",
            "--device", "ssd-array", "--transfers", "1024,4096", "--no-timestamp",
        )
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["d_bytes", "total_bytes_D", "throughput_Bps", "runtime_s"]
        assert len(rows) == 2

    def test_missing_d_is_data_error(self, capsys):
        code, _ = run_cli(capsys, "predict", "--profile", "gen4")
        assert code == 2


class TestSimulateAndChase:
    def test_matches_library_call(self, capsys):
        code, out = run_cli(
            capsys, "simulate", "--delta", "0", "--d", "64", "--base-latency", "1.44us",
            "--cap", "128", "--channel-bandwidth", "5700MB/s", "--no-timestamp",
        )
        assert code == 0
        _, rows = csv_rows(out)
        cfg = SimConfig(
            link_nmax=768,
            devices=(DeviceConfig(1440, 0, 128, 5_700e6),),
            request_size=64,
            seed=1,
        )
        expected = throughput_vs_latency_sweep(cfg, [0])[0]
        assert float(rows[0][1]) == expected["throughput_Bps"]

    def test_chase_row(self, capsys):
        code, out = run_cli(
            capsys, "chase", "--base-latency", "1.2us", "--hops", "1200",
            "--channel-bandwidth", "20000MB/s", "--link-bandwidth", "12000MB/s",
            "--no-timestamp",
        )
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][4]) == pytest.approx(1200, rel=0.02)


class TestConfigFile:
    def test_config_supplies_values_and_flags_override(self, capsys, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(
            "[common]\nseed = 5\nno_timestamp = true\n\n[raf]\ngraph = urand:10:8\nalignments = 32,64\n"
        )
        code, out = run_cli(capsys, "raf", "--config", str(cfg))
        assert code == 0
        _, rows = csv_rows(out)
        assert [r[0] for r in rows] == ["32", "64"]
        code, out = run_cli(capsys, "raf", "--config", str(cfg), "--alignments", "128")
        assert code == 0
        _, rows = csv_rows(out)
        assert [r[0] for r in rows] == ["128"]

    def test_malformed_config(self, capsys, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[raf]\nthis is not a pair\n")
        code, _ = run_cli(capsys, "raf", "--config", str(cfg), "--graph", "urand:8:4")
        assert code == 2


class TestExitCodes:
    def test_usage_error_is_exit_1(self):
        with pytest.raises(SystemExit) as err:
            main(["raf", "--graph", "urand:8:4", "--bogus-flag"])
        assert err.value.code == 1

    def test_unknown_command_is_exit_1(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 1

    def test_missing_file_is_exit_2(self, capsys):
        code, _ = run_cli(capsys, "gen", "--graph", "file:/does/not/exist.txt")
        assert code == 2

    def test_capacity_error_is_exit_3(self, capsys):
        code, _ = run_cli(capsys, "gen", "--graph", "urand:27:32")
        assert code == 3


class TestOutputs:
    def test_no_timestamp_reruns_are_byte_identical(self, capsys, tmp_path):
        args = ["raf", "--graph", "urand:10:8", "--alignments", "32,256", "--no-timestamp"]
        run_cli(capsys, *args, "--out", str(tmp_path / "a.csv"))
        run_cli(capsys, *args, "--out", str(tmp_path / "b.csv"))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_timestamp_line_present_by_default(self, capsys):
        code, out = run_cli(capsys, "predict", "--profile", "gen3", "--d", "256")
        assert code == 0
        assert out.startswith("# generated ")

    def test_no_partial_csv_on_error(self, tmp_path, capsys):
        out_path = tmp_path / "never.csv"
        code, _ = run_cli(
            capsys, "raf", "--graph", "file:/missing.txt", "--out", str(out_path)
        )
        assert code == 2
        assert not out_path.exists()


class TestReport:
    def test_report_writes_tables_and_figures(self, capsys, tmp_path):
        out_dir = tmp_path / "report"
        code, _ = run_cli(
            capsys, "report", "--scale", "12", "--out", str(out_dir), "--no-timestamp"
        )
        assert code == 0
        for stem in ("raf_vs_alignment", "runtime_vs_transfer", "throughput_vs_latency", "latency_knee"):
            assert (out_dir / f"{stem}.csv").exists()
            assert (out_dir / f"{stem}.png").stat().st_size > 1000

    def test_report_no_plots(self, capsys, tmp_path):
        out_dir = tmp_path / "report"
        code, _ = run_cli(
            capsys, "report", "--scale", "10", "--out", str(out_dir),
            "--no-plots", "--no-timestamp",
        )
        assert code == 0
        assert (out_dir / "raf_vs_alignment.csv").exists()
        assert not (out_dir / "raf_vs_alignment.png").exists()
