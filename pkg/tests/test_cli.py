"""Command-line interface: parsing, output contracts, and exit codes.

Everything runs in-process through ``sladoa.cli.main`` so stdout/stderr
can be captured with capsys."""

import csv

import pytest

from sladoa.cli import ConfigError, main, parse_config, parse_geometry

ESTIMATE_CFG = """\
# three sources, noiseless
geometry = nested 4 4
thetas = -0.8 0 0.8
method = vws-ca-rmusic
a = 3
snapshots = 400
seed = 7
"""

SWEEP_CFG = """\
geometry = nested 4 4 ; mra 8
thetas = -0.8, 0, 0.8
method = vws-ca-music
a = 0 3
snr_db = 0 10
snapshots = 200
trials = 8
seed = 11
grid = 600
"""


class TestParsing:
    def test_parse_config_comments_and_commas(self):
        cfg = parse_config("a = 1, 2  # tail\n\n# full line\nb= x y\n")
        assert cfg == {"a": ["1", "2"], "b": ["x", "y"]}

    def test_parse_config_rejects_bare_line(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_config("not a pair\n")

    def test_parse_geometry_kinds(self):
        assert parse_geometry(["ula", "5"]).name == "ula(5)"
        assert parse_geometry(["super-nested", "4", "4"]).name == "snaq2(4,4)"

    def test_parse_geometry_rejects_unknown(self):
        with pytest.raises(ConfigError):
            parse_geometry(["circular", "8"])


class TestGeometryCommand:
    def test_nested_report(self, capsys):
        assert main(["geometry", "nested", "4", "4"]) == 0
        out = capsys.readouterr().out
        assert "UDOF: 39  G: 20" in out
        assert "nested(4,4):" in out

    def test_ula_report(self, capsys):
        assert main(["geometry", "ula", "3"]) == 0
        assert "UDOF: 5  G: 3" in capsys.readouterr().out

    def test_max_shrinkage_report(self, capsys):
        assert main(["geometry", "mra", "8", "--sources", "5"]) == 0
        assert "max shrinkage (D=5): 18" in capsys.readouterr().out

    def test_invalid_geometry_exits_2(self, capsys):
        assert main(["geometry", "nested", "4"]) == 2


class TestEstimateCommand:
    def write_cfg(self, tmp_path, text=ESTIMATE_CFG):
        path = tmp_path / "cfg.txt"
        path.write_text(text)
        return str(path)

    def test_noiseless_recovers_scene(self, tmp_path, capsys):
        assert main(["estimate", self.write_cfg(tmp_path)]) == 0
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("estimates"))
        values = [float(v) for v in line.split(":")[1].split()]
        # noiseless but finite snapshots: source cross-terms leave ~1e-3
        assert values == pytest.approx([-0.8, 0.0, 0.8], abs=5e-3)

    def test_deterministic_output(self, tmp_path, capsys):
        cfg = self.write_cfg(tmp_path)
        main(["estimate", cfg])
        first = capsys.readouterr().out
        main(["estimate", cfg])
        assert capsys.readouterr().out == first

    def test_degrees_flag(self, tmp_path, capsys):
        assert main(["estimate", self.write_cfg(tmp_path), "--degrees"]) == 0
        assert "estimates (degrees):" in capsys.readouterr().out

    def test_spectrum_out(self, tmp_path, capsys):
        spec = tmp_path / "spec.csv"
        cfg = self.write_cfg(
            tmp_path, ESTIMATE_CFG.replace("vws-ca-rmusic", "vws-ca-music"))
        assert main(["estimate", cfg, "--spectrum-out", str(spec)]) == 0
        lines = spec.read_text().splitlines()
        assert lines[0] == "theta,value"
        assert len(lines) == 2001

    def test_infeasible_a_exits_2(self, tmp_path, capsys):
        cfg = self.write_cfg(tmp_path, ESTIMATE_CFG.replace("a = 3", "a = 17"))
        assert main(["estimate", cfg]) == 2
        assert "maximum a is 16" in capsys.readouterr().err

    def test_missing_key_exits_2(self, tmp_path, capsys):
        cfg = self.write_cfg(tmp_path, "geometry = ula 8\n")
        assert main(["estimate", cfg]) == 2
        assert "thetas" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path, capsys):
        assert main(["estimate", str(tmp_path / "nope.txt")]) == 1


class TestSweepCommand:
    def run_sweep(self, tmp_path, capsys, text=SWEEP_CFG, extra=()):
        cfg = tmp_path / "sweep.txt"
        cfg.write_text(text)
        out = tmp_path / "out.csv"
        code = main(["sweep", str(cfg), "--out", str(out)] + list(extra))
        return code, out, capsys.readouterr()

    def test_row_per_combination(self, tmp_path, capsys):
        code, out, _ = self.run_sweep(tmp_path, capsys)
        assert code == 0
        lines = out.read_text().splitlines()
        header = "geometry,method,a,axis_value,rmse,trials,fills,mean_evd_time"
        assert lines[0] == header
        # 2 geometries x 2 a values x 2 SNR points
        assert len(lines) == 9
        with open(out, newline="") as fh:
            names = {row[0] for row in csv.reader(fh)} - {"geometry"}
        assert names == {"nested(4,4)", "mra(8)"}

    def test_sidecar_written(self, tmp_path, capsys):
        _, out, _ = self.run_sweep(tmp_path, capsys)
        sidecar = out.parent / (out.name + ".config.json")
        assert sidecar.exists()

    def test_infeasible_combo_warns_and_continues(self, tmp_path, capsys):
        text = SWEEP_CFG.replace("a = 0 3", "a = 3 17")
        code, out, captured = self.run_sweep(tmp_path, capsys, text)
        assert code == 0
        assert "warning" in captured.err and "a=17" in captured.err
        # the a=17 rows are dropped for nested(4,4) only
        assert len(out.read_text().splitlines()) == 7

    def test_all_infeasible_exits_2(self, tmp_path, capsys):
        text = SWEEP_CFG.replace("a = 0 3", "a = 25")
        code, _, _ = self.run_sweep(tmp_path, capsys, text)
        assert code == 2

    def test_two_axes_rejected(self, tmp_path, capsys):
        text = SWEEP_CFG.replace("snapshots = 200", "snapshots = 100 200")
        code, _, captured = self.run_sweep(tmp_path, capsys, text)
        assert code == 2
        assert "only one may be a list" in captured.err

    def test_unwritable_out_exits_1(self, tmp_path, capsys):
        code, _, _ = self.run_sweep(
            tmp_path, capsys,
            extra=["--out", str(tmp_path / "missing" / "out.csv")])
        assert code == 1
