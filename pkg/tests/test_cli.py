import json

import pytest

from ecsmooth import census, cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestTopLevel:
    def test_no_command_usage(self, capsys):
        code, _, _ = run([], capsys)
        assert code == cli.EXIT_USAGE

    def test_unknown_command_usage(self, capsys):
        code, _, _ = run(["frobnicate"], capsys)
        assert code == cli.EXIT_USAGE


class TestEcmCommand:
    def test_n35_factor(self, capsys):
        code, out, _ = run(["ecm", "35", "-u", "1.5", "-v", "1.2"], capsys)
        assert code == cli.EXIT_OK
        assert "Factor(" in out
        factor = int(out.split("Factor(")[1].split(")")[0])
        assert factor in (5, 7)

    def test_prime_fails(self, capsys):
        code, out, _ = run(["ecm", "1000000007", "-u", "3", "-v", "1.5"], capsys)
        assert code == cli.EXIT_NEGATIVE
        assert "FAIL" in out

    def test_malformed_n(self, capsys):
        code, _, _ = run(["ecm", "banana"], capsys)
        assert code == cli.EXIT_USAGE

    def test_bad_params(self, capsys):
        code, _, _ = run(["ecm", "35", "-u", "0.5", "-v", "2"], capsys)
        assert code == cli.EXIT_USAGE


class TestSplitCommand:
    def test_q101(self, capsys):
        code, out, _ = run(["split", "101", "2", "1", "-u", "1.5", "-v", "1.5"], capsys)
        assert code == cli.EXIT_OK
        assert "factor=" in out

    def test_deterministic_transcript(self, capsys):
        args = ["split", "101", "2", "1", "-u", "1.5", "-v", "1.5", "--seed", "9"]
        _, out1, _ = run(args, capsys)
        _, out2, _ = run(args, capsys)
        # identical up to timing
        strip = lambda s: s.split("time=")[0]
        assert strip(out1) == strip(out2)

    def test_composite_q(self, capsys):
        code, _, err = run(["split", "100", "2", "1", "--auto"], capsys)
        assert code == cli.EXIT_USAGE

    def test_missing_uv(self, capsys):
        code, _, _ = run(["split", "101", "2", "1"], capsys)
        assert code == cli.EXIT_USAGE


class TestAlphaCommand:
    def test_single_column(self, capsys):
        code, out, _ = run(["alpha", "-d", "163", "--ell-bound", "100000"], capsys)
        assert code == cli.EXIT_OK
        assert "d=163" in out and "alpha_tilde" in out and "gamma_k" in out

    def test_truncation_warning_flag(self, capsys):
        code, out, _ = run(
            ["alpha", "-d", "7", "--ell-bound", "10", "--p-bound", "100"], capsys
        )
        assert code == cli.EXIT_OK
        assert "WARNING=truncation_guard" in out

    def test_unknown_d(self, capsys):
        code, _, _ = run(["alpha", "-d", "5"], capsys)
        assert code == cli.EXIT_USAGE

    def test_csv_shape(self, capsys):
        code, out, _ = run(
            ["alpha", "-d", "11", "--ell-bound", "100000", "--csv"], capsys
        )
        assert code == cli.EXIT_OK
        lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert lines[0] == "row,d=11"
        assert {l.split(",")[0] for l in lines[1:]} == {
            "alpha_tilde", "alpha", "sigma_k", "gamma_k", "difference"
        }


class TestCensusCommand:
    def test_rho_dump(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out, _ = run(["census", "--rho", "--max-u", "5", "--rho-step", "0.5"], capsys)
        assert code == cli.EXIT_OK
        csv = (tmp_path / "rho.csv").read_text()
        assert csv.startswith("# rho,")
        obj = json.loads((tmp_path / "rho.json").read_text())
        assert obj["convention"] == census.CONVENTION
        # x=2000 scaled row is rho(2) = 1 - log 2
        row = dict((r[0], r[1]) for r in obj["rows"])
        assert row[2000] == pytest.approx(0.30685281944, abs=1e-9)

    def test_psi_series(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, _, _ = run(
            ["census", "psi", "--y", "10", "--budget", "1000", "--out", "series"], capsys
        )
        assert code == cli.EXIT_OK
        s = census.CensusSeries.from_json((tmp_path / "series.json").read_text())
        assert s.rows[-1] == (1000, census.psi_exact(1000, 10))
        # CSV mirrors the JSON rows
        csv_rows = (tmp_path / "series.csv").read_text().strip().splitlines()[2:]
        assert len(csv_rows) == len(s.rows)

    def test_psi_budget_guard(self, capsys):
        code, _, _ = run(
            ["census", "psi", "--y", "10", "--budget", str(census.PSI_BUDGET * 2)], capsys
        )
        assert code == cli.EXIT_BUDGET

    def test_race_preset_and_cache_resume(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cache = tmp_path / "cache"
        args = [
            "census", "--race", "e7-e11", "--y", "128",
            "--budget", "5000", "--cache-dir", str(cache), "--out", "race",
        ]
        code, _, _ = run(args, capsys)
        assert code == cli.EXIT_OK
        first = (tmp_path / "race.csv").read_bytes()
        code, _, _ = run(args, capsys)
        assert code == cli.EXIT_OK
        assert (tmp_path / "race.csv").read_bytes() == first

    def test_cache_env_var(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.setenv(cli.CACHE_ENV, str(tmp_path / "envcache"))
        code, _, _ = run(
            ["census", "psi_e", "--curve", "e7", "--y", "64", "--budget", "2000"], capsys
        )
        assert code == cli.EXIT_OK

    def test_gamma_tilde_field(self, capsys):
        code, out, _ = run(
            ["census", "gamma_tilde", "-d", "7", "--y", "100", "--budget", "10000"], capsys
        )
        assert code == cli.EXIT_OK
        assert "gamma_tilde(d=7" in out

    def test_nothing_to_do(self, capsys):
        code, _, _ = run(["census"], capsys)
        assert code == cli.EXIT_USAGE

    def test_bad_race_spec(self, capsys):
        code, _, _ = run(["census", "--race", "e7e11"], capsys)
        assert code == cli.EXIT_USAGE


class TestConfigFile:
    def test_config_fills_defaults(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = tmp_path / "cfg"
        cfg.write_text("y = 10\nbudget = 500\n# comment\n")
        code, _, _ = run(
            ["--config", str(cfg), "census", "psi", "--out", "cfgd"], capsys
        )
        assert code == cli.EXIT_OK
        s = census.CensusSeries.from_json((tmp_path / "cfgd.json").read_text())
        assert s.params["y"] == 10
        assert s.rows[-1][0] == 500

    def test_flag_beats_config(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        cfg = tmp_path / "cfg"
        cfg.write_text("y=10\n")
        code, _, _ = run(
            ["--config", str(cfg), "census", "psi", "--y", "7",
             "--budget", "300", "--out", "flag"], capsys
        )
        assert code == cli.EXIT_OK
        s = census.CensusSeries.from_json((tmp_path / "flag.json").read_text())
        assert s.params["y"] == 7

    def test_malformed_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg"
        cfg.write_text("no equals sign here\n")
        code, _, _ = run(["--config", str(cfg), "census", "psi"], capsys)
        assert code == cli.EXIT_USAGE
