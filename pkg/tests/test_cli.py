import math

import numpy as np
import pytest

from bailoutgame.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_VERIFY,
    RunConfig,
    main,
    run_sweep,
    run_verify,
)
from bailoutgame.errors import ConfigError


def read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def cell(row, header, name):
    v = row[header.index(name)]
    return float(v) if v != "" else None


@pytest.fixture(scope="module")
def small_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep")
    cfg = RunConfig(pg_min=0.4, pg_max=0.9, pg_step=0.1, lam=0.2, out_dir=str(out))
    paths = run_sweep(cfg)
    return out, paths


class TestSweepOutputs:
    def test_all_files_written(self, small_sweep):
        out, paths = small_sweep
        for name in ("sl_set", "ds_set", "volumes", "welfare"):
            assert paths[name].exists()

    def test_volume_identities(self, small_sweep):
        out, _ = small_sweep
        header, rows = read_csv(out / "volumes.csv")
        for row in rows:
            ds = cell(row, header, "ds_volume")
            secret = cell(row, header, "secret_volume")
            if ds is not None:
                assert ds == pytest.approx(secret, abs=1e-9)
            assert cell(row, header, "no_bailout_volume") == pytest.approx(4.0 / 3.0, abs=1e-9)
            sl_min = cell(row, header, "sl_volume_min")
            if sl_min is not None:
                assert sl_min > 4.0 / 3.0
                assert ds >= cell(row, header, "sl_volume_max") - 1e-9

    def test_sl_set_schema(self, small_sweep):
        out, _ = small_sweep
        header, rows = read_csv(out / "sl_set.csv")
        assert header == ["p_g", "theta_hat_min", "theta_hat_max", "count", "volume_min", "volume_max", "theta0"]
        by_pg = {float(r[0]): r for r in rows}
        assert cell(by_pg[0.9], header, "count") == 0
        assert cell(by_pg[0.9], header, "theta_hat_min") is None
        assert cell(by_pg[0.5], header, "count") > 0
        assert cell(by_pg[0.5], header, "theta0") == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_welfare_long_format(self, small_sweep):
        out, _ = small_sweep
        header, rows = read_csv(out / "welfare.csv")
        regimes = {r[1] for r in rows}
        assert regimes == {"laissez_faire", "secret", "sl_lo", "sl_hi", "ds"}
        for row in rows:
            if row[1] in ("secret", "ds") and cell(row, header, "welfare") is not None:
                assert cell(row, header, "deficit") >= -1e-12

    def test_ds_equals_secret_welfare(self, small_sweep):
        out, _ = small_sweep
        header, rows = read_csv(out / "welfare.csv")
        by_key = {(r[0], r[1]): cell(r, header, "welfare") for r in rows}
        for (pg, regime), w in by_key.items():
            if regime == "ds" and w is not None:
                assert w == pytest.approx(by_key[(pg, "secret")], abs=1e-9)


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        cfg1 = RunConfig(pg_min=0.45, pg_max=0.6, pg_step=0.05, out_dir=str(tmp_path / "a"))
        cfg2 = RunConfig(pg_min=0.45, pg_max=0.6, pg_step=0.05, out_dir=str(tmp_path / "b"))
        paths1 = run_sweep(cfg1)
        paths2 = run_sweep(cfg2)
        for name in paths1:
            assert paths1[name].read_bytes() == paths2[name].read_bytes()


class TestVerifyCommand:
    def test_delayed_passes(self, tmp_path):
        cfg = RunConfig(pg_min=0.9, pg_max=0.9, pg_step=1.0, oracle_n=800, out_dir=str(tmp_path))
        path, ok = run_verify(cfg, "ds")
        assert ok and path.exists()

    def test_mispriced_fails(self, tmp_path):
        cfg = RunConfig(pg_min=0.9, pg_max=0.9, pg_step=1.0, oracle_n=800, out_dir=str(tmp_path))
        path, ok = run_verify(cfg, "ds-mispriced")
        assert not ok

    def test_frozen_laissez_faire_trivially_passes(self, tmp_path):
        cfg = RunConfig(S=0.05, I=0.1, pg_min=0.4, pg_max=0.4, pg_step=1.0, oracle_n=800, out_dir=str(tmp_path))
        _, ok = run_verify(cfg, "laissez-faire")
        assert ok

    def test_unknown_selector(self, tmp_path):
        cfg = RunConfig(out_dir=str(tmp_path))
        with pytest.raises(ConfigError):
            run_verify(cfg, "nonsense")


class TestMainEntry:
    def test_laissez_faire_prints(self, capsys):
        assert main(["laissez-faire"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "theta0 = 0.666666666667" in out

    def test_config_error_exit_code(self, capsys):
        assert main(["sweep", "--pg", "0.5:0.4:0.1"]) == EXIT_CONFIG
        assert main(["sweep", "--pg", "bogus"]) == EXIT_CONFIG

    def test_verify_exit_codes(self, tmp_path):
        args = ["--pg", "0.9", "--oracle-n", "600", "--out", str(tmp_path)]
        assert main(["verify", "--which", "ds", *args]) == EXIT_OK
        assert main(["verify", "--which", "ds-mispriced", *args]) == EXIT_VERIFY

    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("s = 0.25\ni = 0.05\n")
        assert main(["laissez-faire", "--config", str(cfg)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "theta0 = 0.5" in out

    def test_table_dist(self, tmp_path, capsys):
        table = tmp_path / "dens.txt"
        xs = np.linspace(0.0, 1.0, 257)
        rows = "\n".join(f"{x:.8f} {math.exp(-0.5 * ((x - 0.5) / 0.35) ** 2):.8f}" for x in xs)
        table.write_text(rows + "\n")
        assert main(["laissez-faire", "--dist", f"table:{table}", "--S", "0.3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "frozen = false" in out

    def test_missing_table_is_config_error(self):
        assert main(["laissez-faire", "--dist", "table:/nonexistent.txt"]) == EXIT_CONFIG
