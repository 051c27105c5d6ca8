import io
import json
import math

import pytest

from qsd import cli
from qsd import experiments as ex
from qsd.engine import Backend

HEADER = "experiment,fn,backend,z_re,z_im,h,theta,phi,est_re,est_im,ref_re,ref_im,rel_err,status"


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_kv(text):
    return {k: float(v) for k, v in (line.split("=") for line in text.strip().splitlines())}


def records_from_csv(text):
    return ex.read_csv(io.StringIO(text))


class TestGrids:
    def test_h_values_are_exact_decades(self):
        hs = ex.h_values(1e-1, 1e-20, 20)
        assert len(hs) == 20
        assert hs[0] == 1e-1 and hs[-1] == 1e-20
        assert hs == sorted(hs, reverse=True)

    def test_single_h(self):
        assert ex.h_values(1e-3, 1e-5, 1) == [1e-3]

    def test_angle_grid(self):
        thetas, phis = ex.angle_grid(20, 20)
        assert thetas[0] == 0 and math.pi / 2 in thetas
        assert all(0 <= t < math.pi for t in thetas)
        assert all(0 <= p < 2 * math.pi for p in phis)

    def test_symmetric_grid_hits_zero(self):
        g = ex.symmetric_grid(1e-15, 41)
        assert g[20] == 0.0 and g[0] == -1e-15 and g[-1] == 1e-15

    @pytest.mark.parametrize(
        "kwargs",
        [dict(h_start=1e-5, h_stop=1e-3), dict(h_points=0), dict(grid_points=0), dict(window=0.0), dict(variants=())],
    )
    def test_invalid_config(self, kwargs):
        base = dict(experiment="x", variants=ex.SWEEP_H_VARIANTS)
        with pytest.raises(ValueError):
            ex.ExperimentConfig(**{**base, **kwargs}).validate()


class TestVariant:
    def test_axis_suffix(self):
        v = ex.Variant.parse("pauli2:k")
        assert v.backend is Backend.PAULI2 and (v.theta, v.phi) == (0.0, 0.0)

    def test_central_label(self):
        assert ex.Variant.parse("central", order=2).label == "central2"

    @pytest.mark.parametrize("token", ["pauli3", "pauli2:x"])
    def test_bad_token(self, token):
        with pytest.raises(ValueError):
            ex.Variant.parse(token)


class TestSweeps:
    def test_sweep_h_order_and_count(self):
        cfg = ex.ExperimentConfig("sweep-h", variants=ex.SWEEP_H_VARIANTS)
        recs = ex.run_sweep_h(cfg)
        assert len(recs) == 6 * 20
        labels = [r.backend for r in recs[::20]]
        assert labels == ["bicomplex", "multivector", "pauli2", "pauli2", "real4", "central1"]
        for block in range(6):
            hs = [r.h for r in recs[block * 20 : (block + 1) * 20]]
            assert hs == sorted(hs, reverse=True)

    def test_sweep_h_floor(self):
        cfg = ex.ExperimentConfig("sweep-h", variants=ex.SWEEP_H_VARIANTS)
        recs = ex.run_sweep_h(cfg)
        floor = [r for r in recs if r.h == 1e-20]
        by_label = {(r.backend, r.theta): r.rel_err for r in floor}
        for label in ("bicomplex", "multivector", "real4"):
            assert by_label[(label, ex.HALF_PI)] <= 1e-13
        assert by_label[("pauli2", ex.HALF_PI)] <= 1e-13
        assert by_label[("pauli2", 0.0)] > 1e-6

    def test_single_point_range(self):
        cfg = ex.ExperimentConfig("sweep-h", variants=ex.SWEEP_H_VARIANTS, h_points=1)
        assert len(ex.run_sweep_h(cfg)) == 6

    def test_exp_at_zero(self):
        cfg = ex.ExperimentConfig("sweep-h", fn="exp", z=0j, variants=ex.SWEEP_H_VARIANTS[:5], h_points=1, h_start=1e-20)
        for r in ex.run_sweep_h(cfg):
            assert r.rel_err <= 2 * 2.0**-52

    def test_sweep_angle_count(self):
        cfg = ex.ExperimentConfig("sweep-angle", variants=ex.SWEEP_ANGLE_VARIANTS, theta_points=4, phi_points=3)
        assert len(ex.run_sweep_angle(cfg)) == 2 * 4 * 3

    def test_sweep_angle_single_point(self):
        cfg = ex.ExperimentConfig("sweep-angle", variants=ex.SWEEP_ANGLE_VARIANTS[:1], theta_points=1, phi_points=1)
        (r,) = ex.run_sweep_angle(cfg)
        assert r.ok and r.rel_err < 1e-13

    def test_grid_log(self):
        cfg = ex.ExperimentConfig("grid-log", fn="ln", z=0j, variants=ex.GRID_LOG_VARIANTS, grid_points=5)
        recs = ex.run_grid_log(cfg)
        assert len(recs) == 25
        origin = [r for r in recs if r.z_re == 0 and r.z_im == 0]
        assert len(origin) == 1 and not origin[0].ok
        assert math.isnan(origin[0].rel_err)
        assert all(r.ok for r in recs if r is not origin[0])

    def test_failure_recorded(self):
        v = ex.Variant(Backend.BICOMPLEX)
        r = ex.evaluate_point("x", "inv", v, 0j, 1e-200)
        assert r.status in ("non-invertible", "nan-inf")
        assert math.isnan(r.est_re)


class TestSerialization:
    def setup_method(self):
        cfg = ex.ExperimentConfig("grid-log", fn="ln", z=0j, variants=ex.GRID_LOG_VARIANTS, grid_points=3)
        self.records = ex.run_grid_log(cfg)

    def test_csv_header(self):
        buf = io.StringIO()
        ex.write_records(self.records, buf)
        assert buf.getvalue().splitlines()[0] == HEADER

    def test_csv_round_trip(self):
        buf = io.StringIO()
        ex.write_records(self.records, buf)
        back = records_from_csv(buf.getvalue())
        for a, b in zip(self.records, back):
            for name in ex.FIELDS:
                x, y = getattr(a, name), getattr(b, name)
                assert x == y or (isinstance(x, float) and math.isnan(x) and math.isnan(y))

    def test_jsonl(self):
        buf = io.StringIO()
        ex.write_records(self.records, buf, "jsonl")
        rows = [json.loads(line) for line in buf.getvalue().splitlines()]
        assert len(rows) == len(self.records)
        assert all(list(r) == list(ex.FIELDS) for r in rows)
        assert any(r["rel_err"] is None for r in rows)


class TestCli:
    def test_diff_lyness(self, capsys):
        code, out, _ = run_cli(
            capsys, "diff", "--fn", "lyness", "--z-re", "0.7853981633974483",
            "--z-im", "1.0471975511965976", "--h", "1e-20", "--backend", "bicomplex",
        )
        assert code == 0
        assert parse_kv(out)["rel_err"] <= 1e-13

    def test_diff_exp(self, capsys):
        code, out, _ = run_cli(capsys, "diff", "--fn", "exp", "--z-re", "0", "--z-im", "0", "--h", "1e-20")
        kv = parse_kv(out)
        assert code == 0 and (kv["est_re"], kv["est_im"]) == (1.0, 0.0)

    def test_diff_ln_cut(self, capsys):
        code, out, _ = run_cli(capsys, "diff", "--fn", "ln", "--z-re", "-0.5", "--z-im", "0", "--h", "1e-20")
        kv = parse_kv(out)
        assert code == 0 and abs(kv["est_re"] + 2) < 1e-13 and kv["est_im"] == 0

    def test_diff_failure_exit(self, capsys):
        code, _, err = run_cli(capsys, "diff", "--fn", "inv", "--z-re", "0", "--z-im", "0", "--h", "1e-200")
        assert code == 1 and "error" in err

    @pytest.mark.parametrize(
        "argv",
        [
            ["diff", "--fn", "gamma"],
            ["diff", "--backend", "nope"],
            ["diff", "--h", "-1"],
            ["diff", "--theta", "4"],
            ["sweep-h", "--h-start", "1e-5", "--h-stop", "1e-2"],
            ["sweep-angle", "--theta-points", "0"],
            ["sweep-h", "--format", "xml"],
            ["lemma-check", "--h", "1e-9"],
        ],
    )
    def test_invalid_arguments(self, argv):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2

    @pytest.mark.parametrize(
        "argv",
        [
            ["lemma-check"],
            ["lemma-check", "--fn", "poly", "--z-re", "1.3", "--z-im", "-0.2", "--h", "1e-2"],
            ["lemma-check", "--fn", "sin", "--z-re", "0.7853981633974483", "--z-im", "1.0471975511965976", "--h", "1e-4"],
        ],
    )
    def test_lemma_check(self, capsys, argv):
        code, out, _ = run_cli(capsys, *argv)
        assert code == 0 and parse_kv(out)["discrepancy"] <= 1e-10

    def test_sweep_h_stdout(self, capsys):
        code, out, _ = run_cli(capsys, "sweep-h", "--h-points", "3")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == HEADER and len(lines) == 1 + 6 * 3

    def test_deterministic_files(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert cli.main(["sweep-angle", "--theta-points", "4", "--phi-points", "4", "--out", str(p)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_grid_log_jsonl(self, tmp_path):
        p = tmp_path / "g.jsonl"
        assert cli.main(["grid-log", "--grid-points", "5", "--format", "jsonl", "--out", str(p)]) == 0
        rows = [json.loads(line) for line in p.read_text().splitlines()]
        assert len(rows) == 25
        assert sum(r["status"] != "ok" for r in rows) == 1
