"""Command-line surface: outputs, exit codes, reproducibility."""

import json
import math

import numpy as np
import pytest

from label_audit.bounds import rr_worstcase_adv, thm1_exact
from label_audit.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def beta_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "beta.csv"
    assert run(["gen-data", "--dist", "beta", "--a", 2, "--b", 30, "--m", 1200,
                "--d-distractors", 0, "--seed", 1, "--out", path]) == 0
    return path


@pytest.fixture(scope="module")
def indep_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "indep.csv"
    assert run(["gen-data", "--dist", "independent", "--p", 0.3, "--m", 4000,
                "--seed", 2, "--out", path]) == 0
    return path


def read_rows(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


class TestGenData:
    def test_row_count_and_header(self, tmp_path):
        out = tmp_path / "d.csv"
        assert run(["gen-data", "--dist", "beta", "--a", 2, "--b", 30, "--m", 100,
                    "--seed", 1, "--out", out]) == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("# ")
        assert len(lines) == 102  # config + header + rows

    def test_unknown_dist_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(["gen-data", "--dist", "cauchy", "--m", 10, "--out", tmp_path / "x.csv"])
        assert exc.value.code == 2

    def test_reproducible_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["gen-data", "--dist", "uniform", "--m", 64, "--seed", 9]
        assert run(args + ["--out", a]) == 0
        assert run(args + ["--out", b]) == 0
        assert a.read_bytes().replace(bytes(str(a), "utf8"), b"") == \
            b.read_bytes().replace(bytes(str(b), "utf8"), b"")


class TestAudit:
    def test_rr_below_worstcase(self, beta_csv, tmp_path):
        out = tmp_path / "audit.csv"
        assert run(["audit", "--mechanism", "rr", "--epsilon", 1, "--dataset", beta_csv,
                    "--out", out]) == 0
        _, rows = read_rows(out)
        assert float(rows[0]["additive_adv"]) <= rr_worstcase_adv(1.0) + 1e-12
        assert float(rows[0]["mult_p98"]) == pytest.approx(1.0, abs=1e-9)

    def test_null_zero(self, beta_csv, tmp_path):
        out = tmp_path / "audit_null.csv"
        assert run(["audit", "--mechanism", "null", "--dataset", beta_csv, "--out", out]) == 0
        _, rows = read_rows(out)
        assert float(rows[0]["additive_adv"]) == 0.0
        assert float(rows[0]["mult_p98"]) == 0.0

    def test_llp_matches_binomial_closed_form(self, indep_csv, tmp_path):
        out = tmp_path / "audit_llp.csv"
        assert run(["audit", "--mechanism", "llp", "--bag-size", 8, "--dataset", indep_csv,
                    "--trials", 500, "--out", out]) == 0
        _, rows = read_rows(out)
        got = float(rows[0]["additive_adv"])
        stderr = float(rows[0]["additive_stderr"])
        assert abs(got - thm1_exact(0.3, 8)) <= 3 * stderr + 1e-9

    def test_eta_less_dataset_needs_knn(self, tmp_path):
        path = tmp_path / "noeta.csv"
        path.write_text("feat_0,label\n" + "".join(f"{v},{v % 2}\n" for v in range(60)))
        out = tmp_path / "a.csv"
        assert run(["audit", "--mechanism", "rr", "--epsilon", 1, "--dataset", path,
                    "--out", out]) == 2
        assert run(["audit", "--mechanism", "rr", "--epsilon", 1, "--dataset", path,
                    "--knn", 10, "--out", out]) == 0

    def test_json_format(self, beta_csv, tmp_path):
        out = tmp_path / "audit.json"
        assert run(["audit", "--mechanism", "rr", "--epsilon", 0.5, "--dataset", beta_csv,
                    "--out", out, "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        assert payload["config"]["mechanism"] == "rr"
        assert len(payload["rows"]) == 1


class TestScatter:
    def test_row_count_and_runs(self, beta_csv, tmp_path):
        out = tmp_path / "scatter.csv"
        assert run(["scatter", "--mechanism", "llp", "--bag-size", 7, "--dataset", beta_csv,
                    "--runs", 2, "--out", out]) == 0
        _, rows = read_rows(out)
        m_eff = (1200 // 7) * 7
        assert len(rows) == 2 * m_eff
        assert {r["run"] for r in rows} == {"0", "1"}

    def test_rr_two_posteriors_per_prior(self, beta_csv, tmp_path):
        out = tmp_path / "scatter_rr.csv"
        assert run(["scatter", "--mechanism", "rr", "--epsilon", 2, "--dataset", beta_csv,
                    "--out", out]) == 0
        _, rows = read_rows(out)
        seen = {}
        for r in rows:
            seen.setdefault(r["prior"], set()).add(r["posterior"])
        assert all(len(v) <= 2 for v in seen.values())

    def test_null_diagonal(self, beta_csv, tmp_path):
        out = tmp_path / "scatter_null.csv"
        assert run(["scatter", "--mechanism", "null", "--dataset", beta_csv, "--out", out]) == 0
        _, rows = read_rows(out)
        assert all(r["prior"] == r["posterior"] for r in rows)


class TestCdf:
    def test_final_mass_and_rr_support(self, beta_csv, tmp_path):
        out = tmp_path / "cdf.csv"
        assert run(["cdf", "--mechanism", "rr", "--epsilon", 1.5, "--dataset", beta_csv,
                    "--out", out]) == 0
        _, rows = read_rows(out)
        mult = [r for r in rows if r["measure"] == "mult"]
        assert float(mult[-1]["cdf"]) == 1.0
        assert max(float(r["value"]) for r in mult) <= 1.5 + 1e-9

    def test_llp_beta_infinite_mass(self, beta_csv, tmp_path):
        out = tmp_path / "cdf_llp.csv"
        assert run(["cdf", "--mechanism", "llp", "--bag-size", 8, "--dataset", beta_csv,
                    "--out", out]) == 0
        _, rows = read_rows(out)
        mult = [r for r in rows if r["measure"] == "mult"]
        assert float(mult[0]["infinite_mass"]) > 0.0
        assert float(mult[-1]["cdf"]) == 1.0


class TestTradeoff:
    def test_small_grid(self, beta_csv, tmp_path):
        out = tmp_path / "tradeoff.csv"
        assert run([
            "tradeoff", "--dataset", beta_csv, "--mechanisms", "null,rr,llp",
            "--epsilons", "1,4", "--bag-sizes", "4", "--learning-rates", "0.01",
            "--runs", 2, "--epochs", 1, "--adv-trials", 200, "--out", out,
        ]) == 0
        header, rows = read_rows(out)
        assert header[:3] == ["mechanism", "bag_size", "epsilon"]
        assert [r["mechanism"] for r in rows] == ["llp", "null", "rr", "rr"]
        assert float(rows[1]["additive_adv"]) == 0.0  # null row
        keys = [(r["mechanism"], float(r["bag_size"]), float(r["epsilon"])) for r in rows]
        assert keys == sorted(keys)


class TestBoundsCheck:
    def test_default_grid_passes(self, tmp_path):
        out = tmp_path / "bounds.csv"
        assert run(["bounds-check", "--k-grid", "16,64", "--trials", 400,
                    "--confbased-k", 4096, "--seed", 3, "--out", out]) == 0
        _, rows = read_rows(out)
        assert all(r["satisfied"] == "true" for r in rows)
        tb = [r for r in rows if r["bound_name"] == "truebound"]
        assert tb and all(r["threshold"] and r["bound_value"] for r in tb)

    def test_override_forces_violation(self, tmp_path):
        out = tmp_path / "bounds_bad.csv"
        assert run(["bounds-check", "--k-grid", "16", "--trials", 200,
                    "--empirical-override", "thm1_upper=0.99", "--seed", 3,
                    "--out", out]) == 1
        _, rows = read_rows(out)
        bad = [r for r in rows if r["bound_name"] == "thm1_upper"]
        assert all(r["satisfied"] == "false" for r in bad)


class TestParallelAgreement:
    def test_tradeoff_parallel_matches_serial(self, beta_csv, tmp_path, monkeypatch):
        args = ["tradeoff", "--dataset", beta_csv, "--mechanisms", "rr,llp",
                "--epsilons", "1", "--bag-sizes", "4", "--learning-rates", "0.01",
                "--runs", 2, "--epochs", 1, "--adv-trials", 100, "--seed", 6]
        serial, parallel = tmp_path / "serial.csv", tmp_path / "parallel.csv"
        monkeypatch.delenv("LABEL_AUDIT_THREADS", raising=False)
        assert run(args + ["--out", serial]) == 0
        monkeypatch.setenv("LABEL_AUDIT_THREADS", "4")
        assert run(args + ["--out", parallel]) == 0
        assert serial.read_bytes() == parallel.read_bytes()


class TestDeterminism:
    @pytest.mark.parametrize("mechanism,extra", [
        ("rr", ["--epsilon", 1]),
        ("llp", ["--bag-size", 4]),
        ("llp-lap", ["--epsilon", 0.5, "--bag-size", 4]),
        ("llp-geom", ["--epsilon", 0.5, "--bag-size", 4]),
    ])
    def test_audit_bytes(self, beta_csv, tmp_path, mechanism, extra):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["audit", "--mechanism", mechanism, "--dataset", beta_csv,
                "--trials", 100, "--seed", 5] + extra
        assert run(base + ["--out", a]) == 0
        assert run(base + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()
