import json

import numpy as np
import pytest

from graphlap.cli import main


@pytest.fixture
def path3(tmp_path):
    doc = {
        "vertices": [{"id": "a", "m": 1.0}, {"id": "b", "m": 1.0}, {"id": "c", "m": 1.0}],
        "edges": [{"u": "a", "v": "b", "b": 1.0}, {"u": "b", "v": "c", "b": 1.0}],
    }
    p = tmp_path / "path3.json"
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture
def cubic_ray(tmp_path):
    doc = {"kind": "ray", "weight_law": {"type": "poly", "power": 3.0}}
    p = tmp_path / "ray.json"
    p.write_text(json.dumps(doc))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestSpectrum:
    def test_golden_values(self, capsys, path3):
        code, doc = run(capsys, ["spectrum", "--graph", path3, "--section", "a,b"])
        assert code == 0
        rep = doc["report"]
        assert np.allclose(rep["eigenvalues"], [(3 - 5**0.5) / 2, (3 + 5**0.5) / 2])
        assert abs(rep["alpha_n"] - 1 / 3) < 1e-12
        assert abs(rep["alpha_m"] - 0.5) < 1e-12
        assert rep["alpha_label"] == "EXACT"
        assert doc["manifest"]["command"] == "spectrum"
        assert len(doc["manifest"]["input_sha256"]) == 64

    def test_family_needs_section(self, capsys, cubic_ray):
        code, _ = run(capsys, ["spectrum", "--family", cubic_ray])
        assert code == 2

    def test_family_radius(self, capsys, cubic_ray):
        code, doc = run(capsys, ["spectrum", "--family", cubic_ray, "--radius", "10"])
        assert code == 0
        assert len(doc["report"]["eigenvalues"]) == 11


class TestCheeger:
    def test_exact_path(self, capsys, path3):
        code, doc = run(capsys, ["cheeger", "--graph", path3, "--U", "a,b", "--measure", "n"])
        assert code == 0
        rep = doc["report"]
        assert abs(rep["alpha"] - 1 / 3) < 1e-12
        assert rep["argmin"] == ["a", "b"]
        assert rep["label"] == "EXACT"
        assert "split_constants" in rep

    def test_upper_bound_large(self, capsys, cubic_ray):
        U = ",".join(str(i) for i in range(30))
        code, doc = run(capsys, ["cheeger", "--family", cubic_ray, "--U", U])
        assert code == 0
        assert doc["report"]["label"] == "UPPER-BOUND"


class TestCoarea:
    def test_identities_hold(self, capsys, path3):
        code, doc = run(capsys, ["coarea", "--graph", path3, "--f", '{"a": 2.0, "b": 1.0}'])
        assert code == 0
        rep = doc["report"]
        assert rep["first_identity_discrepancy"] < 1e-12
        assert rep["second_identity_discrepancy"] < 1e-12

    def test_bad_f(self, capsys, path3):
        code, _ = run(capsys, ["coarea", "--graph", path3, "--f", "not json"])
        assert code == 2


class TestEssential:
    def test_ray(self, capsys, cubic_ray):
        code, doc = run(
            capsys, ["essential", "--family", cubic_ray, "--delete-radius", "3", "--outer", "10,20"]
        )
        assert code == 0
        rep = doc["report"]
        assert len(rep["inf_spectrum_sequence"]) == 2
        assert "emptiness_diagnostic" in rep


class TestHeatAndStochastic:
    def test_heat_curves(self, capsys, cubic_ray):
        code, doc = run(
            capsys, ["heat", "--family", cubic_ray, "--radii", "16,32", "--times", "0.5,1.0"]
        )
        assert code == 0
        curves = doc["report"]["curves"]
        assert len(curves) == 2 and curves[0]["radius"] == 16
        m = np.array(curves[-1]["M"])
        assert np.all(m > 0) and np.all(m < 1)

    def test_stochastic_verdict(self, capsys, cubic_ray):
        code, doc = run(
            capsys,
            [
                "stochastic",
                "--family",
                cubic_ray,
                "--radii",
                "16,32,64,128,256,500,512",
                "--quad-check",
            ],
        )
        assert code == 0
        rep = doc["report"]
        assert rep["verdict"] == "SI"
        assert rep["w_quadrature_crosscheck"][0]["discrepancy"] < 1e-6

    def test_finite_graph_sc(self, capsys, path3):
        code, doc = run(capsys, ["stochastic", "--graph", path3, "--radii", "3,4"])
        assert code == 0
        assert doc["report"]["verdict"] == "SC"


class TestSimulate:
    def test_deterministic_report(self, capsys, path3):
        argv = ["simulate", "--graph", path3, "--x0", "a", "--t", "0.5", "--samples", "500"]
        code1, doc1 = run(capsys, argv)
        code2, doc2 = run(capsys, argv)
        assert code1 == code2 == 0
        # identical manifests give identical reports; only timing may differ
        assert doc1["report"] == doc2["report"]
        assert doc1["manifest"]["config"] == doc2["manifest"]["config"]
        assert doc1["report"]["counts"]["EXPLODED"] == 0

    def test_seed_changes_output(self, capsys, path3):
        base = ["simulate", "--graph", path3, "--x0", "a", "--samples", "500"]
        _, d0 = run(capsys, base + ["--seed", "0"])
        _, d1 = run(capsys, base + ["--seed", "1"])
        assert d0["report"]["mean_jumps"] != d1["report"]["mean_jumps"]

    def test_out_file(self, capsys, tmp_path, path3):
        out = tmp_path / "r.json"
        code, doc = run(
            capsys,
            ["simulate", "--graph", path3, "--x0", "a", "--samples", "100", "--out", str(out)],
        )
        assert code == 0 and doc is None
        saved = json.loads(out.read_text())
        assert saved["manifest"]["command"] == "simulate"

    def test_unknown_vertex(self, capsys, path3):
        code, _ = run(capsys, ["simulate", "--graph", path3, "--x0", "zz"])
        assert code == 2


class TestVerify:
    def test_random_suite_passes(self, capsys):
        code, doc = run(capsys, ["verify", "--instances", "5", "--seed", "1"])
        assert code == 0
        assert doc["report"]["all_passed"] is True

    def test_only_filter(self, capsys):
        code, doc = run(capsys, ["verify", "--instances", "5", "--only", "coarea,detailed_balance"])
        assert code == 0
        names = {r["property"] for r in doc["report"]["results"]}
        assert names == {"coarea", "detailed_balance"}

    def test_invalid_graph_rejected(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "vertices": [{"id": "a"}, {"id": "b"}],
                    "edges": [{"u": "a", "v": "b", "b": -1.0}],
                }
            )
        )
        code, _ = run(capsys, ["verify", "--graph", str(bad), "--instances", "5"])
        assert code == 2

    def test_allow_invalid_fails_verification(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(
            json.dumps(
                {
                    "vertices": [{"id": "a"}, {"id": "b"}],
                    "edges": [{"u": "a", "v": "b", "b": -1.0}],
                }
            )
        )
        code, doc = run(
            capsys, ["verify", "--graph", str(bad), "--instances", "5", "--allow-invalid"]
        )
        assert code == 1
        assert doc["report"]["all_passed"] is False


class TestErrors:
    def test_missing_file(self, capsys):
        code, _ = run(capsys, ["spectrum", "--graph", "/nonexistent/g.json"])
        assert code == 2

    def test_no_input(self, capsys):
        code, _ = run(capsys, ["spectrum"])
        assert code == 2
