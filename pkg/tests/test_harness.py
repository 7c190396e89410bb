import json

import numpy as np
import pytest

from gridrbf.cli import main as cli_main
from gridrbf.harness import (
    ExperimentConfig,
    emit_outputs,
    estimate_rate,
    plateau_estimate,
    run_study,
)


class TestEstimateRate:
    def test_pure_power(self):
        h = 2.0 ** -np.arange(1, 8)
        fit = estimate_rate(h, h**3)
        assert fit["slope"] == pytest.approx(3.0, abs=1e-10)
        assert fit["residual"] < 1e-12

    def test_perturbed_power(self):
        h = 2.0 ** -np.arange(3, 9)
        fit = estimate_rate(h, h**2 * (1.0 + 0.1 * h))
        assert 1.95 <= fit["slope"] <= 2.05

    def test_saturating_ladder_flagged_and_plateau_found(self):
        h = 2.0 ** -np.arange(1, 10)
        c0 = 3.7e-5
        e = c0 + h**4
        fit = estimate_rate(h, e)
        assert fit["residual"] > 0.1  # visibly not a single power law
        plateau = plateau_estimate(h, e)
        assert plateau == pytest.approx(c0, rel=0.02)

    def test_exact_zero_short_circuit(self):
        h = np.array([0.5, 0.25, 0.125])
        fit = estimate_rate(h, np.array([1e-3, 0.0, 1e-9]))
        assert fit["verdict"] == "exact"

    def test_input_validation(self):
        with pytest.raises(ValueError):
            estimate_rate([0.5, 0.5, 0.25], [1, 1, 1])
        with pytest.raises(ValueError):
            estimate_rate([0.5, 0.25], [1, 1])


class TestConfig:
    def test_json_roundtrip_and_digest_stability(self):
        text = json.dumps(
            {
                "study": "interp_convergence",
                "basis": {"family": "polyharmonic", "n": 1, "p": 3.0},
                "data": {"kind": "gaussian", "params": {}},
                "ladder": {"start_exp": 2, "count": 6},
            }
        )
        c1 = ExperimentConfig.from_json(text)
        c2 = ExperimentConfig.from_json(c1.canonical_json().replace('"t": 1.0, ', '"t": 1.0, '))
        assert c1.digest() == c2.digest()

    def test_invalid_configs(self):
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(json.dumps({"study": "bogus", "basis": {"family": "gaussian", "n": 1}}))
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(
                json.dumps(
                    {
                        "study": "interp_convergence",
                        "basis": {"family": "gaussian", "n": 1},
                        "ladder": {"start_exp": 2, "count": 2},
                    }
                )
            )
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(
                json.dumps({"study": "scheme_convergence", "basis": {"family": "gaussian", "n": 1}})
            )

    def test_ladder_values(self):
        cfg = ExperimentConfig(
            study="interp_convergence",
            basis={"family": "polyharmonic", "n": 1, "p": 3.0},
            ladder={"start_exp": 2, "count": 4},
        )
        np.testing.assert_allclose(cfg.h_values(), [0.25, 0.125, 0.0625, 0.03125])


@pytest.fixture(scope="module")
def interp_cfg():
    return ExperimentConfig(
        study="interp_convergence",
        basis={"family": "polyharmonic", "n": 1, "p": 3.0},
        data={"kind": "gaussian", "params": {}},
        ladder={"start_exp": 2, "count": 6},
    )


@pytest.fixture(scope="module")
def interp_result(interp_cfg):
    return run_study(interp_cfg)


class TestRunStudy:
    def test_interp_convergence(self, interp_result):
        assert interp_result.fit["slope"] == pytest.approx(4.0, abs=0.1)
        assert interp_result.verdicts["rate_match"]

    def test_prediction_consistency_recorded(self, interp_result):
        assert "rate_match" in interp_result.verdicts
        assert interp_result.predicted_constant is not None
        assert interp_result.extras["limit_ratio"][-1] == pytest.approx(1.0, abs=0.02)

    def test_saturation_study(self):
        cfg = ExperimentConfig(
            study="interp_saturation",
            basis={"family": "gaussian", "n": 1, "c": 1.0},
            data={"kind": "gaussian", "params": {}},
            ladder={"start_exp": 1, "count": 8},
        )
        res = run_study(cfg)
        assert res.plateau is not None
        assert res.verdicts["plateau_in_bracket"]
        assert res.extras["pre_plateau_max_order"] > 4.0

    def test_scheme_convergence(self):
        cfg = ExperimentConfig(
            study="scheme_convergence",
            basis={"family": "polyharmonic", "n": 1, "p": 3.0},
            symbol={"kind": "heat"},
            data={"kind": "gaussian", "params": {}},
            ladder={"start_exp": 2, "count": 6},
            t=1.0,
        )
        res = run_study(cfg)
        assert res.fit["slope"] == pytest.approx(2.0, abs=0.1)
        assert res.verdicts["rate_match"]

    def test_constants_table(self):
        cfg = ExperimentConfig(
            study="constants_table",
            basis={"family": "multiquadric", "n": 1, "c": 1.0},
            symbol={"kind": "heat"},
        )
        res = run_study(cfg)
        doc = res.extras["constants"]
        for key in ("a_lower", "a_upper", "l_upper", "l_lower", "g_upper",
                    "g_lower", "l_q", "g_symbol", "rho", "rho1", "rho2", "p_r",
                    "alias_mass", "kappa", "tail_tol"):
            assert key in doc

    def test_cross_validation_study(self):
        cfg = ExperimentConfig(
            study="cross_validation",
            basis={"family": "multiquadric", "n": 1, "c": 1.0},
            symbol={"kind": "heat"},
            data={"kind": "gaussian", "params": {}},
            cross={"h": 0.25, "J": 48, "T": 0.25},
        )
        res = run_study(cfg)
        assert res.verdicts["within_budget"]

    def test_parallel_jobs_match_serial(self, interp_cfg, interp_result):
        res2 = run_study(interp_cfg, jobs=2)
        assert res2.errors == interp_result.errors


class TestEmitOutputs:
    def test_files_and_determinism(self, tmp_path, interp_cfg, interp_result):
        paths1 = emit_outputs(interp_result, interp_cfg, str(tmp_path / "a"))
        paths2 = emit_outputs(interp_result, interp_cfg, str(tmp_path / "b"))
        with open(paths1["csv"]) as fh:
            csv1 = fh.read()
        with open(paths2["csv"]) as fh:
            assert fh.read() == csv1
        assert csv1.splitlines()[0] == "h,error,order"
        assert len(csv1.splitlines()) == len(interp_result.h) + 1
        with open(paths1["json"]) as fh:
            doc1 = fh.read()
        with open(paths2["json"]) as fh:
            assert fh.read() == doc1
        with open(paths1["svg"]) as fh:
            svg1 = fh.read()
        with open(paths2["svg"]) as fh:
            assert fh.read() == svg1
        assert "<svg" in svg1

    def test_plateau_guide_in_svg(self, tmp_path):
        cfg = ExperimentConfig(
            study="interp_saturation",
            basis={"family": "gaussian", "n": 1, "c": 1.0},
            data={"kind": "gaussian", "params": {}},
            ladder={"start_exp": 1, "count": 8},
        )
        res = run_study(cfg)
        paths = emit_outputs(res, cfg, str(tmp_path))
        with open(paths["svg"]) as fh:
            svg = fh.read()
        assert "plateau" in svg

    def test_result_json_schema(self, tmp_path, interp_cfg, interp_result):
        paths = emit_outputs(interp_result, interp_cfg, str(tmp_path))
        with open(paths["json"]) as fh:
            doc = json.load(fh)
        for key in ("study", "h", "errors", "fit", "predicted_rate", "verdicts"):
            assert key in doc
        assert "runtime_seconds" not in doc  # timing lives in meta.json
        with open(paths["meta"]) as fh:
            assert "runtime_seconds" in json.load(fh)


class TestCli:
    def test_validate_and_run(self, tmp_path, capsys):
        cfg = {
            "study": "interp_convergence",
            "basis": {"family": "multiquadric", "n": 1, "c": 1.0},
            "data": {"kind": "gaussian", "params": {}},
            "ladder": {"start_exp": 2, "count": 5},
        }
        cpath = tmp_path / "cfg.json"
        cpath.write_text(json.dumps(cfg))
        assert cli_main(["validate", str(cpath)]) == 0
        assert cli_main(["run", str(cpath), "--out", str(tmp_path / "out")]) == 0
        out = capsys.readouterr().out
        assert "fitted rate" in out
        assert (tmp_path / "out").exists()

    def test_validate_rejects_bad_config(self, tmp_path, capsys):
        cpath = tmp_path / "bad.json"
        cpath.write_text(json.dumps({"study": "nope", "basis": {"family": "gaussian", "n": 1}}))
        assert cli_main(["validate", str(cpath)]) == 1

    def test_constants_command(self, tmp_path, capsys):
        bpath = tmp_path / "basis.json"
        bpath.write_text(json.dumps({"family": "polyharmonic", "n": 1, "p": 3.0}))
        spath = tmp_path / "symbol.json"
        spath.write_text(json.dumps({"kind": "heat", "n": 1, "params": {}}))
        assert cli_main(["constants", str(bpath), "--symbol", str(spath)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["l_upper"] == pytest.approx(1.0 / 360.0, rel=1e-9)
        assert doc["g_symbol"]["heat"][0] == pytest.approx(1.0 / 12.0, rel=1e-9)
