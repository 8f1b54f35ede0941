"""
Tests de la línea de comandos con typer.testing.CliRunner
"""
import json

import numpy as np
import pandas as pd
import pytest
from scipy import integrate

from app.commands.psi import write_psi
from app.commands.replay import replay_manifest
from app.core.config import Settings, apply_settings, settings
from app.main import app
from app.schemas.manifest import CheckResult, VerificationReport


def _invoke(runner, *args):
    return runner.invoke(app, [str(a) for a in args])


def test_psi_writes_csv_and_manifest(runner, tmp_path):
    """
    Test: psi escribe 2001 filas con el encabezado fijo y ψ normalizada
    """
    result = _invoke(runner, "psi", "--mu", 3, "--t", 0.07, "--out", tmp_path)
    assert result.exit_code == 0, result.output

    frame = pd.read_csv(tmp_path / "psi_mu3_t0p07_exact.csv")
    assert list(frame.columns) == ["x", "re_psi", "im_psi", "abs2", "abs2_initial", "abs2_bound_final"]
    assert len(frame) == 2001
    assert integrate.trapezoid(frame["abs2"], frame["x"]) == pytest.approx(1.0, abs=1e-3)

    manifest = json.loads((tmp_path / "psi_mu3_t0p07_exact.json").read_text())
    assert manifest["command"] == "psi"
    assert manifest["parameters"]["mu"] == 3.0
    assert any(path.endswith("psi_mu3_t0p07_exact.csv") for path in manifest["outputs"])


def test_psi_identity_quench(runner, tmp_path):
    result = _invoke(runner, "psi", "--mu", 1, "--t", 5, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "psi_mu1_t5_exact.csv")
    assert np.max(np.abs(frame["abs2"] - np.exp(-2.0 * np.abs(frame["x"])))) <= 1e-12


def test_psi_without_bound_state_omits_column(runner, tmp_path):
    result = _invoke(runner, "psi", "--mu", 0, "--t", 0.2, "--nx", 101, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "psi_mu0_t0p2_exact.csv")
    assert "abs2_bound_final" not in frame.columns
    assert len(frame) == 101


def test_psi_farfield_leaves_empty_cells(runner, tmp_path):
    """
    Test: las muestras fuera del dominio de la forma lejana quedan vacías
    """
    result = _invoke(runner, "psi", "--mu", 3, "--t", 1, "--method", "farfield", "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "psi_mu3_t1_farfield.csv")
    assert len(frame) == 2001
    near = frame["x"].abs() < 4.0
    assert frame.loc[near, "re_psi"].isna().all()
    assert frame.loc[~near & (frame["x"].abs() > 6.0), "re_psi"].notna().all()


def test_invalid_arguments_exit_with_code_2(runner, tmp_path):
    """
    Test: parámetros inválidos terminan con código 2
    """
    assert _invoke(runner, "psi", "--mu", -1, "--t", 0.1, "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "psi", "--mu", 3, "--t", 0.1, "--nx", 1, "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "psi", "--mu", 3, "--t", 0.1, "--method", "magic", "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "survival", "--mu", 3, "--spacing", "log", "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "figures", "--which", 4, "--out", tmp_path).exit_code == 2


def test_psi_from_physical_strengths(runner, tmp_path, caplog):
    """
    Test: --alpha 2 --lambda 6 equivale a --mu 3 y el manifest guarda el par físico
    """
    caplog.set_level("INFO")
    result = _invoke(runner, "psi", "--alpha", 2, "--lambda", 6, "--t", 0.07, "--nx", 101, "--out", tmp_path / "phys")
    assert result.exit_code == 0, result.output
    assert _invoke(runner, "psi", "--mu", 3, "--t", 0.07, "--nx", 101, "--out", tmp_path / "dimless").exit_code == 0

    name = "psi_mu3_t0p07_exact.csv"
    assert (tmp_path / "phys" / name).read_bytes() == (tmp_path / "dimless" / name).read_bytes()
    parameters = json.loads((tmp_path / "phys" / "psi_mu3_t0p07_exact.json").read_text())["parameters"]
    assert (parameters["mu"], parameters["alpha"], parameters["lambda_"]) == (3.0, 2.0, 6.0)
    # t físico = t/α², x físico = x/α
    assert any("t físico hasta 0.0175" in r.getMessage() and "[-5, 5]" in r.getMessage() for r in caplog.records)

    replayed = replay_manifest(tmp_path / "phys" / "psi_mu3_t0p07_exact.json", tmp_path / "again")
    assert replayed[0].read_bytes() == (tmp_path / "phys" / name).read_bytes()


def test_survival_from_physical_strengths(runner, tmp_path):
    result = _invoke(runner, "survival", "--alpha", 0.5, "--lambda", 0.25, "--t-max", 1, "--n", 11, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "survival_mu0p5_exact_linear.csv")
    assert len(frame) == 11
    assert np.allclose(frame["P_inf"], 16 * 0.25 / 1.5**4)


def test_physical_strengths_validation(runner, tmp_path):
    """
    Test: par incompleto, α <= 0, μ inconsistente con λ/α o sin intensidades terminan con código 2
    """
    assert _invoke(runner, "psi", "--alpha", 2, "--t", 0.1, "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "psi", "--alpha", 0, "--lambda", 1, "--t", 0.1, "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "psi", "--mu", 2, "--alpha", 2, "--lambda", 6, "--t", 0.1, "--out", tmp_path).exit_code == 2
    assert _invoke(runner, "survival", "--t-max", 1, "--out", tmp_path).exit_code == 2
    consistent = _invoke(runner, "psi", "--mu", 3, "--alpha", 2, "--lambda", 6, "--t", 0.1, "--nx", 11, "--out", tmp_path)
    assert consistent.exit_code == 0, consistent.output


def test_survival_columns(runner, tmp_path):
    result = _invoke(runner, "survival", "--mu", 3, "--t-max", 20, "--n", 201, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "survival_mu3_exact_linear.csv")
    assert list(frame.columns) == ["t", "re_A", "im_A", "P", "one_minus_P", "P_inf", "one_minus_P_short", "P_long"]
    assert len(frame) == 201
    assert np.allclose(frame["P_inf"], 0.5625)
    assert frame["P"].iloc[0] == 1.0
    assert frame["one_minus_P_short"].iloc[0] == 0.0
    assert frame.loc[frame["t"] >= 0.1, "one_minus_P_short"].isna().all()
    assert frame.loc[frame["t"] > 10.0, "P_long"].notna().all()


def test_survival_identity(runner, tmp_path):
    result = _invoke(runner, "survival", "--mu", 1, "--t-max", 10, "--n", 11, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "survival_mu1_exact_linear.csv")
    assert np.all(frame["P"] == 1.0)


def test_fit_generated_escape(runner, tmp_path):
    """
    Test: fit sobre la serie generada da el exponente 3/2
    """
    result = _invoke(runner, "fit", "--quantity", "escape", "--mu", 3, "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "fit_escape_mu3.json").read_text())
    assert report["source"] == "generated"
    assert report["fit"]["exponent"] == pytest.approx(1.5, abs=0.02)


def test_fit_from_survival_file(runner, tmp_path):
    times = np.logspace(-4, 0, 50)
    pd.DataFrame({"t": times, "one_minus_P": 2.0 * times**1.5}).to_csv(tmp_path / "series.csv", index=False)
    result = _invoke(
        runner, "fit", "--input", tmp_path / "series.csv", "--window-lo", 1e-4, "--window-hi", 1, "--out", tmp_path
    )
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "fit_escape.json").read_text())
    assert report["fit"]["exponent"] == pytest.approx(1.5, abs=1e-9)
    assert report["fit"]["coefficient"] == pytest.approx(2.0, rel=1e-9)


def test_fit_missing_column(runner, tmp_path):
    pd.DataFrame({"t": [1.0, 2.0]}).to_csv(tmp_path / "bad.csv", index=False)
    assert _invoke(runner, "fit", "--input", tmp_path / "bad.csv", "--out", tmp_path).exit_code == 2


def test_figures_respect_config_file(runner, tmp_path):
    """
    Test: --config define OUTPUT_DIR y figures 2 escribe P(t) en [0, 20]
    """
    target = tmp_path / "figs"
    config = tmp_path / "run.env"
    config.write_text(f"OUTPUT_DIR={target}\n", encoding="utf-8")
    result = _invoke(runner, "--config", config, "figures", "--which", 2)
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(target / "survival_mu3_exact_linear.csv")
    assert len(frame) == 2001
    assert frame["t"].iloc[-1] == pytest.approx(20.0)


def test_replay_reproduces_bytes(runner, tmp_path):
    """
    Test: replay del manifest produce el mismo CSV byte a byte
    """
    first, second = tmp_path / "first", tmp_path / "second"
    assert _invoke(runner, "psi", "--mu", 3, "--t", 0.2, "--nx", 401, "--out", first).exit_code == 0
    result = _invoke(runner, "replay", "--manifest", first / "psi_mu3_t0p2_exact.json", "--out", second)
    assert result.exit_code == 0, result.output
    name = "psi_mu3_t0p2_exact.csv"
    assert (first / name).read_bytes() == (second / name).read_bytes()


def test_replay_restores_effective_settings(runner, tmp_path):
    """
    Test: una corrida hecha con --config se reproduce igual sin el archivo
    """
    config = tmp_path / "run.env"
    config.write_text("CSV_PRECISION=6\nQUAD_EPSABS=1e-9\n", encoding="utf-8")
    first, second = tmp_path / "first", tmp_path / "second"
    result = _invoke(runner, "--config", config, "psi", "--mu", 3, "--t", 0.2, "--nx", 11, "--out", first)
    assert result.exit_code == 0, result.output

    manifest = json.loads((first / "psi_mu3_t0p2_exact.json").read_text())
    assert manifest["settings"]["CSV_PRECISION"] == 6
    assert manifest["settings"]["QUAD_EPSABS"] == 1e-9

    result = _invoke(runner, "replay", "--manifest", first / "psi_mu3_t0p2_exact.json", "--out", second)
    assert result.exit_code == 0, result.output
    name = "psi_mu3_t0p2_exact.csv"
    assert (first / name).read_bytes() == (second / name).read_bytes()
    assert "-1.00000e+01" in (second / name).read_text()


def test_replay_leaves_settings_untouched(tmp_path):
    """
    Test: replay aplica la configuración del manifest solo mientras corre
    """
    apply_settings(Settings(CSV_PRECISION=4))
    write_psi(3.0, 0.2, -1.0, 1.0, 5, "exact", tmp_path / "run")
    apply_settings(Settings())
    replay_manifest(tmp_path / "run" / "psi_mu3_t0p2_exact.json", tmp_path / "again")
    assert settings.CSV_PRECISION == 15
    text = (tmp_path / "again" / "psi_mu3_t0p2_exact.csv").read_text()
    assert "-1.000e+00" in text


def test_oracle_command(runner, tmp_path):
    result = _invoke(
        runner,
        "oracle", "--mu", 3, "--snapshot", 0.05, "--n-samples", 5,
        "--dx", 0.02, "--dt", 1e-3, "--half-width", 15, "--out", tmp_path,
    )
    assert result.exit_code == 0, result.output
    series = pd.read_csv(tmp_path / "oracle_mu3_survival.csv")
    assert len(series) == 6
    assert "P_exact" in series.columns
    summary = json.loads((tmp_path / "oracle_mu3_comparison.json").read_text())
    assert summary["max_abs_P_error"] < 1e-2
    assert "0.05" in summary["snapshots"]
    assert (tmp_path / "oracle_mu3_psi_t0p05.csv").is_file()


def test_show_config(runner):
    result = _invoke(runner, "--show-config")
    assert result.exit_code == 0
    values = json.loads(result.stdout)
    assert values["ORACLE_DX"] == 0.005
    assert values["PROJECT_NAME"] == "DeltaQuench"


def test_bad_log_level(runner):
    assert _invoke(runner, "--log-level", "chatty", "--show-config").exit_code == 2


def test_verify_writes_manifest_and_replays(runner, tmp_path, monkeypatch):
    """
    Test: verify deja su manifest aunque falle, y replay lo vuelve a correr
    """
    calls = []

    def fake_suite(suite, mu, tolerances, seed):
        calls.append((suite.value, mu, tolerances, seed))
        check = CheckResult(suite=suite.value, name="stub", passed=False, value=2.0, limit=1.0, detail="t = 1")
        return VerificationReport(suite=suite.value, version="test", passed=False, elapsed_seconds=0.0, checks=[check])

    monkeypatch.setattr("app.commands.verify.run_suite", fake_suite)
    result = _invoke(runner, "verify", "--suite", "exact", "--tolerance", "exact.stub=1", "--seed", 7, "--out", tmp_path)
    assert result.exit_code == 1
    assert "FAIL exact.stub value=2.0 limit=1.0 t = 1" in result.output

    manifest_path = tmp_path / "verify_exact.manifest.json"
    manifest = json.loads(manifest_path.read_text())
    assert manifest["command"] == "verify"
    assert manifest["parameters"]["tolerance"] == ["exact.stub=1"]
    assert manifest["settings"]["CSV_PRECISION"] == 15
    assert any(path.endswith("verify_exact.json") for path in manifest["outputs"])

    replay_manifest(manifest_path, tmp_path / "again")
    assert calls[-1] == ("exact", 3.0, {"exact.stub": 1.0}, 7)
    assert (tmp_path / "again" / "verify_exact.json").is_file()


def test_verify_unknown_tolerance(runner, tmp_path):
    result = _invoke(runner, "verify", "--suite", "cerf", "--tolerance", "cerf.nothing=1", "--out", tmp_path)
    assert result.exit_code == 2


@pytest.mark.slow
def test_verify_cerf_suite(runner, tmp_path):
    """
    Test: la suite cerf pasa y una tolerancia imposible la hace fallar con código 1
    """
    result = _invoke(runner, "verify", "--suite", "cerf", "--out", tmp_path)
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "verify_cerf.json").read_text())
    assert report["passed"] is True
    manifest = json.loads((tmp_path / "verify_cerf.manifest.json").read_text())
    assert manifest["command"] == "verify"
    assert manifest["parameters"]["suite"] == "cerf"
    assert manifest["settings"]["ORACLE_DX"] == 0.005

    failing = _invoke(runner, "verify", "--suite", "cerf", "--tolerance", "cerf.erfc_rel=-1", "--out", tmp_path)
    assert failing.exit_code == 1
    assert "FAIL cerf.erfc_grid" in failing.output
