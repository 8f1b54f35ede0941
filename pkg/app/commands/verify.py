"""Subcomando `verify`: suites de aceptación con reporte JSON"""
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import typer

from app.commands.common import handle_errors, manifest_parameters, output_dir
from app.core.exceptions import ParameterError
from app.enums.verify_suite import VerifySuite
from app.schemas.manifest import VerificationReport
from app.services.verification import run_suite
from app.utils.export import write_json, write_manifest

logger = logging.getLogger(__name__)

EXIT_FAILED = 1


def parse_tolerances(items: List[str]) -> Dict[str, float]:
    """KEY=VALUE -> {KEY: VALUE}; las claves tienen la forma suite.chequeo"""
    tolerances: Dict[str, float] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ParameterError(f"tolerancia mal formada: {item!r} (se espera suite.chequeo=valor)")
        try:
            tolerances[key.strip()] = float(value)
        except ValueError as exc:
            raise ParameterError(f"valor de tolerancia no numérico: {item!r}") from exc
    return tolerances


def write_verify(
    suite: VerifySuite,
    mu: float,
    tolerance: List[str],
    seed: int,
    out: Optional[Path],
) -> Tuple[VerificationReport, List[Path]]:
    """Escribe verify_{suite}.json y su manifest (también cuando hay chequeos fallidos)"""
    suite = VerifySuite(suite)
    report = run_suite(suite, mu=mu, tolerances=parse_tolerances(list(tolerance)), seed=seed)
    directory = output_dir(out)
    stem = f"verify_{suite.value}"
    report_path = write_json(report, directory / f"{stem}.json")
    parameters = manifest_parameters(suite=suite, mu=mu, tolerance=list(tolerance), seed=seed, out=directory)
    manifest_path = directory / f"{stem}.manifest.json"
    write_manifest("verify", parameters, [report_path], manifest_path)
    return report, [report_path, manifest_path]


def cmd_verify(
    suite: VerifySuite = typer.Option(VerifySuite.ALL, "--suite", case_sensitive=False),
    mu: float = typer.Option(3.0, "--mu", help="μ de los chequeos que dependen de μ"),
    tolerance: List[str] = typer.Option([], "--tolerance", help="Límite suite.chequeo=valor (repetible)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Directorio del reporte (default OUTPUT_DIR)"),
    seed: int = typer.Option(0, "--seed", help="Semilla de los puntos aleatorios de la suite cerf"),
) -> None:
    """Corre las suites de aceptación; sale con 1 si algún chequeo falla"""
    with handle_errors("verify"):
        report, paths = write_verify(suite, mu, tolerance, seed, out)

    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        typer.echo(f"{status} {check.suite}.{check.name} value={check.value} limit={check.limit} {check.detail}".rstrip())
    for path in paths:
        typer.echo(str(path))
    if not report.passed:
        logger.error(f"verify {suite.value}: hay chequeos fallidos")
        raise typer.Exit(code=EXIT_FAILED)
