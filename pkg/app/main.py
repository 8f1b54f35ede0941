import json
import logging
import sys
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

# Add the parent directory to sys.path
sys.path.append(str(Path(__file__).parent.parent))

from app.commands import figures, fit, oracle, psi, replay, survival, verify
from app.core.config import apply_settings, load_settings, settings
from app.core.exceptions import DeltaQuenchError

logger = logging.getLogger("app")

app = typer.Typer(
    name="deltaquench",
    help="Decaimiento cuántico exacto tras un quench súbito de un pozo delta",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="Archivo KEY=value con la configuración"),
    show_config: bool = typer.Option(False, "--show-config", help="Imprime la configuración efectiva y sale"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING o ERROR"),
) -> None:
    """Flags > archivo --config > entorno/.env > valores por defecto"""
    try:
        apply_settings(load_settings(config, LOG_LEVEL=log_level.upper() if log_level else None))
    except (DeltaQuenchError, ValidationError) as exc:
        typer.echo(f"Error de configuración: {exc}", err=True)
        raise typer.Exit(code=2)

    logging.basicConfig(
        level=settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logger.debug(f"{settings.PROJECT_NAME} {settings.VERSION}, OUTPUT_DIR={settings.OUTPUT_DIR}")

    if show_config:
        typer.echo(json.dumps(settings.model_dump(mode="json"), indent=2))
        raise typer.Exit()
    if ctx.invoked_subcommand is None:
        typer.echo(ctx.get_help())
        raise typer.Exit()


# Include commands
app.command("psi")(psi.cmd_psi)
app.command("survival")(survival.cmd_survival)
app.command("fit")(fit.cmd_fit)
app.command("oracle")(oracle.cmd_oracle)
app.command("figures")(figures.cmd_figures)
app.command("verify")(verify.cmd_verify)
app.command("replay")(replay.cmd_replay)


if __name__ == "__main__":
    app()
