import logging
from typing import Optional

import typer

from fss_tools.commands import commands_registry, log
from fss_tools.commands.utils import EXIT_SPEC, Settings, fail

app = typer.Typer()

for name, command in commands_registry.items():
    app.command(name)(command)


def version_callback(value: bool) -> None:
    if value:
        from pkg_resources import get_distribution

        typer.echo(get_distribution("birkhoff-fss"))
        raise typer.Exit()


@app.callback(no_args_is_help=True)
def main(
    ctx: typer.Context,
    debug: bool = typer.Option(False, "-d", "--debug", help="Debug output"),
    workers: int = typer.Option(1, "-w", "--workers", help="Number of worker threads for branches and sweep points"),
    version: Optional[bool] = typer.Option(
        None, "--version", callback=version_callback, is_eager=True, help="Show version and exit"
    ),
) -> None:
    """
    Tool for computing and checking Birkhoff-type fundamental systems of solutions
    """
    if debug:
        log.setLevel(logging.DEBUG)
        log.debug("Debug output enabled")
    if workers < 1:
        fail(f"worker count must be positive, got {workers}", EXIT_SPEC)
    ctx.obj = Settings(workers=workers)


def run():
    app()


if __name__ == "__main__":
    app()
