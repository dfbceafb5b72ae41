from pathlib import Path

import click

from core.errors import LabError
from experiments import SCENARIOS
from runner.acceptance import AcceptanceSuite
from runner.config import parse_config
from runner.pipeline import LabPipeline, setup_logging


@click.group()
def cli():
    """Uncertainty-relation lab CLI"""
    pass


@cli.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True, dir_okay=False),
              help='TOML or JSON run configuration')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), default=None, help='Output directory')
@click.option('--jobs', type=click.IntRange(min=1), default=None, help='Concurrent sweep points')
@click.option('--seed', type=int, default=None, help='Seed for randomized suites')
def run(config_path, out_dir, jobs, seed):
    """Run a scenario or a parameter sweep"""
    try:
        cfg = parse_config(Path(config_path).read_text(encoding="utf-8"))
        if seed is not None:
            cfg = cfg.model_copy(update={'seed': seed})
        if jobs is not None:
            cfg = cfg.model_copy(update={'jobs': jobs})
        written = LabPipeline(output_dir=out_dir).run(cfg)
    except LabError as e:
        raise click.ClickException(str(e))
    for kind, path in written.items():
        click.echo(f"{kind}: {path}")


@cli.command(name='list')
def list_scenarios():
    """List registered scenarios"""
    for name, experiment in SCENARIOS.items():
        click.echo(f"{name:<18}{experiment.description}")


@cli.command()
@click.option('--jobs', type=click.IntRange(min=1), default=None, help='Concurrent sweep points')
@click.pass_context
def check(ctx, jobs):
    """Run the built-in acceptance suite"""
    setup_logging(log_to_file=False)
    results = AcceptanceSuite(jobs=jobs).run_all()
    for result in results:
        status = "PASS" if result['passed'] else "FAIL"
        click.echo(f"[{status}] {result['criterion']}. {result['name']} ({result['seconds']:.2f}s)")
        for failure in result['failures']:
            click.echo(f"       {failure}")
    failed = sum(not result['passed'] for result in results)
    click.echo(f"{len(results) - failed}/{len(results)} criteria passed")
    if failed:
        ctx.exit(1)


if __name__ == '__main__':
    cli()
