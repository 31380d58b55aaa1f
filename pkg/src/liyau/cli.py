"""Command line entry points: verify / mc / bounds / kernel / sweep."""

from __future__ import annotations

import json
import sys

import click

from . import bounds as bounds_mod
from . import harness
from .geometry import manifold_from_dict
from .heatflow import exact_kernel


@click.group()
def main():
    """Gradient-inequality verification toolkit."""


def _load_config(path, seed, tol, out):
    config = harness.ExperimentConfig.from_json(path)
    if seed is not None:
        config.seed = seed
    if tol is not None:
        config.tol = tol
    if out is not None:
        config.out_dir = out
    return config


def _run_and_emit(config, fmt, mc_only=False, bounds_only=False):
    if mc_only:
        config.bounds = []
    if bounds_only:
        config.mc = []
    report = harness.run_experiment(config)
    if config.out_dir:
        for path in harness.emit_report(report, config.out_dir, fmt):
            click.echo(f"wrote {path}")
    n_fail = len(report.failures())
    worst = report.worst_margin()
    click.echo(f"rows: bounds={len(report.bound_rows)} mc={len(report.mc_rows)}"
               f" worst_margin={worst:.3e} failures={n_fail}")
    sys.exit(report.exit_code)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv")
@click.option("--tol", type=float, default=None)
def verify(config_path, seed, out, fmt, tol):
    """Run the full bound + MC suite of a config; exit 0 iff all rows pass."""
    _run_and_emit(_load_config(config_path, seed, tol, out), fmt)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv")
def mc(config_path, seed, out, fmt):
    """Run only the stochastic estimator rows of a config."""
    _run_and_emit(_load_config(config_path, seed, None, out), fmt, mc_only=True)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv")
@click.option("--tol", type=float, default=None)
def sweep(config_path, seed, out, fmt, tol):
    """Run the bound grid sweep and emit margin-vs-t plot data."""
    _run_and_emit(_load_config(config_path, seed, tol, out), fmt,
                  bounds_only=True)


@main.command("bounds")
@click.option("--id", "bound_id", required=True,
              type=click.Choice(bounds_mod.BOUND_IDS))
@click.option("--params", "params_json", required=True,
              help="JSON object, e.g. '{\"n\": 2, \"t\": 1, \"K\": 0, \"alpha\": 2}'")
def bounds_cmd(bound_id, params_json):
    """Evaluate one bound id into its normal form."""
    form = bounds_mod.eval_bound(bound_id, json.loads(params_json))
    click.echo(json.dumps(form.to_dict(), sort_keys=True))


@main.command()
@click.option("--family", required=True)
@click.option("--m", type=int, default=1)
@click.option("--t", type=float, required=True)
@click.option("--x", type=float, required=True)
@click.option("--y", type=float, default=0.0)
@click.option("--length", type=float, default=None)
def kernel(family, m, t, x, y, length):
    """Evaluate the exact kernel p_t(x, y) of a flat family."""
    doc = {"family": family, "m": m}
    if length is not None:
        doc["length"] = length
    M = manifold_from_dict(doc)
    click.echo(repr(exact_kernel(M, t, x, y)))


if __name__ == "__main__":
    main()
