"""Command-line interface.

``cgbp solve`` trains on one instance, ``cgbp sweep`` random-searches
hyperparameters, ``cgbp bench`` runs the benchmark suites, ``cgbp toy`` runs
the single-neuron dynamics, and ``cgbp gen`` writes generated instances to
disk.
"""

import sys
from dataclasses import fields, replace
from pathlib import Path

import click

from . import __version__
from .bench import (DEFAULT_QUEEN_BOARDS, QUEEN_REFERENCE, run_citation,
                    run_gset, run_queen, run_regular_scaling, run_toy,
                    write_bench_csv)
from .errors import (GenerationError, NumericError, ParameterError,
                     ParseError, SizeRefusalError)
from .graph import generate_regular, queen_graph, save_dimacs_col, save_gset
from .kernels import BACKEND
from .run import RunConfig, config_to_text, load_config, run_solve
from .sweep import SweepSpec, run_sweep, write_leaderboard
from .toy import ToyConfig, toy_train, write_toy_csv

_ERRORS = (ParameterError, ParseError, GenerationError, NumericError,
           SizeRefusalError, OSError, KeyError)


def _run(fn):
    try:
        return fn()
    except _ERRORS as exc:
        raise click.ClickException(str(exc))


def _config_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(), default=None,
                     help="key=value config file; flags override it."),
        click.option("--graph", default=None, type=click.Path(),
                     help="instance file (.col/.dimacs or edge-list format)"),
        click.option("--regular", default=None, help="generate: n,d,seed"),
        click.option("--queen", default=None, help="generate: RxC board"),
        click.option("--problem", default=None,
                     type=click.Choice(["mis", "mc", "gc"])),
        click.option("--penalty", default=None, type=float,
                     help="independent-set edge penalty"),
        click.option("--colors", default=None, type=int, help="gc color count"),
        click.option("--arch", default=None, type=click.Choice(["gcn", "sage"])),
        click.option("--opt", default=None,
                     type=click.Choice(["sgd", "sgdm", "adam"])),
        click.option("--lr", default=None, type=float,
                     help="learning rate (0 = per-optimizer default)"),
        click.option("--z", default=None,
                     help="initial chaotic strengths: embedding,layer1,layer2"),
        click.option("--beta", default=None, type=float, help="z decay per epoch"),
        click.option("--i0", default=None, type=float, help="chaotic set point"),
        click.option("--epochs", default=None, type=int),
        click.option("--seeds", default=None, help="e.g. 0,1,2 or 0-19"),
        click.option("--dropout", default=None, type=float),
        click.option("--eval-every", default=None, type=int),
        click.option("--patience", default=None, type=int),
        click.option("--repair", is_flag=True, default=False,
                     help="greedy independent-set repair of the final answer"),
        click.option("--fixed-node", default=None, type=int,
                     help="pin the chaotic reference node"),
        click.option("--allow-weights", is_flag=True, default=False,
                     help="accept weighted edge files, mapping weights to 1"),
        click.option("--out", default=None, type=click.Path(),
                     help="directory for trajectories/solutions/manifest"),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(config_path, **kwargs):
    cfg = RunConfig()
    if config_path:
        cfg = _run(lambda: load_config(config_path, base=cfg))
    names = {f.name for f in fields(RunConfig)}
    updates = {}
    for key, value in kwargs.items():
        if key not in names:
            continue
        if value is None or value is False:
            continue
        updates[key] = value
    return replace(cfg, **updates)


@click.group()
@click.version_option(__version__)
def main():
    """Chaotic graph backpropagation for combinatorial optimization."""


@main.command()
@_config_options
def solve(config_path, **kwargs):
    """Train on one instance and report the best assignment per seed."""
    cfg = _build_config(config_path, **kwargs)

    def show(row):
        rep = row.report
        if rep is None:
            click.echo(f"seed {row.seed}: no evaluation ({row.stop_reason})")
            return
        extra = f" ratio={row.ratio:.4f}" if row.ratio is not None else ""
        click.echo(
            f"seed {row.seed}: objective={rep.objective} "
            f"violations={rep.violations} hamiltonian={rep.hamiltonian:g}"
            f"{extra} epochs={row.epochs_run} [{row.stop_reason}] "
            f"{row.seconds:.1f}s")

    summary = _run(lambda: run_solve(cfg, progress=show))
    if summary.best is None:
        raise click.ClickException("no seed produced an evaluation")
    best = summary.best
    click.echo(f"best: seed {best.seed} objective={best.report.objective} "
               f"violations={best.report.violations}")
    if cfg.out:
        click.echo(f"artifacts written to {cfg.out}")


@main.command()
@_config_options
@click.option("--budget", default=50, type=int, show_default=True,
              help="number of candidate configs (the base config included)")
@click.option("--sweep-seed", default=0, type=int, show_default=True)
@click.option("--workers", default=1, type=int, show_default=True,
              help="parallel candidate evaluations")
@click.option("--z-grid", default=None,
              help="semicolon-separated z triples, e.g. '20,3,1;10,1,0'")
@click.option("--beta-grid", default=None,
              help="comma-separated beta choices, e.g. '0.999,0.995'")
def sweep(config_path, budget, sweep_seed, workers, z_grid, beta_grid,
          **kwargs):
    """Random search over dropout/learning rate (and optional z/beta grids)."""
    cfg = _build_config(config_path, **kwargs)
    spec_kwargs = dict(budget=budget, sweep_seed=sweep_seed, workers=workers)
    if z_grid:
        spec_kwargs["z_choices"] = tuple(part.strip() for part in
                                         z_grid.split(";") if part.strip())
    if beta_grid:
        spec_kwargs["beta_choices"] = tuple(float(b) for b in
                                            beta_grid.split(",") if b.strip())
    spec = _run(lambda: SweepSpec(**spec_kwargs))

    def show(row):
        rep = row.report
        obj = "-" if rep is None else rep.objective
        click.echo(f"candidate {row.index}: objective={obj} "
                   f"dropout={row.config.dropout:.3f} lr={row.config.lr:g} "
                   f"z={row.config.z} ({row.seconds:.1f}s)")

    ranked = _run(lambda: run_sweep(cfg, spec, progress=show))
    winner = ranked[0]
    rep = winner.report
    click.echo(f"winner: candidate {winner.index} "
               f"objective={'-' if rep is None else rep.objective}")
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_leaderboard(outdir / "leaderboard.csv", ranked)
        (outdir / "best_config.txt").write_text(config_to_text(winner.config))
        click.echo(f"leaderboard written to {outdir}")


@main.command()
@click.option("--suite", required=True,
              type=click.Choice(["regular_scaling", "gset", "queen",
                                 "citation", "toy"]))
@click.option("--data", default="data", type=click.Path(),
              help="directory holding downloaded instances (gset/citation)")
@click.option("--out", default="bench_out", type=click.Path(), show_default=True)
@click.option("--seeds", default="0", show_default=True)
@click.option("--epochs", default=None, type=int,
              help="override the suite's per-run budget")
@click.option("--arch", default=None, type=click.Choice(["gcn", "sage"]))
@click.option("--opt", default="adam", show_default=True,
              type=click.Choice(["sgd", "sgdm", "adam"]))
@click.option("--z", default="20,3,1", show_default=True)
@click.option("--extended", is_flag=True, default=False,
              help="run the full instance lists (slow)")
def bench(suite, data, out, seeds, epochs, arch, opt, z, extended):
    """Run one benchmark suite and write its CSV report."""
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    seed_tuple = tuple(int(s) for s in seeds.split(",") if s.strip())

    def show(row):
        ref = "" if row.reference is None else f" ref={row.reference}"
        ratio = "" if row.ratio is None else f" ratio={row.ratio}"
        click.echo(f"[{row.suite}] {row.instance} seed={row.seed} "
                   f"method={row.method} objective={row.objective}"
                   f"{ref}{ratio} epochs={row.epochs_run} {row.seconds}s")

    if suite == "regular_scaling":
        budgets = {n: epochs for n in (100, 1000, 10000)} if epochs else None
        _, slope = _run(lambda: run_regular_scaling(
            seeds=seed_tuple, epochs=budgets, out=outdir, progress=show))
        click.echo(f"log-log epoch-time slope: {slope:.3f}")
    elif suite == "gset":
        kwargs = dict(seeds=seed_tuple, arch=arch or "gcn", opt=opt, z=z,
                      out=outdir, progress=show)
        if epochs:
            kwargs["epochs"] = epochs
        if not extended:
            kwargs["names"] = ("G14",)
        rows = _run(lambda: run_gset(data, **kwargs))
        if not rows:
            click.echo("no instances found; see the data directory hint above")
    elif suite == "queen":
        kwargs = dict(seeds=seed_tuple, arch=arch or "sage", opt=opt, z=z,
                      out=outdir, progress=show)
        if epochs:
            kwargs["epochs"] = epochs
        if extended:
            kwargs["boards"] = tuple(QUEEN_REFERENCE)
        _run(lambda: run_queen(**kwargs))
    elif suite == "citation":
        kwargs = dict(seeds=seed_tuple, arch=arch or "sage", opt=opt, z=z,
                      out=outdir, progress=show)
        if epochs:
            kwargs["epochs"] = epochs
        rows = _run(lambda: run_citation(data, **kwargs))
        if not rows:
            click.echo("no instances found; see the data directory hint above")
    else:
        estimates = _run(lambda: run_toy(outdir))
        for key, value in estimates.items():
            click.echo(f"{key}: {value:+.6f}")
    click.echo(f"reports written to {outdir}")


@main.command()
@click.option("--mode", default="cgbp-r", show_default=True,
              type=click.Choice(["bp", "cgbp-1", "cgbp-r"]))
@click.option("--z0", default=None, type=float,
              help="initial chaotic strength (default 10, or 0 for bp)")
@click.option("--beta", default=0.999, type=float, show_default=True)
@click.option("--eta", default=0.1, type=float, show_default=True)
@click.option("--i0", default=0.65, type=float, show_default=True)
@click.option("--epochs", default=5000, type=int, show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out", default=None, type=click.Path(),
              help="trajectory CSV path (default toy_<mode>.csv)")
def toy(mode, z0, beta, eta, i0, epochs, seed, out):
    """Run the single-neuron dynamics and write its trajectory CSV."""
    if z0 is None:
        z0 = 0.0 if mode == "bp" else 10.0
    cfg = _run(lambda: ToyConfig(mode=mode, z0=z0, beta=beta, eta=eta, i0=i0,
                                 epochs=epochs, seed=seed))
    traj = toy_train(cfg)
    path = out or f"toy_{mode}.csv"
    write_toy_csv(path, traj)
    click.echo(f"final loss {traj.loss[-1]:.6g}, trajectory in {path}")


@main.command()
@click.option("--regular", default=None, help="n,d,seed")
@click.option("--queen", default=None, help="RxC board")
@click.option("--format", "fmt", default="gset", show_default=True,
              type=click.Choice(["gset", "dimacs"]))
@click.option("--out", required=True, type=click.Path())
def gen(regular, queen, fmt, out):
    """Generate an instance and write it in either file format."""
    if bool(regular) == bool(queen):
        raise click.ClickException("pass exactly one of --regular / --queen")
    if regular:
        parts = regular.split(",")
        if len(parts) != 3:
            raise click.ClickException(f"--regular wants 'n,d,seed', got {regular!r}")
        n, d, seed = (int(p) for p in parts)
        g = _run(lambda: generate_regular(n, d, seed))
    else:
        rows, _, cols = queen.lower().partition("x")
        try:
            r = int(rows)
            c = int(cols) if cols else r
        except ValueError:
            raise click.ClickException(f"--queen wants 'RxC', got {queen!r}")
        g = _run(lambda: queen_graph(r, c))
    writer = save_gset if fmt == "gset" else save_dimacs_col
    _run(lambda: writer(g, out))
    click.echo(f"wrote {g.n_nodes} nodes / {g.n_edges} edges to {out}")


@main.command()
def info():
    """Print version and active kernel backend."""
    click.echo(f"cgbp {__version__}")
    click.echo(f"kernel backend: {BACKEND}")


if __name__ == "__main__":
    main(prog_name="cgbp")
