"""Benchmark suites.

Every row carries provenance: instance, config hash, seed, wall-clock, and
the published best result for the instance where one exists. Dataset-backed
suites (gset, citation) skip missing files with a warning so the package
works offline; the regular, queen, and toy suites generate their instances
locally.
"""

import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .graph import generate_regular, load_graph, queen_graph
from .projection import approximation_ratio
from .run import (RunConfig, chaotic_from_config, config_hash,
                  encoding_from_config, optimizer_from_config)
from .toy import (ToyConfig, bifurcation_sweep, lyapunov_max, toy_train,
                  write_toy_csv)
from .training import train

log = logging.getLogger(__name__)

# name -> (nodes, edges, published best cut)
GSET_REFERENCE = {
    "G14": (800, 4694, 3064),
    "G15": (800, 4661, 3050),
    "G22": (2000, 19990, 13359),
    "G49": (3000, 6000, 6000),
    "G50": (3000, 5880, 5880),
}

# name -> (rows, cols, colors, published best conflict count)
QUEEN_REFERENCE = {
    "queen5-5": (5, 5, 5, 0),
    "queen6-6": (6, 6, 7, 0),
    "queen7-7": (7, 7, 7, 0),
    "queen8-8": (8, 8, 9, 0),
    "queen9-9": (9, 9, 10, 0),
    "queen8-12": (8, 12, 12, 0),
    "queen11-11": (11, 11, 11, 13),
    "queen13-13": (13, 13, 13, 15),
}

# name -> (nodes, edges, colors, published best conflict count)
CITATION_REFERENCE = {
    "cora": (2708, 5429, 5, 0),
    "citeseer": (3327, 4732, 6, 0),
    "pubmed": (19717, 44338, 8, 2),
}

BENCH_COLUMNS = ("suite", "instance", "n_nodes", "n_edges", "method",
                 "config_hash", "seed", "objective", "violations",
                 "reference", "ratio", "epochs_run", "stop_reason",
                 "seconds", "epoch_seconds")


@dataclass
class BenchRow:
    suite: str
    instance: str
    n_nodes: int
    n_edges: int
    method: str
    config_hash: str
    seed: int
    objective: object
    violations: object
    reference: object
    ratio: object
    epochs_run: int
    stop_reason: str
    seconds: float
    epoch_seconds: float


def write_bench_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for r in rows:
            writer.writerow([getattr(r, c) if getattr(r, c) is not None else ""
                             for c in BENCH_COLUMNS])


def _run_one(suite, instance, g, cfg, seed, reference=None, degree=None):
    enc = encoding_from_config(cfg)
    result = train(g, enc, arch=cfg.arch, optimizer=optimizer_from_config(cfg),
                   chaotic=chaotic_from_config(cfg), epochs=cfg.epochs,
                   seed=seed, dropout=cfg.dropout, eval_every=cfg.eval_every,
                   patience=cfg.patience, min_improve=cfg.min_improve)
    rep = result.best_report
    ratio = None
    if rep is not None:
        if enc.kind == "mc" and degree is not None:
            ratio = approximation_ratio(rep.objective, degree, g.n_nodes)
        elif enc.kind == "mc" and reference:
            ratio = rep.objective / reference
    method = "cgbp" if any(v > 0 for v in
                           (float(x) for x in cfg.z.split(","))) else "bp"
    return BenchRow(
        suite=suite, instance=instance, n_nodes=g.n_nodes, n_edges=g.n_edges,
        method=method, config_hash=config_hash(cfg), seed=seed,
        objective=None if rep is None else rep.objective,
        violations=None if rep is None else rep.violations,
        reference=reference, ratio=None if ratio is None else round(ratio, 6),
        epochs_run=result.epochs_run, stop_reason=result.stop_reason,
        seconds=round(result.seconds, 3),
        epoch_seconds=result.epoch_seconds), result


DEFAULT_SCALING_EPOCHS = {100: 10000, 1000: 10000, 10000: 1500}


def run_regular_scaling(sizes=(100, 1000, 10000), d=3, seeds=(0, 1, 2),
                        epochs=None, out=None, progress=None):
    """BP vs CGBP on random d-regular max-cut across sizes.

    Returns ``(rows, slope)`` where the slope is the least-squares log-log
    fit of the CGBP mean epoch time against n. Budgets can be capped per
    size via ``epochs`` (dict n -> epochs); ratios use the d-regular cut
    bound.
    """
    budgets = dict(DEFAULT_SCALING_EPOCHS)
    if epochs:
        budgets.update(epochs)
    base = RunConfig(problem="mc", opt="adam", eval_every=1)
    rows = []
    epoch_times = []
    for n in sizes:
        g = generate_regular(n, d, seed=0)
        budget = budgets.get(n, 10000)
        per_method_times = []
        for z in ("20,3,1", "0,0,0"):
            cfg = replace(base, regular=f"{n},{d},0", z=z, epochs=budget)
            for seed in seeds:
                row, result = _run_one("regular_scaling", f"regular({n},{d})",
                                       g, cfg, seed, degree=d)
                rows.append(row)
                if z != "0,0,0":
                    per_method_times.append(result.epoch_seconds)
                if progress is not None:
                    progress(row)
        epoch_times.append(float(np.mean(per_method_times)))
    slope = float(np.polyfit(np.log10(np.asarray(sizes, dtype=float)),
                             np.log10(np.asarray(epoch_times)), 1)[0])
    if out:
        write_bench_csv(Path(out) / "regular_scaling.csv", rows)
    return rows, slope


def run_gset(data_dir, names=("G14", "G15", "G22", "G49", "G50"),
             seeds=(0,), epochs=20000, arch="gcn", opt="adam", lr=0.0,
             z="20,3,1", out=None, progress=None):
    """Max-cut on the named instances read from ``data_dir``.

    Instances are plain files named like the instance (header ``n m``, then
    ``u v w`` lines, 1-based). Missing files are skipped with a warning.
    """
    data_dir = Path(data_dir)
    rows = []
    for name in names:
        path = data_dir / name
        if not path.exists():
            log.warning("%s: file not found, skipping (download the instance "
                        "into %s to enable this row)", name, data_dir)
            continue
        g = load_graph(path, allow_weights=True)
        expected = GSET_REFERENCE.get(name)
        reference = None
        if expected:
            if (g.n_nodes, g.n_edges) != expected[:2]:
                log.warning("%s: expected %d nodes / %d edges, file has %d / %d",
                            name, expected[0], expected[1], g.n_nodes, g.n_edges)
            reference = expected[2]
        cfg = RunConfig(graph=str(path), problem="mc", arch=arch, opt=opt,
                        lr=lr, z=z, epochs=epochs, allow_weights=True)
        for seed in seeds:
            row, _ = _run_one("gset", name, g, cfg, seed, reference=reference)
            rows.append(row)
            if progress is not None:
                progress(row)
    if out:
        write_bench_csv(Path(out) / "gset.csv", rows)
    return rows


DEFAULT_QUEEN_BOARDS = ("queen5-5", "queen6-6", "queen7-7")


def run_queen(boards=DEFAULT_QUEEN_BOARDS, seeds=(0,), epochs=100000,
              arch="sage", opt="adam", lr=0.0, z="20,3,1", out=None,
              progress=None):
    """Coloring on locally generated queen boards with the standard color
    budgets."""
    rows = []
    for name in boards:
        if name not in QUEEN_REFERENCE:
            raise KeyError(f"unknown board {name!r}; known: {sorted(QUEEN_REFERENCE)}")
        r, c, colors, reference = QUEEN_REFERENCE[name]
        g = queen_graph(r, c)
        cfg = RunConfig(queen=f"{r}x{c}", problem="gc", colors=colors,
                        arch=arch, opt=opt, lr=lr, z=z, epochs=epochs)
        for seed in seeds:
            row, _ = _run_one("queen", name, g, cfg, seed, reference=reference)
            rows.append(row)
            if progress is not None:
                progress(row)
    if out:
        write_bench_csv(Path(out) / "queen.csv", rows)
    return rows


def run_citation(data_dir, names=("cora", "citeseer", "pubmed"), seeds=(0,),
                 epochs=100000, arch="sage", opt="adam", lr=0.0, z="20,3,1",
                 eval_every=1, out=None, progress=None):
    """Coloring on citation graphs read from ``data_dir``.

    Looks for ``<name>.col`` (DIMACS) and then ``<name>.txt`` (edge list with
    an ``n m`` header); missing instances are skipped with a warning.
    """
    data_dir = Path(data_dir)
    rows = []
    for name in names:
        path = None
        for candidate in (data_dir / f"{name}.col", data_dir / f"{name}.txt"):
            if candidate.exists():
                path = candidate
                break
        if path is None:
            log.warning("%s: no %s.col or %s.txt under %s, skipping",
                        name, name, name, data_dir)
            continue
        g = load_graph(path)
        expected = CITATION_REFERENCE.get(name)
        reference = None
        colors = 0
        if expected:
            if (g.n_nodes, g.n_edges) != expected[:2]:
                log.warning("%s: expected %d nodes / %d edges, file has %d / %d",
                            name, expected[0], expected[1], g.n_nodes, g.n_edges)
            colors, reference = expected[2], expected[3]
        cfg = RunConfig(graph=str(path), problem="gc", colors=colors,
                        arch=arch, opt=opt, lr=lr, z=z, epochs=epochs,
                        eval_every=eval_every)
        for seed in seeds:
            row, _ = _run_one("citation", name, g, cfg, seed, reference=reference)
            rows.append(row)
            if progress is not None:
                progress(row)
    if out:
        write_bench_csv(Path(out) / "citation.csv", rows)
    return rows


def run_toy(out, epochs=5000, seed=0):
    """Write the three toy trajectories, a frozen-z bifurcation scan, and a
    small table of Lyapunov estimates."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for mode, z0 in (("bp", 0.0), ("cgbp-1", 10.0), ("cgbp-r", 10.0)):
        cfg = ToyConfig(mode=mode, z0=z0, epochs=epochs, seed=seed)
        write_toy_csv(out / f"toy_{mode}.csv", toy_train(cfg))
    zs = np.linspace(10.0, 0.0, 101)
    sweep = bifurcation_sweep(zs)
    with open(out / "toy_bifurcation.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z", "spread"])
        for z, spread in sweep:
            writer.writerow([repr(float(z)), repr(float(spread))])
    bp_end = toy_train(ToyConfig(mode="bp", z0=0.0, epochs=epochs, seed=seed))
    estimates = {
        "lyapunov_z10": lyapunov_max(10.0),
        "lyapunov_z15": lyapunov_max(15.0),
        "lyapunov_z0_at_minimum": lyapunov_max(
            0.0, state=(bp_end.final_w, bp_end.final_b)),
    }
    with open(out / "toy_lyapunov.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "value"])
        for key, value in estimates.items():
            writer.writerow([key, repr(float(value))])
    return estimates
