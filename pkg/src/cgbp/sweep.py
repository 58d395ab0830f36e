"""Random hyperparameter search over one instance.

Samples dropout uniformly and the learning rate log-uniformly (plus optional
z and beta grids), evaluates each candidate with the configured seeds, and
ranks candidates by their best discrete objective. The unmodified base
configuration is always candidate 0, so the winner can never be worse than
the baseline it started from.
"""

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ParameterError
from .hamiltonians import discrete_objective, is_better
from .projection import greedy_repair_mis
from .run import (RunConfig, chaotic_from_config, config_hash,
                  encoding_from_config, graph_from_config,
                  optimizer_from_config, seed_list)
from .training import train

DROPOUT_RANGE = (0.0, 0.5)
LR_RANGE = (1e-6, 0.1)


@dataclass(frozen=True)
class SweepSpec:
    budget: int = 50
    sweep_seed: int = 0
    dropout_range: tuple = DROPOUT_RANGE
    lr_range: tuple = LR_RANGE
    z_choices: Optional[tuple] = None      # tuple of "a,b,c" strings
    beta_choices: Optional[tuple] = None
    workers: int = 1

    def __post_init__(self):
        if self.budget < 1:
            raise ParameterError(f"budget must be >= 1, got {self.budget}")
        lo, hi = self.lr_range
        if not 0 < lo <= hi:
            raise ParameterError(f"bad lr range {self.lr_range}")
        lo, hi = self.dropout_range
        if not 0 <= lo <= hi < 1:
            raise ParameterError(f"bad dropout range {self.dropout_range}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")


def sample_configs(base, spec):
    """Candidate list: the base config first, then ``budget - 1`` draws."""
    rng = np.random.default_rng(spec.sweep_seed)
    out = [base]
    for _ in range(spec.budget - 1):
        lo, hi = spec.dropout_range
        dropout = float(rng.uniform(lo, hi))
        lo, hi = spec.lr_range
        lr = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        changes = {"dropout": dropout, "lr": lr}
        if spec.z_choices:
            changes["z"] = str(spec.z_choices[int(rng.integers(len(spec.z_choices)))])
        if spec.beta_choices:
            changes["beta"] = float(spec.beta_choices[int(rng.integers(len(spec.beta_choices)))])
        out.append(replace(base, **changes))
    return out


@dataclass
class SweepRow:
    index: int
    config: RunConfig
    report: object
    seconds: float


def _evaluate(args):
    index, cfg, g, enc = args
    import time

    t0 = time.perf_counter()
    best = None
    best_values = None
    for seed in seed_list(cfg):
        result = train(g, enc, arch=cfg.arch,
                       optimizer=optimizer_from_config(cfg),
                       chaotic=chaotic_from_config(cfg), epochs=cfg.epochs,
                       seed=seed, dropout=cfg.dropout,
                       eval_every=cfg.eval_every, patience=cfg.patience,
                       min_improve=cfg.min_improve)
        rep = result.best_report
        if rep is not None and (best is None or is_better(rep, best)):
            best, best_values = rep, result.best_values
    if best is not None and cfg.repair and enc.kind == "mis":
        repaired = greedy_repair_mis(best_values, g)
        best = discrete_objective(enc, repaired, g)
    return index, best, time.perf_counter() - t0


def run_sweep(base, spec, progress=None):
    """Evaluate all candidates; returns rows sorted best-first (ties keep
    the earlier candidate). ``spec.workers`` > 1 runs candidates in a
    process pool."""
    g, _, _ = graph_from_config(base)
    enc = encoding_from_config(base)
    candidates = sample_configs(base, spec)
    jobs = [(i, cfg, g, enc) for i, cfg in enumerate(candidates)]
    rows = [None] * len(jobs)
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_evaluate, jobs))
    else:
        results = [_evaluate(job) for job in jobs]
    for index, report, seconds in results:
        rows[index] = SweepRow(index=index, config=candidates[index],
                               report=report, seconds=seconds)
        if progress is not None:
            progress(rows[index])

    def better(a, b):
        if a.report is None:
            return False
        if b.report is None:
            return True
        return is_better(a.report, b.report)

    ordered = list(rows)
    # stable insertion ranking under the strict comparator
    ranked = []
    for row in ordered:
        pos = len(ranked)
        while pos > 0 and better(row, ranked[pos - 1]):
            pos -= 1
        ranked.insert(pos, row)
    return ranked


def write_leaderboard(path, ranked):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "candidate", "config_hash", "objective",
                         "violations", "dropout", "lr", "z", "beta",
                         "seconds"])
        for rank, row in enumerate(ranked, start=1):
            rep = row.report
            writer.writerow([
                rank, row.index, config_hash(row.config),
                "" if rep is None else rep.objective,
                "" if rep is None else rep.violations,
                row.config.dropout, row.config.lr, row.config.z,
                row.config.beta, f"{row.seconds:.3f}"])
