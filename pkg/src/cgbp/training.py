"""Training loop: plain backprop plus the chaotic update.

Each epoch does a train-mode forward, computes the relaxed Hamiltonian loss
and its gradients, takes a base optimizer step (SGD, SGD+momentum, or Adam),
and then adds the chaotic increments for one reference node d:

    delta = z_l * (i0 - o_dj)

where o_dj is the sigmoid of node d's raw pre-activation at layer l. The
increment for output unit j is added to every incoming weight of that unit
and to its bias; the embedding increment touches row d only. The three
z values (embedding, layer 1, layer 2) decay by a factor beta once per epoch,
so the dynamics anneal from chaotic search into plain gradient descent. With
z = 0 the loop reduces exactly to the base optimizer.

The scalar chaotic loss whose gradient the increment follows is

    loss_C = -sum_l z_l sum_j [i0 ln o_dj + (1 - i0) ln(1 - o_dj)]

and is logged alongside the Hamiltonian loss. Training stops early when the
Hamiltonian loss has not improved by more than ``min_improve`` for
``patience`` consecutive epochs.
"""

import csv
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from .errors import NumericError, ParameterError
from .hamiltonians import (ObjectiveReport, discrete_objective, is_better,
                           loss_and_grad, output_width)
from .model import init_model, make_aggregator, network_backward, network_forward
from .projection import project_values

OPTIMIZERS = ("sgd", "sgdm", "adam")
DEFAULT_LR = {"sgd": 0.1, "sgdm": 0.05, "adam": 0.01}


@dataclass(frozen=True)
class ChaoticConfig:
    """Chaotic-term settings.

    ``z0`` holds the initial strengths for (embedding, layer 1, layer 2).
    ``node`` pins the reference node; None redraws it uniformly every epoch.
    """

    z0: tuple = (20.0, 3.0, 1.0)
    beta: float = 0.999
    i0: float = 0.65
    node: Optional[int] = None

    def __post_init__(self):
        if len(self.z0) != 3:
            raise ParameterError(f"z0 needs one value per level, got {self.z0}")
        if any(z < 0 for z in self.z0):
            raise ParameterError(f"z0 must be non-negative, got {self.z0}")
        if not 0.0 < self.beta <= 1.0:
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if not 0.0 < self.i0 < 1.0:
            raise ParameterError(f"i0 must lie in (0, 1), got {self.i0}")


BP = ChaoticConfig(z0=(0.0, 0.0, 0.0))


@dataclass(frozen=True)
class OptimizerConfig:
    kind: str = "adam"
    lr: Optional[float] = None
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.kind not in OPTIMIZERS:
            raise ParameterError(f"kind must be one of {OPTIMIZERS}, got {self.kind!r}")
        if self.lr is not None and not self.lr > 0:
            raise ParameterError(f"lr must be positive, got {self.lr}")

    @property
    def rate(self):
        return self.lr if self.lr is not None else DEFAULT_LR[self.kind]


class Optimizer:
    """In-place parameter updates; accumulators keyed by parameter name."""

    def __init__(self, cfg, model):
        self.cfg = cfg
        self.t = 0
        self.m = {name: np.zeros_like(arr) for name, arr in model.trainable()}
        if cfg.kind == "adam":
            self.v = {name: np.zeros_like(arr) for name, arr in model.trainable()}

    def step(self, model, grads):
        cfg = self.cfg
        lr = cfg.rate
        self.t += 1
        for name, param in model.trainable():
            g = grads[name]
            if cfg.kind == "sgd":
                param -= lr * g
            elif cfg.kind == "sgdm":
                buf = self.m[name]
                buf *= cfg.momentum
                buf += g
                param -= lr * buf
            else:
                m, v = self.m[name], self.v[name]
                m *= cfg.beta1
                m += (1 - cfg.beta1) * g
                v *= cfg.beta2
                v += (1 - cfg.beta2) * g * g
                mhat = m / (1 - cfg.beta1 ** self.t)
                vhat = v / (1 - cfg.beta2 ** self.t)
                param -= lr * mhat / (np.sqrt(vhat) + cfg.eps)


def _entropy_term(x, i0):
    # i0*ln(sigmoid(x)) + (1-i0)*ln(1-sigmoid(x)), computed from the raw value
    return float(-(i0 * np.logaddexp(0.0, -x) + (1 - i0) * np.logaddexp(0.0, x)).sum())


def chaotic_loss(model, cache, z, i0, d):
    """Value of the chaotic loss at node d for strengths ``z``."""
    raw = (model.embedding[d], cache.pre1[d], cache.pre2[d])
    return -sum(zl * _entropy_term(x, i0) for zl, x in zip(z, raw))


@dataclass(frozen=True)
class ChaoticDeltas:
    emb_row: np.ndarray
    col1: np.ndarray
    col2: np.ndarray


def chaotic_deltas(model, cache, z, i0, d):
    """Per-level increments z_l * (i0 - o_d) from one train-mode cache."""
    return ChaoticDeltas(
        emb_row=z[0] * (i0 - expit(model.embedding[d])),
        col1=z[1] * (i0 - expit(cache.pre1[d])),
        col2=z[2] * (i0 - expit(cache.pre2[d])))


def apply_chaotic(model, deltas, d):
    """Add the increments: embedding row d; every incoming weight and the
    bias of each unit in the two layers (column-constant)."""
    model.embedding[d] += deltas.emb_row
    model.w1 += deltas.col1
    model.b1 += deltas.col1
    model.w2 += deltas.col2
    model.b2 += deltas.col2


def select_node(rng, n, fixed=None):
    if fixed is not None:
        if not 0 <= fixed < n:
            raise ParameterError(f"node {fixed} out of range for {n} nodes")
        return fixed
    return int(rng.integers(n))


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss_h: float
    loss_c: float
    z: tuple
    node: int
    report: Optional[ObjectiveReport]


@dataclass
class TrainResult:
    records: list
    best_values: Optional[np.ndarray]
    best_report: Optional[ObjectiveReport]
    best_epoch: int
    best_loss: float
    best_loss_epoch: int
    stop_reason: str
    epochs_run: int
    seconds: float
    model: object

    @property
    def epoch_seconds(self):
        return self.seconds / max(1, self.epochs_run)


def train(g, enc, arch="gcn", optimizer=None, chaotic=None, epochs=10000,
          seed=0, dropout=0.0, eval_every=1, patience=1000, min_improve=1e-3,
          dims=None, epoch_callback=None):
    """Train one model on one instance; returns a :class:`TrainResult`.

    The seed pins everything: three independent streams are spawned from it
    for initialization, dropout, and the per-epoch node draw, so runs that
    differ only in z consume identical random streams.

    Every ``eval_every``-th epoch (and the last one) an eval-mode forward is
    projected to a discrete assignment and scored; the best assignment seen
    is kept. ``epoch_callback(epoch, model)``, when given, runs after each
    epoch's update.
    """
    if epochs < 1:
        raise ParameterError(f"epochs must be >= 1, got {epochs}")
    if eval_every < 1:
        raise ParameterError(f"eval_every must be >= 1, got {eval_every}")
    if patience < 1:
        raise ParameterError(f"patience must be >= 1, got {patience}")
    optimizer = optimizer if optimizer is not None else OptimizerConfig()
    chaotic = chaotic if chaotic is not None else ChaoticConfig()
    if chaotic.node is not None and not 0 <= chaotic.node < g.n_nodes:
        raise ParameterError(f"fixed node {chaotic.node} out of range")

    init_ss, drop_ss, node_ss = np.random.SeedSequence(seed).spawn(3)
    rng_drop = np.random.default_rng(drop_ss)
    rng_node = np.random.default_rng(node_ss)
    width = output_width(enc)
    model = init_model(g.n_nodes, arch, width, np.random.default_rng(init_ss),
                       dims=dims, dropout=dropout)
    agg = make_aggregator(g, arch)
    opt = Optimizer(optimizer, model)

    z = np.asarray(chaotic.z0, dtype=np.float64).copy()
    chaos_on = bool(z.any())
    records = []
    best_values = None
    best_report = None
    best_epoch = -1
    best_loss = np.inf
    best_loss_epoch = -1
    ref_loss = np.inf
    stall = 0
    stop_reason = "budget"
    epochs_run = 0

    t0 = time.perf_counter()
    for epoch in range(epochs):
        try:
            p_train, cache = network_forward(model, agg, "train", rng_drop)
            loss_h, dp = loss_and_grad(enc, p_train, g)
        except NumericError:
            stop_reason = "numeric_failure"
            break
        if not np.isfinite(loss_h):
            stop_reason = "numeric_failure"
            break
        epochs_run = epoch + 1

        d = select_node(rng_node, g.n_nodes, chaotic.node)
        loss_c = chaotic_loss(model, cache, z, chaotic.i0, d) if chaos_on else 0.0
        grads = network_backward(model, agg, cache, dp)
        opt.step(model, grads)
        if chaos_on:
            apply_chaotic(model, chaotic_deltas(model, cache, z, chaotic.i0, d), d)

        report = None
        if epoch % eval_every == 0 or epoch == epochs - 1:
            p_eval, _ = network_forward(model, agg, "eval")
            values = project_values(enc, p_eval)
            report = discrete_objective(enc, values, g)
            if best_report is None or is_better(report, best_report):
                best_values = values
                best_report = report
                best_epoch = epoch

        records.append(EpochRecord(epoch=epoch, loss_h=loss_h, loss_c=loss_c,
                                   z=tuple(z), node=d, report=report))
        if epoch_callback is not None:
            epoch_callback(epoch, model)

        z *= chaotic.beta
        if loss_h < best_loss:
            best_loss = loss_h
            best_loss_epoch = epoch
        if loss_h < ref_loss - min_improve:
            ref_loss = loss_h
            stall = 0
        else:
            stall += 1
            if stall >= patience:
                stop_reason = "early_stop"
                break
    seconds = time.perf_counter() - t0

    return TrainResult(records=records, best_values=best_values,
                       best_report=best_report, best_epoch=best_epoch,
                       best_loss=best_loss, best_loss_epoch=best_loss_epoch,
                       stop_reason=stop_reason, epochs_run=epochs_run,
                       seconds=seconds, model=model)


TRAJECTORY_COLUMNS = ("epoch", "loss_h", "loss_c", "z_emb", "z_1", "z_2",
                      "node", "objective")


def write_trajectory(path, records):
    """Per-epoch CSV; the objective column is empty on epochs that skipped
    the discrete evaluation."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRAJECTORY_COLUMNS)
        for r in records:
            obj = "" if r.report is None else r.report.objective
            writer.writerow([r.epoch, repr(float(r.loss_h)), repr(float(r.loss_c)),
                             repr(float(r.z[0])), repr(float(r.z[1])),
                             repr(float(r.z[2])), r.node, obj])


def read_trajectory(path):
    """Read the CSV back as a dict of float64 arrays (NaN for blanks)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ParameterError(f"{path}: unexpected trajectory header {header}")
        cols = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                cols[name].append(float(cell) if cell != "" else np.nan)
    return {name: np.asarray(vals) for name, vals in cols.items()}
