"""Shared helpers: finite-difference gradient checking and a plain
optimizer-only training loop used as the reduction reference."""

import numpy as np

from cgbp.hamiltonians import loss_and_grad, output_width
from cgbp.model import (init_model, make_aggregator, network_backward,
                        network_forward)
from cgbp.training import Optimizer

DROP_SEED = 123


def reference_plain_loop(optimizer, epochs, g, enc, seed, arch="gcn"):
    """Base-optimizer training with no chaotic machinery at all; returns a
    parameter snapshot after every epoch."""
    init_ss, drop_ss, node_ss = np.random.SeedSequence(seed).spawn(3)
    rng_drop = np.random.default_rng(drop_ss)
    model = init_model(g.n_nodes, arch, output_width(enc),
                       np.random.default_rng(init_ss))
    agg = make_aggregator(g, arch)
    opt = Optimizer(optimizer, model)
    snaps = []
    for _ in range(epochs):
        p, cache = network_forward(model, agg, "train", rng_drop)
        _, dp = loss_and_grad(enc, p, g)
        grads = network_backward(model, agg, cache, dp)
        opt.step(model, grads)
        snaps.append({name: arr.copy() for name, arr in model.trainable()})
    return snaps


def _loss_of(model, agg, enc, g, dropout):
    m = model.copy()
    rng = np.random.default_rng(DROP_SEED) if dropout > 0 else None
    p, _ = network_forward(m, agg, "train", rng)
    return loss_and_grad(enc, p, g)[0]


def network_gradient_error(g, enc, arch, seed, dims, dropout=0.0, eps=1e-5):
    """Worst relative error between backward and central finite differences.

    The error per parameter array is ||analytic - fd|| / (||analytic|| +
    ||fd||). Arrays where both norms fall below finite-difference resolution
    (1e-7) count as agreeing: the layer biases sit in front of batch norm,
    which removes constants exactly, so their true gradient is identically
    zero and the probe only measures cancellation noise there. The same
    dropout mask is replayed by reseeding, and the model is copied per
    evaluation so batch-norm running statistics cannot leak between probes.
    """
    width = enc.n_colors if enc.kind == "gc" else 1
    model = init_model(g.n_nodes, arch, width, np.random.default_rng(seed),
                       dims=dims, dropout=dropout)
    agg = make_aggregator(g, arch)

    work = model.copy()
    rng = np.random.default_rng(DROP_SEED) if dropout > 0 else None
    p, cache = network_forward(work, agg, "train", rng)
    _, dp = loss_and_grad(enc, p, g)
    grads = network_backward(work, agg, cache, dp)

    worst = 0.0
    for name, _ in model.trainable():
        analytic = grads[name]
        fd = np.zeros_like(analytic)
        for idx in np.ndindex(*analytic.shape):
            hi = model.copy()
            dict(hi.trainable())[name][idx] += eps
            lo = model.copy()
            dict(lo.trainable())[name][idx] -= eps
            fd[idx] = (_loss_of(hi, agg, enc, g, dropout)
                       - _loss_of(lo, agg, enc, g, dropout)) / (2 * eps)
        na, nf = np.linalg.norm(analytic), np.linalg.norm(fd)
        if max(na, nf) < 1e-7:
            continue
        worst = max(worst, np.linalg.norm(analytic - fd) / (na + nf))
    return worst
