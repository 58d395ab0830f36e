"""Single-neuron dynamics: the smallest system exhibiting the chaotic update.

One sigmoid unit o = sigmoid(w x + b) is fit to a tiny regression set with
mean squared error. The update map in (w, b) is

    w' = w - eta * dMSE/dw + z (i0 - o_d)
    b' = b - eta * dMSE/db + z (i0 - o_d)

with the same kick on both parameters; d is the reference sample (fixed for
mode ``cgbp-1``, redrawn uniformly each epoch for ``cgbp-r``, and the kick is
absent for ``bp``). With z frozen this is a two-parameter discrete map whose
largest Lyapunov exponent can be estimated; with z annealed (z <- beta z per
epoch) the dynamics cross from chaotic wandering into plain gradient descent.
"""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ParameterError

X_DEFAULT = (0.1, 0.9, 0.7)
T_DEFAULT = (0.0, 1.0, 1.0)
MODES = ("bp", "cgbp-1", "cgbp-r")


@dataclass(frozen=True)
class ToyConfig:
    mode: str = "cgbp-r"
    inputs: tuple = X_DEFAULT
    targets: tuple = T_DEFAULT
    eta: float = 0.1
    z0: float = 10.0
    beta: float = 0.999
    i0: float = 0.65
    epochs: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if len(self.inputs) != len(self.targets) or not self.inputs:
            raise ParameterError("inputs and targets must be equal-length and non-empty")
        if (self.mode == "bp") != (self.z0 == 0.0):
            raise ParameterError("mode 'bp' requires z0 = 0 and vice versa")
        if self.z0 < 0:
            raise ParameterError(f"z0 must be non-negative, got {self.z0}")
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta}")
        if not 0.0 < self.beta <= 1.0:
            raise ParameterError(f"beta must lie in (0, 1], got {self.beta}")
        if not 0.0 < self.i0 < 1.0:
            raise ParameterError(f"i0 must lie in (0, 1), got {self.i0}")
        if self.epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")


def _mse_grads(w, b, x, t):
    o = expit(w * x + b)
    err = o - t
    common = (2.0 / x.size) * err * o * (1.0 - o)
    return o, float(err @ err) / x.size, float(common @ x), float(common.sum())


def toy_step(w, b, z, d, x, t, eta, i0):
    """One update of the map; returns (w', b', o, mse, loss_c)."""
    o, mse, dw, db = _mse_grads(w, b, x, t)
    w_next = w - eta * dw
    b_next = b - eta * db
    loss_c = 0.0
    if z != 0.0:
        kick = z * (i0 - o[d])
        w_next += kick
        b_next += kick
        u = w * x[d] + b
        loss_c = z * (i0 * np.logaddexp(0.0, -u) + (1 - i0) * np.logaddexp(0.0, u))
    return w_next, b_next, o, mse, float(loss_c)


@dataclass
class ToyTrajectory:
    """Per-epoch state before each update, plus the final parameters."""

    w: np.ndarray
    b: np.ndarray
    o: np.ndarray
    loss: np.ndarray
    loss_c: np.ndarray
    z: np.ndarray
    node: np.ndarray
    final_w: float
    final_b: float


def initial_state(seed):
    """Starting (w, b), uniform on [-1, 1] per seed."""
    rng = np.random.default_rng(seed)
    w, b = rng.uniform(-1.0, 1.0, size=2)
    return float(w), float(b), rng


def toy_train(cfg):
    """Run the annealed map for ``cfg.epochs`` updates.

    The initial (w, b) draw and the per-epoch sample draws of ``cgbp-r``
    come from one stream seeded by ``cfg.seed``, in that order.
    """
    x = np.asarray(cfg.inputs, dtype=np.float64)
    t = np.asarray(cfg.targets, dtype=np.float64)
    w, b, rng = initial_state(cfg.seed)
    z = cfg.z0
    n = len(cfg.inputs)
    cols = {name: np.empty(cfg.epochs) for name in
            ("w", "b", "loss", "loss_c", "z")}
    o_all = np.empty((cfg.epochs, n))
    node = np.zeros(cfg.epochs, dtype=np.int64)
    for e in range(cfg.epochs):
        if cfg.mode == "cgbp-r":
            d = int(rng.integers(n))
        else:
            d = 0
        cols["w"][e], cols["b"][e], cols["z"][e], node[e] = w, b, z, d
        w, b, o, mse, lc = toy_step(w, b, z, d, x, t, cfg.eta, cfg.i0)
        o_all[e] = o
        cols["loss"][e], cols["loss_c"][e] = mse, lc
        z *= cfg.beta
    return ToyTrajectory(w=cols["w"], b=cols["b"], o=o_all, loss=cols["loss"],
                         loss_c=cols["loss_c"], z=cols["z"], node=node,
                         final_w=w, final_b=b)


def write_toy_csv(path, traj):
    n = traj.o.shape[1]
    header = ["epoch", "w", "b"] + [f"o{i + 1}" for i in range(n)] + \
        ["loss", "loss_c", "z", "node"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for e in range(traj.w.size):
            row = [e, repr(float(traj.w[e])), repr(float(traj.b[e]))]
            row += [repr(float(v)) for v in traj.o[e]]
            row += [repr(float(traj.loss[e])), repr(float(traj.loss_c[e])),
                    repr(float(traj.z[e])), int(traj.node[e])]
            writer.writerow(row)


def lyapunov_max(z, eta=0.1, i0=0.65, inputs=X_DEFAULT, targets=T_DEFAULT,
                 node=0, steps=10000, warmup=0, eps=1e-7, state=None, seed=0):
    """Largest Lyapunov exponent estimate for the frozen-z map at reference
    sample ``node``.

    Tangent growth is tracked by finite differences: the renormalized
    perturbation ``eps * v`` is pushed through the map each step and the log
    of its growth is averaged over ``steps`` after ``warmup`` settling steps.
    Starts from ``state`` (w, b) when given, else from the seed's uniform
    [-1, 1] draw. Note this is a finite-time estimate from that start; maps
    with long chaotic transients can read positive even when the eventual
    attractor is periodic.
    """
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)

    def step(state_vec):
        w_next, b_next, _, _, _ = toy_step(state_vec[0], state_vec[1], z, node,
                                           x, t, eta, i0)
        return np.array([w_next, b_next])

    if state is None:
        w0, b0, _ = initial_state(seed)
        state = (w0, b0)
    s = np.array([state[0], state[1]], dtype=np.float64)
    for _ in range(warmup):
        s = step(s)
    v = np.array([1.0, 1.0]) / np.sqrt(2.0)
    total = 0.0
    for _ in range(steps):
        s_next = step(s)
        v_img = (step(s + eps * v) - s_next) / eps
        growth = np.linalg.norm(v_img)
        if growth == 0.0:
            return -np.inf
        total += np.log(growth)
        v = v_img / growth
        s = s_next
    return total / steps


def attractor_spread(z, state, iters=1000, tail=200, eta=0.1, i0=0.65,
                     inputs=X_DEFAULT, targets=T_DEFAULT, node=0):
    """Iterate the frozen-z map from ``state`` and measure max - min of the
    last ``tail`` w-iterates. Returns (spread, final state)."""
    if tail > iters:
        raise ParameterError(f"tail {tail} exceeds iters {iters}")
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    w, b = state
    ws = np.empty(iters)
    for i in range(iters):
        w, b, _, _, _ = toy_step(w, b, z, node, x, t, eta, i0)
        ws[i] = w
    tail_w = ws[-tail:]
    return float(tail_w.max() - tail_w.min()), (w, b)


def bifurcation_sweep(z_values, iters=1000, tail=200, eta=0.1, i0=0.65,
                      inputs=X_DEFAULT, targets=T_DEFAULT, node=0,
                      start=None, seed=0):
    """Frozen-z attractor spreads along a z schedule with warm starts: each
    z continues from the previous endpoint, the standard continuation
    protocol for bifurcation scans. Returns a list of (z, spread)."""
    if start is None:
        w0, b0, _ = initial_state(seed)
        start = (w0, b0)
    state = (float(start[0]), float(start[1]))
    out = []
    for z in z_values:
        spread, state = attractor_spread(z, state, iters=iters, tail=tail,
                                         eta=eta, i0=i0, inputs=inputs,
                                         targets=targets, node=node)
        out.append((float(z), spread))
    return out
