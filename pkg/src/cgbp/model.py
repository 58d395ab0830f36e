"""Two-layer graph networks over a learned node embedding.

Pipeline: embedding -> [aggregate -> linear -> batch-norm -> ReLU -> dropout]
-> [aggregate -> linear -> batch-norm -> sigmoid or row softmax]. Two layer
types are supported:

- ``gcn``: symmetric-normalized neighborhood sum, h_i <- sum_j h_j / c_ij
  with c_ij = sqrt(deg i) * sqrt(deg j), no self term, then a linear map.
- ``sage``: the node's own features concatenated with the neighborhood mean,
  then a linear map.

Hidden widths follow the instance size: d0 = isqrt(n), d1 = max(1, d0 // 2),
and the output width is 1 (binary problems) or the number of colors. All
math is float64. Batch statistics normalize with the biased variance while
running variance accumulates the unbiased one (momentum 0.1).
"""

import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, softmax

from .errors import NumericError, ParameterError
from .graph import degree_norm
from .kernels import Propagator

ARCHS = ("gcn", "sage")
PARAM_ORDER = ("embedding", "w1", "b1", "bn1_scale", "bn1_shift",
               "w2", "b2", "bn2_scale", "bn2_shift")


def default_dims(n_nodes, out_width):
    """(d0, d1, d2) from the instance size."""
    d0 = max(1, math.isqrt(n_nodes))
    return d0, max(1, d0 // 2), out_width


@dataclass
class BatchNorm:
    scale: np.ndarray
    shift: np.ndarray
    run_mean: np.ndarray
    run_var: np.ndarray
    momentum: float = 0.1
    eps: float = 1e-5


def make_batchnorm(width):
    return BatchNorm(scale=np.ones(width), shift=np.zeros(width),
                     run_mean=np.zeros(width), run_var=np.ones(width))


def bn_forward_train(bn, x):
    """Normalize with batch statistics and update the running ones.

    Returns ``(y, cache)`` where cache holds what backward needs.
    """
    n = x.shape[0]
    mean = x.mean(axis=0)
    var = x.var(axis=0)
    istd = 1.0 / np.sqrt(var + bn.eps)
    xhat = (x - mean) * istd
    y = bn.scale * xhat + bn.shift
    unbias = n / (n - 1) if n > 1 else 1.0
    m = bn.momentum
    bn.run_mean = (1 - m) * bn.run_mean + m * mean
    bn.run_var = (1 - m) * bn.run_var + m * (var * unbias)
    return y, (xhat, istd)


def bn_forward_eval(bn, x):
    xhat = (x - bn.run_mean) / np.sqrt(bn.run_var + bn.eps)
    return bn.scale * xhat + bn.shift


def bn_backward(bn, cache, dy):
    """Gradients through batch statistics; returns (dx, dscale, dshift)."""
    xhat, istd = cache
    dshift = dy.sum(axis=0)
    dscale = (dy * xhat).sum(axis=0)
    dx = bn.scale * istd * (dy - dy.mean(axis=0) - xhat * (dy * xhat).mean(axis=0))
    return dx, dscale, dshift


@dataclass
class Model:
    arch: str
    dropout: float
    embedding: np.ndarray
    w1: np.ndarray
    b1: np.ndarray
    bn1: BatchNorm
    w2: np.ndarray
    b2: np.ndarray
    bn2: BatchNorm

    @property
    def n_nodes(self):
        return self.embedding.shape[0]

    @property
    def out_width(self):
        return self.w2.shape[1]

    def trainable(self):
        """(name, array) pairs in the fixed parameter order."""
        return [("embedding", self.embedding), ("w1", self.w1), ("b1", self.b1),
                ("bn1_scale", self.bn1.scale), ("bn1_shift", self.bn1.shift),
                ("w2", self.w2), ("b2", self.b2),
                ("bn2_scale", self.bn2.scale), ("bn2_shift", self.bn2.shift)]

    def copy(self):
        import copy
        return copy.deepcopy(self)


def init_model(n_nodes, arch, out_width, rng, dims=None, dropout=0.0):
    """Fresh model with uniform [-sqrt(k), sqrt(k)) entries, k = 1/fan-in.

    ``rng`` is an ``np.random.Generator`` or a seed. Draw order is fixed
    (embedding, w1, b1, w2, b2) so a seed pins the full initialization.
    ``dims`` overrides the size-derived (d0, d1) pair, mainly for tests.
    """
    if arch not in ARCHS:
        raise ParameterError(f"arch must be one of {ARCHS}, got {arch!r}")
    if not 0.0 <= dropout < 1.0:
        raise ParameterError(f"dropout must lie in [0, 1), got {dropout}")
    if out_width < 1:
        raise ParameterError(f"out_width must be >= 1, got {out_width}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if dims is None:
        d0, d1, _ = default_dims(n_nodes, out_width)
    else:
        d0, d1 = dims
    fan1 = 2 * d0 if arch == "sage" else d0
    fan2 = 2 * d1 if arch == "sage" else d1

    def uni(k, *shape):
        s = math.sqrt(k)
        return rng.uniform(-s, s, size=shape)

    emb = uni(1.0 / d0, n_nodes, d0)
    w1 = uni(1.0 / fan1, fan1, d1)
    b1 = uni(1.0 / fan1, d1)
    w2 = uni(1.0 / fan2, fan2, out_width)
    b2 = uni(1.0 / fan2, out_width)
    return Model(arch=arch, dropout=float(dropout), embedding=emb,
                 w1=w1, b1=b1, bn1=make_batchnorm(d1),
                 w2=w2, b2=b2, bn2=make_batchnorm(out_width))


@dataclass
class Aggregator:
    """Neighborhood operators prepared once per (graph, arch).

    ``fwd`` feeds the forward pass; ``adj`` is its adjoint for backprop. The
    symmetric GCN normalization is self-adjoint so both coincide there.
    """

    arch: str
    fwd: Propagator
    adj: Propagator


def make_aggregator(g, arch, norm=None):
    if arch == "gcn":
        if norm is None:
            norm = degree_norm(g)
        prop = Propagator(g.row_offsets, g.neighbor_ids, norm.inv_c)
        return Aggregator(arch="gcn", fwd=prop, adj=prop)
    if arch == "sage":
        deg = g.degrees.astype(np.float64)
        safe = np.maximum(deg, 1.0)
        rows = np.repeat(np.arange(g.n_nodes), g.degrees)
        fwd = Propagator(g.row_offsets, g.neighbor_ids, 1.0 / safe[rows])
        adj = Propagator(g.row_offsets, g.neighbor_ids, 1.0 / safe[g.neighbor_ids])
        return Aggregator(arch="sage", fwd=fwd, adj=adj)
    raise ParameterError(f"arch must be one of {ARCHS}, got {arch!r}")


_ACT = {
    "identity": lambda z: z,
    "relu": lambda z: np.maximum(z, 0.0),
    "sigmoid": expit,
    "softmax": lambda z: softmax(z, axis=1),
}


def gcn_layer_forward(w, b, h, prop, activation="identity"):
    """One normalized-sum layer. Returns (h_out, o, pre) where ``o`` is the
    sigmoid of the raw pre-activation regardless of ``activation``."""
    pre = prop(h) @ w + b
    return _ACT[activation](pre), expit(pre), pre


def sage_layer_forward(w, b, h, prop, activation="identity"):
    """One concat(self, neighborhood-mean) layer; see gcn_layer_forward."""
    pre = np.concatenate((h, prop(h)), axis=1) @ w + b
    return _ACT[activation](pre), expit(pre), pre


@dataclass
class ForwardCache:
    """Intermediates one forward pass produces, consumed by backward and by
    the chaotic update (which reads raw pre-activations)."""

    mode: str
    in1: np.ndarray          # aggregated (gcn) or concatenated (sage) layer-1 input
    pre1: np.ndarray
    bn1_cache: Optional[tuple]
    y1: np.ndarray           # batch-norm output, ReLU input
    drop_mask: Optional[np.ndarray]
    h1: np.ndarray
    in2: np.ndarray
    pre2: np.ndarray
    bn2_cache: Optional[tuple]
    p: np.ndarray


def _layer_input(arch, agg, h):
    if arch == "gcn":
        return agg.fwd(h)
    return np.concatenate((h, agg.fwd(h)), axis=1)


def network_forward(model, agg, mode="eval", rng=None):
    """Full pipeline; returns (P, cache).

    ``mode='train'`` uses batch statistics (and updates the running ones) and
    applies inverted dropout, which draws from ``rng``; ``mode='eval'`` uses
    running statistics and no dropout.
    """
    if mode not in ("train", "eval"):
        raise ParameterError(f"mode must be 'train' or 'eval', got {mode!r}")
    train = mode == "train"
    if train and model.dropout > 0.0 and rng is None:
        raise ParameterError("training with dropout needs an rng")

    in1 = _layer_input(model.arch, agg, model.embedding)
    pre1 = in1 @ model.w1 + model.b1
    if train:
        y1, bn1_cache = bn_forward_train(model.bn1, pre1)
    else:
        y1, bn1_cache = bn_forward_eval(model.bn1, pre1), None
    a1 = np.maximum(y1, 0.0)
    drop_mask = None
    if train and model.dropout > 0.0:
        keep = rng.random(a1.shape) >= model.dropout
        drop_mask = keep / (1.0 - model.dropout)
        h1 = a1 * drop_mask
    else:
        h1 = a1

    in2 = _layer_input(model.arch, agg, h1)
    pre2 = in2 @ model.w2 + model.b2
    if train:
        y2, bn2_cache = bn_forward_train(model.bn2, pre2)
    else:
        y2, bn2_cache = bn_forward_eval(model.bn2, pre2), None
    p = expit(y2) if model.out_width == 1 else softmax(y2, axis=1)

    if not np.all(np.isfinite(p)):
        layer = "output"
        if not np.all(np.isfinite(pre1)):
            layer = "layer1"
        elif not np.all(np.isfinite(pre2)):
            layer = "layer2"
        raise NumericError("non-finite activations", layer=layer)
    return p, ForwardCache(mode=mode, in1=in1, pre1=pre1, bn1_cache=bn1_cache,
                           y1=y1, drop_mask=drop_mask, h1=h1, in2=in2,
                           pre2=pre2, bn2_cache=bn2_cache, p=p)


def network_backward(model, agg, cache, dp):
    """Gradients of a scalar loss through a train-mode forward.

    ``dp`` is the loss gradient wrt the network output P. Returns a dict
    keyed like :data:`PARAM_ORDER`.
    """
    if cache.mode != "train":
        raise ParameterError("backward needs a train-mode cache")
    p = cache.p
    if model.out_width == 1:
        dy2 = dp * p * (1.0 - p)
    else:
        dy2 = p * (dp - (dp * p).sum(axis=1, keepdims=True))
    dpre2, dscale2, dshift2 = bn_backward(model.bn2, cache.bn2_cache, dy2)

    dw2 = cache.in2.T @ dpre2
    db2 = dpre2.sum(axis=0)
    din2 = dpre2 @ model.w2.T
    if model.arch == "gcn":
        dh1 = agg.adj(din2)
    else:
        d1 = cache.h1.shape[1]
        dh1 = din2[:, :d1] + agg.adj(din2[:, d1:])

    if cache.drop_mask is not None:
        dh1 = dh1 * cache.drop_mask
    dy1 = dh1 * (cache.y1 > 0.0)
    dpre1, dscale1, dshift1 = bn_backward(model.bn1, cache.bn1_cache, dy1)

    dw1 = cache.in1.T @ dpre1
    db1 = dpre1.sum(axis=0)
    din1 = dpre1 @ model.w1.T
    if model.arch == "gcn":
        demb = agg.adj(din1)
    else:
        d0 = model.embedding.shape[1]
        demb = din1[:, :d0] + agg.adj(din1[:, d0:])

    return {"embedding": demb, "w1": dw1, "b1": db1,
            "bn1_scale": dscale1, "bn1_shift": dshift1,
            "w2": dw2, "b2": db2,
            "bn2_scale": dscale2, "bn2_shift": dshift2}


_MAGIC = b"CGBPCKPT"
_VERSION = 1
_ARCH_CODE = {"gcn": 0, "sage": 1}
_ARCH_NAME = {v: k for k, v in _ARCH_CODE.items()}


def save_checkpoint(model, path):
    """Binary checkpoint, little-endian.

    Layout: magic ``CGBPCKPT``, u16 version, u8 arch code, f64 dropout, f64
    bn eps, f64 bn momentum, u32 array count, then per array a u16 name
    length, the utf-8 name, u8 ndim, u64 dims, and the row-major f64 data.
    """
    arrays = model.trainable() + [
        ("bn1_run_mean", model.bn1.run_mean), ("bn1_run_var", model.bn1.run_var),
        ("bn2_run_mean", model.bn2.run_mean), ("bn2_run_var", model.bn2.run_var)]
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<HBddd", _VERSION, _ARCH_CODE[model.arch],
                             model.dropout, model.bn1.eps, model.bn1.momentum))
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays:
            raw = name.encode()
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ParameterError(f"{path}: not a checkpoint file")
        version, arch_code, dropout, eps, momentum = struct.unpack(
            "<HBddd", fh.read(struct.calcsize("<HBddd")))
        if version != _VERSION:
            raise ParameterError(f"{path}: unsupported checkpoint version {version}")
        if arch_code not in _ARCH_NAME:
            raise ParameterError(f"{path}: unknown arch code {arch_code}")
        (count,) = struct.unpack("<I", fh.read(4))
        arrays = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode()
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
            size = int(np.prod(shape)) if ndim else 1
            data = np.frombuffer(fh.read(8 * size), dtype="<f8").reshape(shape)
            arrays[name] = data.astype(np.float64)
    needed = set(PARAM_ORDER) | {"bn1_run_mean", "bn1_run_var",
                                 "bn2_run_mean", "bn2_run_var"}
    missing = needed - set(arrays)
    if missing:
        raise ParameterError(f"{path}: checkpoint missing arrays {sorted(missing)}")
    bn1 = BatchNorm(scale=arrays["bn1_scale"], shift=arrays["bn1_shift"],
                    run_mean=arrays["bn1_run_mean"], run_var=arrays["bn1_run_var"],
                    momentum=momentum, eps=eps)
    bn2 = BatchNorm(scale=arrays["bn2_scale"], shift=arrays["bn2_shift"],
                    run_mean=arrays["bn2_run_mean"], run_var=arrays["bn2_run_var"],
                    momentum=momentum, eps=eps)
    return Model(arch=_ARCH_NAME[arch_code], dropout=dropout,
                 embedding=arrays["embedding"], w1=arrays["w1"], b1=arrays["b1"],
                 bn1=bn1, w2=arrays["w2"], b2=arrays["b2"], bn2=bn2)
