"""Problem encodings: differentiable relaxations and exact discrete objectives.

Three graph problems share one interface. With soft assignments p in [0, 1]:

- ``mis``  loss = -sum_i p_i + penalty * sum_{(u,v) in E} p_u p_v
- ``mc``   loss = sum_{(u,v) in E} (2 p_u p_v - p_u - p_v)
- ``gc``   loss = sum_{(u,v) in E} dot(p_u, p_v) with p_i a row of q color
  probabilities (the same-color overlap; zero exactly at proper colorings)

plus a generic ``qubo`` kind, loss = p^T Q p for a symmetric Q. At binary
(or one-hot) corners each relaxation equals its discrete Hamiltonian.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import ParameterError, SizeRefusalError

KINDS = ("mis", "mc", "gc", "qubo")


@dataclass(frozen=True)
class ProblemEncoding:
    """Which Hamiltonian to optimize and its parameters.

    ``penalty`` only applies to ``mis``; ``n_colors`` only to ``gc``;
    ``qubo`` carries its matrix (dense or scipy sparse, symmetric).
    """

    kind: str
    penalty: float = 2.0
    n_colors: int = 0
    qubo: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "mis" and not self.penalty > 0:
            raise ParameterError(f"penalty must be positive, got {self.penalty}")
        if self.kind == "gc" and self.n_colors < 2:
            raise ParameterError(f"gc needs n_colors >= 2, got {self.n_colors}")
        if self.kind == "qubo":
            q = self.qubo
            if q is None:
                raise ParameterError("qubo kind needs a matrix")
            if q.ndim != 2 or q.shape[0] != q.shape[1]:
                raise ParameterError(f"qubo matrix must be square, got {q.shape}")
            if sp.issparse(q):
                asym = abs(q - q.T)
                bad = asym.max() if asym.nnz else 0.0
            else:
                bad = np.abs(q - np.asarray(q).T).max() if q.size else 0.0
            if bad > 1e-12:
                raise ParameterError("qubo matrix must be symmetric")


def output_width(enc):
    """Columns of the soft assignment: 1, or n_colors for gc."""
    return enc.n_colors if enc.kind == "gc" else 1


def _check_soft(enc, p_soft, n):
    width = output_width(enc)
    if p_soft.shape != (n, width):
        raise ParameterError(
            f"soft assignment must have shape ({n}, {width}), got {p_soft.shape}")
    if not np.all(np.isfinite(p_soft)):
        raise ParameterError("soft assignment contains non-finite values")
    if enc.kind != "qubo":
        if p_soft.min(initial=0.0) < -1e-9 or p_soft.max(initial=0.0) > 1 + 1e-9:
            raise ParameterError("soft assignment outside [0, 1]")
        if enc.kind == "gc":
            rows = p_soft.sum(axis=1)
            if np.abs(rows - 1.0).max(initial=0.0) > 1e-6:
                raise ParameterError("gc rows must sum to 1")


def loss_and_grad(enc, p_soft, g):
    """Relaxed Hamiltonian and its gradient wrt the soft assignment.

    Returns ``(loss, grad)`` with ``grad`` shaped like ``p_soft``.
    """
    p_soft = np.asarray(p_soft, dtype=np.float64)
    _check_soft(enc, p_soft, g.n_nodes)
    eu = g.edge_list[:, 0]
    ev = g.edge_list[:, 1]
    if enc.kind == "mis":
        loss, grad = kernels.mis_loss_grad(eu, ev, p_soft[:, 0], enc.penalty)
        return float(loss), grad[:, None]
    if enc.kind == "mc":
        loss, grad = kernels.mc_loss_grad(eu, ev, p_soft[:, 0])
        return float(loss), grad[:, None]
    if enc.kind == "gc":
        loss, grad = kernels.gc_loss_grad(eu, ev, np.ascontiguousarray(p_soft))
        return float(loss), grad
    qp = enc.qubo @ p_soft[:, 0]
    return float(p_soft[:, 0] @ qp), 2.0 * np.asarray(qp)[:, None]


@dataclass(frozen=True)
class ObjectiveReport:
    """Exact discrete evaluation of one assignment.

    ``objective`` is the headline number (set size, cut size, conflict count,
    or QUBO value); ``violations`` counts constraint breaks (mis edges inside
    the set; for gc it equals the conflict count); ``hamiltonian`` is the
    energy the relaxation descends.
    """

    kind: str
    objective: float
    violations: int
    hamiltonian: float


def discrete_objective(enc, values, g):
    """Score an integer assignment: {0,1} per node, or a color in [0, q)."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    if values.shape != (g.n_nodes,):
        raise ParameterError(f"values must have shape ({g.n_nodes},)")
    eu = g.edge_list[:, 0]
    ev = g.edge_list[:, 1]
    if enc.kind in ("mis", "mc") and values.size and (values.min() < 0 or values.max() > 1):
        raise ParameterError("binary assignment expected")
    if enc.kind == "mis":
        size = int(values.sum())
        viol = kernels.both_selected_count(eu, ev, values)
        return ObjectiveReport("mis", size, viol, -size + enc.penalty * viol)
    if enc.kind == "mc":
        cut = kernels.cut_count(eu, ev, values)
        return ObjectiveReport("mc", cut, 0, -float(cut))
    if enc.kind == "gc":
        if values.size and (values.min() < 0 or values.max() >= enc.n_colors):
            raise ParameterError(f"colors must lie in [0, {enc.n_colors})")
        conflicts = kernels.same_value_count(eu, ev, values)
        return ObjectiveReport("gc", conflicts, conflicts, float(conflicts))
    x = values.astype(np.float64)
    h = float(x @ (enc.qubo @ x))
    return ObjectiveReport("qubo", h, 0, h)


def is_better(a, b):
    """True when report ``a`` strictly beats ``b``.

    mis ranks by fewest violations then largest set; mc by largest cut; gc by
    fewest conflicts; qubo by lowest energy.
    """
    if a.kind != b.kind:
        raise ParameterError("cannot compare reports of different kinds")
    if a.kind == "mis":
        return (a.violations, -a.objective) < (b.violations, -b.objective)
    if a.kind == "mc":
        return a.objective > b.objective
    if a.kind == "gc":
        return a.objective < b.objective
    return a.hamiltonian < b.hamiltonian


def brute_force(enc, g, max_states=2 ** 20):
    """Exhaustive optimum for small instances.

    Enumerates 2^n (binary kinds) or q^n (gc) assignments in vectorized
    chunks and returns ``(values, report)`` for the best one under
    :func:`is_better`; first-found wins ties. Refuses when the state count
    exceeds ``max_states``.
    """
    n = g.n_nodes
    base = enc.n_colors if enc.kind == "gc" else 2
    states = base ** n
    if states > max_states:
        raise SizeRefusalError(
            f"{states} assignments exceed the limit of {max_states}")
    best_vals = None
    best = None
    chunk = 1 << 14
    for start in range(0, states, chunk):
        idx = np.arange(start, min(start + chunk, states), dtype=np.int64)
        digits = np.empty((idx.size, n), dtype=np.int64)
        rem = idx.copy()
        for pos in range(n - 1, -1, -1):
            digits[:, pos] = rem % base
            rem //= base
        for row in range(digits.shape[0]):
            rep = discrete_objective(enc, digits[row], g)
            if best is None or is_better(rep, best):
                best = rep
                best_vals = digits[row].copy()
    return best_vals, best
