"""Projection of soft assignments to discrete ones, quality measures, and
solution files."""

import math

import numpy as np

from .errors import ParameterError
from .hamiltonians import discrete_objective

# constant in the expected-cut bound for large random d-regular graphs
P_STAR = 0.7632


def project_binary(p, threshold=0.5):
    """1 where p exceeds the threshold, else 0 (ties round down)."""
    p = np.asarray(p)
    return (p > threshold).astype(np.int64)


def project_argmax(p):
    """Row argmax; ties pick the lowest color index."""
    p = np.asarray(p)
    if p.ndim != 2:
        raise ParameterError(f"expected (n, q) probabilities, got shape {p.shape}")
    return np.argmax(p, axis=1).astype(np.int64)


def project_values(enc, p_soft):
    """Problem-appropriate projection of an (n, width) soft assignment."""
    p_soft = np.asarray(p_soft)
    if enc.kind == "gc":
        return project_argmax(p_soft)
    return project_binary(p_soft[:, 0] if p_soft.ndim == 2 else p_soft)


def cut_upper_bound(d, n):
    """Expected max-cut scale (d/4 + P* sqrt(d/4)) n for random d-regular
    graphs; the denominator of the reported approximation ratio."""
    if d < 1 or n < 1:
        raise ParameterError(f"need d >= 1 and n >= 1, got d={d} n={n}")
    quarter = d / 4.0
    return (quarter + P_STAR * math.sqrt(quarter)) * n


def approximation_ratio(cut, d, n):
    return cut / cut_upper_bound(d, n)


def greedy_repair_mis(values, g):
    """Drop nodes until no edge has both endpoints selected.

    Scans edges in canonical order; at each violated edge the endpoint with
    the larger degree is deselected (ties: the larger index). Deselection is
    monotone, so one pass leaves an independent set. Returns a new array.
    """
    out = np.asarray(values, dtype=np.int64).copy()
    if out.shape != (g.n_nodes,):
        raise ParameterError(f"values must have shape ({g.n_nodes},)")
    deg = g.degrees
    for u, v in g.edge_list:
        if out[u] == 1 and out[v] == 1:
            if deg[u] > deg[v]:
                drop = u
            elif deg[v] > deg[u]:
                drop = v
            else:
                drop = max(u, v)
            out[drop] = 0
    return out


def write_solution(path, values, report, ratio=None):
    """One ``node_id value`` line per node plus a ``#``-prefixed footer with
    the objective, violation count, Hamiltonian, and ratio when given."""
    with open(path, "w") as fh:
        for i, v in enumerate(values):
            fh.write(f"{i} {int(v)}\n")
        fh.write(f"# kind {report.kind}\n")
        fh.write(f"# objective {report.objective}\n")
        fh.write(f"# violations {report.violations}\n")
        fh.write(f"# hamiltonian {report.hamiltonian}\n")
        if ratio is not None:
            fh.write(f"# ratio {ratio:.6f}\n")


def read_solution(path):
    """Inverse of :func:`write_solution`; returns (values, footer dict)."""
    values = {}
    footer = {}
    with open(path) as fh:
        for raw in fh:
            parts = raw.split()
            if not parts:
                continue
            if parts[0] == "#":
                if len(parts) >= 3:
                    footer[parts[1]] = parts[2]
                continue
            values[int(parts[0])] = int(parts[1])
    n = len(values)
    out = np.zeros(n, dtype=np.int64)
    for i, v in values.items():
        if not 0 <= i < n:
            raise ParameterError(f"{path}: node id {i} outside 0..{n - 1}")
        out[i] = v
    return out, footer
