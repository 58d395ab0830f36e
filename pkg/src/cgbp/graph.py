"""Graph container, random/structured generators, and file formats.

Graphs are simple and undirected: no self-loops, no parallel edges. The
adjacency is stored in CSR form (row offsets plus a flat neighbor array with
both directions materialized) next to a canonical edge list with u < v. Node
ids are 0-based internally; both file formats are 1-based on disk.
"""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GenerationError, ParameterError, ParseError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph.

    Attributes
    ----------
    n_nodes : int
    n_edges : int
    row_offsets : (n_nodes + 1,) int64, CSR offsets into ``neighbor_ids``
    neighbor_ids : (2 * n_edges,) int64, sorted within each row
    edge_list : (n_edges, 2) int64, u < v, lexicographically sorted
    """

    n_nodes: int
    n_edges: int
    row_offsets: np.ndarray
    neighbor_ids: np.ndarray
    edge_list: np.ndarray

    @property
    def degrees(self):
        return np.diff(self.row_offsets)

    def neighbors(self, i):
        return self.neighbor_ids[self.row_offsets[i]:self.row_offsets[i + 1]]


def from_edges(n_nodes, edges, dedupe=False):
    """Build a canonical :class:`Graph` from an iterable of (u, v) pairs.

    Self-loops always raise. Duplicate edges raise unless ``dedupe`` is set,
    in which case they are dropped with a warning.
    """
    if n_nodes < 1:
        raise ParameterError(f"graph needs at least one node, got {n_nodes}")
    edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
    if edges.size == 0:
        edges = edges.reshape(0, 2)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise ParameterError(f"edges must be (m, 2), got shape {edges.shape}")
    if edges.size and (edges.min() < 0 or edges.max() >= n_nodes):
        raise ParameterError("edge endpoint out of range")
    if np.any(edges[:, 0] == edges[:, 1]):
        bad = int(edges[np.argmax(edges[:, 0] == edges[:, 1]), 0])
        raise ParameterError(f"self-loop at node {bad}")

    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    order = np.lexsort((hi, lo))
    lo, hi = lo[order], hi[order]
    if lo.size > 1:
        dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
        if dup.any():
            if not dedupe:
                u, v = int(lo[1:][dup][0]), int(hi[1:][dup][0])
                raise ParameterError(f"duplicate edge ({u}, {v})")
            log.warning("dropped %d duplicate edges", int(dup.sum()))
            keep = np.concatenate(([True], ~dup))
            lo, hi = lo[keep], hi[keep]
    edge_list = np.column_stack((lo, hi))

    src = np.concatenate((lo, hi))
    dst = np.concatenate((hi, lo))
    order = np.lexsort((dst, src))
    neighbor_ids = np.ascontiguousarray(dst[order])
    counts = np.bincount(src, minlength=n_nodes)
    row_offsets = np.zeros(n_nodes + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    return Graph(n_nodes=int(n_nodes), n_edges=int(edge_list.shape[0]),
                 row_offsets=row_offsets, neighbor_ids=neighbor_ids,
                 edge_list=edge_list)


def validate(g):
    """Check the structural invariants; raises ``ValueError`` on violation."""
    n, m = g.n_nodes, g.n_edges
    if g.row_offsets.shape != (n + 1,):
        raise ValueError("row_offsets has wrong length")
    if g.row_offsets[0] != 0 or g.row_offsets[-1] != 2 * m:
        raise ValueError("row_offsets endpoints inconsistent with edge count")
    if np.any(np.diff(g.row_offsets) < 0):
        raise ValueError("row_offsets not monotone")
    if g.neighbor_ids.shape != (2 * m,):
        raise ValueError("neighbor_ids has wrong length")
    if m and (g.neighbor_ids.min() < 0 or g.neighbor_ids.max() >= n):
        raise ValueError("neighbor id out of range")
    rows = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    if np.any(rows == g.neighbor_ids):
        raise ValueError("self-loop present")
    for i in range(n):
        nbr = g.neighbors(i)
        if nbr.size > 1 and np.any(np.diff(nbr) <= 0):
            raise ValueError(f"row {i} neighbors not strictly increasing")
    fwd = np.lexsort((g.neighbor_ids, rows))
    bwd = np.lexsort((rows, g.neighbor_ids))
    if not (np.array_equal(rows[fwd], g.neighbor_ids[bwd])
            and np.array_equal(g.neighbor_ids[fwd], rows[bwd])):
        raise ValueError("adjacency not symmetric")
    if g.edge_list.shape != (m, 2):
        raise ValueError("edge_list has wrong shape")
    if m and np.any(g.edge_list[:, 0] >= g.edge_list[:, 1]):
        raise ValueError("edge_list rows must satisfy u < v")


@dataclass(frozen=True, eq=False)
class NormTable:
    """Per-entry weights 1 / (sqrt(deg(i)) * sqrt(deg(j))) aligned with
    ``neighbor_ids``; rows of isolated nodes contribute no entries."""

    inv_c: np.ndarray


def degree_norm(g):
    deg = g.degrees.astype(np.float64)
    rows = np.repeat(np.arange(g.n_nodes), g.degrees)
    inv_c = 1.0 / np.sqrt(deg[rows] * deg[g.neighbor_ids])
    return NormTable(inv_c=inv_c)


def generate_regular(n, d, seed, max_retries=1000):
    """Sample a d-regular simple graph by stub pairing with full rejection.

    Shuffles the n*d stubs, pairs them consecutively, and rejects the whole
    attempt when any self-loop or parallel edge shows up. Retries up to
    ``max_retries`` times; raises :class:`GenerationError` beyond that.
    """
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    if d < 0 or d >= n:
        raise ParameterError(f"degree must satisfy 0 <= d < n, got d={d} n={n}")
    if (n * d) % 2 != 0:
        raise ParameterError(f"n*d must be even, got n={n} d={d}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_retries):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        lo = np.minimum(pairs[:, 0], pairs[:, 1])
        hi = np.maximum(pairs[:, 0], pairs[:, 1])
        if np.any(lo == hi):
            continue
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if lo.size > 1 and np.any((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])):
            continue
        return from_edges(n, np.column_stack((lo, hi)))
    raise GenerationError(
        f"no simple {d}-regular graph on {n} nodes after {max_retries} attempts")


def queen_graph(n_rows, n_cols=None):
    """Queen graph of an ``n_rows`` x ``n_cols`` board.

    Squares are nodes; two squares are adjacent when a queen moves between
    them in one step (same row, column, or diagonal).
    """
    if n_cols is None:
        n_cols = n_rows
    if n_rows < 1 or n_cols < 1:
        raise ParameterError("board sides must be positive")
    node = lambda r, c: r * n_cols + c
    groups = []
    for r in range(n_rows):
        groups.append([node(r, c) for c in range(n_cols)])
    for c in range(n_cols):
        groups.append([node(r, c) for r in range(n_rows)])
    diag, anti = {}, {}
    for r in range(n_rows):
        for c in range(n_cols):
            diag.setdefault(r - c, []).append(node(r, c))
            anti.setdefault(r + c, []).append(node(r, c))
    groups.extend(diag.values())
    groups.extend(anti.values())
    edges = [pair for grp in groups for pair in combinations(grp, 2)]
    return from_edges(n_rows * n_cols, edges)


def _tokens(line):
    return line.split()


def load_gset(path, allow_weights=False):
    """Read the edge-list format: header ``n m`` then m lines ``u v [w]``.

    Indices are 1-based. Edge weights other than 1 are rejected unless
    ``allow_weights`` is set, in which case every weight is treated as 1 and
    a warning is emitted.
    """
    with open(path) as fh:
        lines = fh.readlines()
    header_at = None
    for ln, raw in enumerate(lines, start=1):
        if raw.strip():
            header_at = ln
            break
    if header_at is None:
        raise ParseError("empty file", path=path)
    parts = _tokens(lines[header_at - 1])
    if len(parts) != 2:
        raise ParseError(f"header must be 'n m', got {lines[header_at - 1].strip()!r}",
                         path=path, line=header_at)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header fields must be integers", path=path, line=header_at)
    if n < 1 or m < 0:
        raise ParseError(f"invalid sizes n={n} m={m}", path=path, line=header_at)

    edges = np.empty((m, 2), dtype=np.int64)
    count = 0
    saw_weight = False
    for ln in range(header_at + 1, len(lines) + 1):
        raw = lines[ln - 1]
        parts = _tokens(raw)
        if not parts:
            continue
        if len(parts) not in (2, 3):
            raise ParseError(f"edge line must be 'u v [w]', got {raw.strip()!r}",
                             path=path, line=ln)
        try:
            u, v = int(parts[0]), int(parts[1])
            w = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise ParseError("edge fields must be integers", path=path, line=ln)
        if not (1 <= u <= n) or not (1 <= v <= n):
            raise ParseError(f"edge ({u}, {v}) out of range 1..{n}", path=path, line=ln)
        if u == v:
            raise ParseError(f"self-loop at node {u}", path=path, line=ln)
        if w != 1:
            if not allow_weights:
                raise ParseError(
                    f"weight {w} unsupported (pass allow_weights to map weights to 1)",
                    path=path, line=ln)
            saw_weight = True
        if count >= m:
            raise ParseError(f"more than the declared {m} edges", path=path, line=ln)
        edges[count] = (u - 1, v - 1)
        count += 1
    if count != m:
        raise ParseError(f"declared {m} edges but found {count}", path=path)
    if saw_weight:
        log.warning("%s: non-unit edge weights were mapped to 1", path)
    try:
        return from_edges(n, edges)
    except ParameterError as exc:
        raise ParseError(str(exc), path=path)


def save_gset(g, path):
    """Write the edge-list format with unit weights, 1-based ids."""
    with open(path, "w") as fh:
        fh.write(f"{g.n_nodes} {g.n_edges}\n")
        for u, v in g.edge_list:
            fh.write(f"{u + 1} {v + 1} 1\n")


def load_dimacs_col(path):
    """Read the DIMACS coloring format: ``p edge n m`` then ``e u v`` lines.

    ``c`` lines are comments. Duplicate edges are dropped with a warning; a
    mismatch between the declared and the resulting edge count is warned
    about, not rejected, since published instances are inconsistent here.
    """
    n = None
    declared = None
    edges = []
    with open(path) as fh:
        for ln, raw in enumerate(fh, start=1):
            parts = _tokens(raw)
            if not parts or parts[0] == "c":
                continue
            if parts[0] == "p":
                if n is not None:
                    raise ParseError("second problem line", path=path, line=ln)
                if len(parts) != 4 or parts[1] not in ("edge", "edges", "col"):
                    raise ParseError(f"problem line must be 'p edge n m', got {raw.strip()!r}",
                                     path=path, line=ln)
                try:
                    n, declared = int(parts[2]), int(parts[3])
                except ValueError:
                    raise ParseError("problem line sizes must be integers", path=path, line=ln)
                if n < 1 or declared < 0:
                    raise ParseError(f"invalid sizes n={n} m={declared}", path=path, line=ln)
            elif parts[0] == "e":
                if n is None:
                    raise ParseError("edge before problem line", path=path, line=ln)
                if len(parts) != 3:
                    raise ParseError(f"edge line must be 'e u v', got {raw.strip()!r}",
                                     path=path, line=ln)
                try:
                    u, v = int(parts[1]), int(parts[2])
                except ValueError:
                    raise ParseError("edge endpoints must be integers", path=path, line=ln)
                if not (1 <= u <= n) or not (1 <= v <= n):
                    raise ParseError(f"edge ({u}, {v}) out of range 1..{n}", path=path, line=ln)
                if u == v:
                    raise ParseError(f"self-loop at node {u}", path=path, line=ln)
                edges.append((u - 1, v - 1))
            else:
                raise ParseError(f"unknown record {parts[0]!r}", path=path, line=ln)
    if n is None:
        raise ParseError("missing problem line", path=path)
    g = from_edges(n, np.asarray(edges, dtype=np.int64).reshape(-1, 2), dedupe=True)
    if g.n_edges != declared:
        log.warning("%s: declared %d edges, kept %d", path, declared, g.n_edges)
    return g


def save_dimacs_col(g, path):
    with open(path, "w") as fh:
        fh.write(f"p edge {g.n_nodes} {g.n_edges}\n")
        for u, v in g.edge_list:
            fh.write(f"e {u + 1} {v + 1}\n")


def load_graph(path, allow_weights=False):
    """Dispatch on extension: ``.col``/``.dimacs`` use the coloring format,
    anything else the edge-list format."""
    text = str(path)
    if text.endswith((".col", ".dimacs")):
        return load_dimacs_col(path)
    return load_gset(path, allow_weights=allow_weights)
