"""Run configuration, manifests, and the multi-seed solve driver.

A :class:`RunConfig` captures everything a run needs; the same flat
``key=value`` text serves as config file and as the manifest written next to
results, so any finished run can be replayed from its manifest.
"""

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__
from .errors import ParameterError
from .graph import generate_regular, load_graph, queen_graph
from .hamiltonians import ProblemEncoding, discrete_objective, is_better
from .kernels import BACKEND
from .projection import approximation_ratio, greedy_repair_mis, write_solution
from .training import ChaoticConfig, OptimizerConfig, train, write_trajectory


@dataclass(frozen=True)
class RunConfig:
    """One solve request. Exactly one of ``graph`` (a file path),
    ``regular`` ("n,d,seed"), or ``queen`` ("RxC") selects the instance."""

    graph: str = ""
    regular: str = ""
    queen: str = ""
    problem: str = "mis"
    penalty: float = 2.0
    colors: int = 0
    arch: str = "gcn"
    opt: str = "adam"
    lr: float = 0.0
    z: str = "20,3,1"
    beta: float = 0.999
    i0: float = 0.65
    epochs: int = 10000
    seeds: str = "0"
    dropout: float = 0.0
    eval_every: int = 1
    patience: int = 1000
    min_improve: float = 0.001
    repair: bool = False
    fixed_node: int = -1
    allow_weights: bool = False
    out: str = ""


def config_to_text(cfg):
    lines = []
    for f in fields(cfg):
        lines.append(f"{f.name}={getattr(cfg, f.name)}")
    return "\n".join(lines) + "\n"


def _parse_value(kind, raw):
    if kind is bool:
        low = raw.strip().lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ParameterError(f"expected a boolean, got {raw!r}")
    return kind(raw)


def config_from_text(text, base=None):
    """Parse ``key=value`` lines (``#`` comments and blanks allowed) on top
    of ``base`` (default: all defaults). Unknown keys are errors."""
    cfg = base if base is not None else RunConfig()
    types = {f.name: f.type if isinstance(f.type, type) else type(getattr(cfg, f.name))
             for f in fields(cfg)}
    updates = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParameterError(f"line {ln}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in types:
            raise ParameterError(f"line {ln}: unknown key {key!r}")
        try:
            updates[key] = _parse_value(types[key], value.strip())
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"line {ln}: bad value for {key}: {exc}")
    return replace(cfg, **updates)


def load_config(path, base=None):
    return config_from_text(Path(path).read_text(), base=base)


def config_hash(cfg):
    return hashlib.sha256(config_to_text(cfg).encode()).hexdigest()[:12]


def seed_list(cfg):
    """Parse the seeds field: comma-separated ints, ``a-b`` ranges allowed."""
    out = []
    for part in str(cfg.seeds).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, _, hi = part.partition("-")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ParameterError(f"bad seed range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise ParameterError("no seeds given")
    return out


def parse_triple(text):
    parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) != 3:
        raise ParameterError(f"expected three comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def graph_from_config(cfg):
    """Build or load the instance; returns (graph, source string, degree or
    None). The degree is known only for generated regular graphs and feeds
    the reported cut ratio."""
    picked = [name for name in ("graph", "regular", "queen") if getattr(cfg, name)]
    if len(picked) != 1:
        raise ParameterError(
            f"exactly one of graph/regular/queen must be set, got {picked or 'none'}")
    if cfg.graph:
        return load_graph(cfg.graph, allow_weights=cfg.allow_weights), cfg.graph, None
    if cfg.regular:
        parts = cfg.regular.split(",")
        if len(parts) != 3:
            raise ParameterError(f"--regular wants 'n,d,seed', got {cfg.regular!r}")
        n, d, seed = (int(p) for p in parts)
        return generate_regular(n, d, seed), f"regular({n},{d},{seed})", d
    rows, _, cols = cfg.queen.lower().partition("x")
    try:
        r, c = int(rows), int(cols) if cols else int(rows)
    except ValueError:
        raise ParameterError(f"--queen wants 'RxC', got {cfg.queen!r}")
    return queen_graph(r, c), f"queen({r}x{c})", None


def encoding_from_config(cfg):
    if cfg.problem == "gc":
        return ProblemEncoding(kind="gc", n_colors=cfg.colors)
    if cfg.problem in ("mis", "mc"):
        return ProblemEncoding(kind=cfg.problem, penalty=cfg.penalty)
    raise ParameterError(f"problem must be mis, mc or gc, got {cfg.problem!r}")


def chaotic_from_config(cfg):
    return ChaoticConfig(z0=parse_triple(cfg.z), beta=cfg.beta, i0=cfg.i0,
                         node=None if cfg.fixed_node < 0 else cfg.fixed_node)


def optimizer_from_config(cfg):
    return OptimizerConfig(kind=cfg.opt, lr=cfg.lr if cfg.lr > 0 else None)


@dataclass
class SeedResult:
    seed: int
    report: object
    values: object
    stop_reason: str
    epochs_run: int
    seconds: float
    best_epoch: int
    ratio: object = None


@dataclass
class SolveSummary:
    config: RunConfig
    source: str
    n_nodes: int
    n_edges: int
    rows: list
    best: object            # SeedResult of the winning seed, or None

    @property
    def best_report(self):
        return None if self.best is None else self.best.report


def run_solve(cfg, progress=None):
    """Train once per seed and keep the best assignment.

    With ``cfg.out`` set, writes per-seed ``trajectory.csv`` and
    ``solution.txt``, a shared ``manifest.txt``, and ``summary.csv``. A seed
    that dies numerically is recorded and the remaining seeds still run.
    """
    g, source, degree = graph_from_config(cfg)
    enc = encoding_from_config(cfg)
    chaotic = chaotic_from_config(cfg)
    optimizer = optimizer_from_config(cfg)
    outdir = Path(cfg.out) if cfg.out else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        write_manifest(outdir / "manifest.txt", cfg, {
            "source": source, "n_nodes": g.n_nodes, "n_edges": g.n_edges})

    rows = []
    best = None
    for seed in seed_list(cfg):
        result = train(g, enc, arch=cfg.arch, optimizer=optimizer,
                       chaotic=chaotic, epochs=cfg.epochs, seed=seed,
                       dropout=cfg.dropout, eval_every=cfg.eval_every,
                       patience=cfg.patience, min_improve=cfg.min_improve)
        values, report = result.best_values, result.best_report
        if cfg.repair and enc.kind == "mis" and values is not None:
            values = greedy_repair_mis(values, g)
            report = discrete_objective(enc, values, g)
        ratio = None
        if enc.kind == "mc" and degree is not None and report is not None:
            ratio = approximation_ratio(report.objective, degree, g.n_nodes)
        row = SeedResult(seed=seed, report=report, values=values,
                         stop_reason=result.stop_reason,
                         epochs_run=result.epochs_run, seconds=result.seconds,
                         best_epoch=result.best_epoch, ratio=ratio)
        rows.append(row)
        if report is not None and (best is None or is_better(report, best.report)):
            best = row
        if progress is not None:
            progress(row)
        if outdir is not None:
            seed_dir = outdir / f"seed_{seed}"
            seed_dir.mkdir(exist_ok=True)
            write_trajectory(seed_dir / "trajectory.csv", result.records)
            if values is not None:
                write_solution(seed_dir / "solution.txt", values, report,
                               ratio=ratio)
    summary = SolveSummary(config=cfg, source=source, n_nodes=g.n_nodes,
                           n_edges=g.n_edges, rows=rows, best=best)
    if outdir is not None:
        _write_summary_csv(outdir / "summary.csv", summary)
    return summary


def write_manifest(path, cfg, extra=None):
    """Full config plus environment facts, same key=value format."""
    with open(path, "w") as fh:
        fh.write(config_to_text(cfg))
        fh.write(f"config_hash={config_hash(cfg)}\n")
        fh.write(f"package_version={__version__}\n")
        fh.write(f"kernel_backend={BACKEND}\n")
        for key, value in (extra or {}).items():
            fh.write(f"{key}={value}\n")


def _write_summary_csv(path, summary):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "objective", "violations", "hamiltonian",
                         "ratio", "stop_reason", "epochs_run", "seconds",
                         "best_epoch"])
        for row in summary.rows:
            rep = row.report
            writer.writerow([
                row.seed,
                "" if rep is None else rep.objective,
                "" if rep is None else rep.violations,
                "" if rep is None else rep.hamiltonian,
                "" if row.ratio is None else f"{row.ratio:.6f}",
                row.stop_reason, row.epochs_run, f"{row.seconds:.3f}",
                row.best_epoch])
