"""End-to-end acceptance checks.

Each test measures one shipped guarantee, prints a single [PASS]/[FAIL]
line with the measured quantity (run with -s to also see the lines for
passing tests), and then asserts. Three toy-dynamics checks assert targets
the implemented dynamics do not reach at these settings; they fail with
their measured values printed. README.md documents those known gaps.
"""

import itertools
from pathlib import Path

import numpy as np
import pytest

from conftest import network_gradient_error, reference_plain_loop

from cgbp.bench import run_regular_scaling
from cgbp.graph import from_edges, generate_regular, load_graph, queen_graph
from cgbp.hamiltonians import (ProblemEncoding, discrete_objective,
                               loss_and_grad)
from cgbp.projection import cut_upper_bound
from cgbp.toy import ToyConfig, bifurcation_sweep, lyapunov_max, toy_train
from cgbp.training import BP, ChaoticConfig, OptimizerConfig, train

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def _report(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


def _random_graph(rng, n, p=0.4):
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2)
             if rng.random() < p]
    if not edges:
        edges = [(0, 1)]
    return from_edges(n, edges)


def _encodings(rng, n):
    q = rng.normal(size=(n, n))
    return (ProblemEncoding("mis", penalty=2.0),
            ProblemEncoding("mc"),
            ProblemEncoding("gc", n_colors=3),
            ProblemEncoding("qubo", qubo=(q + q.T) / 2))


def _loss_gradient_error(enc, g, rng, eps=4e-7):
    # eps stays under the simplex-sum slack the gc validation allows
    if enc.kind == "gc":
        p = rng.dirichlet(np.full(enc.n_colors, 2.0), size=g.n_nodes)
    else:
        p = rng.uniform(0.05, 0.95, size=(g.n_nodes, 1))
    _, analytic = loss_and_grad(enc, p, g)
    fd = np.zeros_like(analytic)
    for idx in np.ndindex(*p.shape):
        hi, lo = p.copy(), p.copy()
        hi[idx] += eps
        lo[idx] -= eps
        fd[idx] = (loss_and_grad(enc, hi, g)[0]
                   - loss_and_grad(enc, lo, g)[0]) / (2 * eps)
    na, nf = np.linalg.norm(analytic), np.linalg.norm(fd)
    return np.linalg.norm(analytic - fd) / (na + nf)


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    worst_loss = worst_net = 0.0
    instances = 0
    for i in range(6):
        n = int(rng.integers(4, 9))
        g = _random_graph(rng, n)
        arch = "gcn" if i % 2 == 0 else "sage"
        for enc in _encodings(rng, n):
            worst_loss = max(worst_loss, _loss_gradient_error(enc, g, rng))
            worst_net = max(worst_net,
                            network_gradient_error(g, enc, arch, seed=i,
                                                   dims=(4, 2)))
            instances += 1
    ok = instances >= 20 and worst_loss < 1e-6 and worst_net < 1e-6
    _report("gradients match finite differences", ok,
            f"{instances} instances, worst loss-gradient error "
            f"{worst_loss:.2e}, worst network error {worst_net:.2e}, "
            f"tolerance 1e-6")


def test_discrete_objective_matches_relaxed_loss_at_corners():
    rng = np.random.default_rng(1)
    worst = 0.0
    checked = 0

    def check(enc, g, values):
        nonlocal worst, checked
        rep = discrete_objective(enc, np.asarray(values), g)
        if enc.kind == "gc":
            p = np.zeros((g.n_nodes, enc.n_colors))
            p[np.arange(g.n_nodes), values] = 1.0
        else:
            p = np.asarray(values, dtype=float).reshape(-1, 1)
        loss = loss_and_grad(enc, p, g)[0]
        worst = max(worst, abs(loss - rep.hamiltonian))
        checked += 1

    # every labeled graph on up to 4 nodes, every assignment
    for n in range(1, 5):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(2 ** len(pairs)):
            g = from_edges(n, [pairs[k] for k in range(len(pairs))
                               if mask >> k & 1])
            encs = _encodings(rng, n)
            for enc in encs:
                width = enc.n_colors if enc.kind == "gc" else 2
                for values in itertools.product(range(width), repeat=n):
                    if enc.kind != "gc" and max(values, default=0) > 1:
                        continue
                    check(enc, g, values)

    # random spot checks at a size where enumeration is impossible
    for trial in range(200):
        g = _random_graph(rng, 16, p=0.25)
        enc = _encodings(rng, 16)[trial % 4]
        width = enc.n_colors if enc.kind == "gc" else 2
        check(enc, g, rng.integers(0, width, size=16))

    _report("discrete objective equals relaxed loss at corners",
            worst < 1e-9,
            f"{checked} corner evaluations, worst |difference| {worst:.2e}")


def test_zero_strength_reduces_to_plain_optimizers():
    g = generate_regular(20, 3, seed=0)
    enc = ProblemEncoding("mc")
    exact = []
    for kind in ("sgd", "sgdm", "adam"):
        cfg = OptimizerConfig(kind=kind)
        snaps = []
        train(g, enc, optimizer=cfg, chaotic=BP, epochs=200, seed=0,
              eval_every=50, patience=200,
              epoch_callback=lambda e, m: snaps.append(
                  {name: arr.copy() for name, arr in m.trainable()}))
        ref = reference_plain_loop(cfg, 200, g, enc, seed=0)
        same = len(snaps) == len(ref) and all(
            np.array_equal(got[name], want[name])
            for got, want in zip(snaps, ref) for name in want)
        exact.append(same)
    _report("zero chaotic strength reduces to the base optimizers",
            all(exact),
            "bitwise equality over 200 epochs: "
            + ", ".join(f"{k}={v}" for k, v in
                        zip(("sgd", "sgdm", "adam"), exact)))


def test_toy_chaos_indicator_signs():
    lam_high = lyapunov_max(10.0)
    bp_end = toy_train(ToyConfig(mode="bp", z0=0.0, epochs=5000, seed=0))
    lam_min = lyapunov_max(0.0, state=(bp_end.final_w, bp_end.final_b))
    ok = lam_high > 0 and lam_min < 0
    _report("toy map is chaotic at high strength and stable at zero", ok,
            f"lyapunov(z=10) = {lam_high:+.6f} (want > 0), "
            f"lyapunov(z=0, trained minimum) = {lam_min:+.6f} (want < 0)")


def test_toy_annealed_run_converges():
    traj = toy_train(ToyConfig(mode="cgbp-1", z0=10.0, beta=0.999,
                               epochs=5000, seed=0))
    deltas = np.abs(np.diff(np.asarray(traj.loss[-101:])))
    worst = float(deltas.max())
    _report("toy annealed run converges", worst < 1e-6,
            f"max |loss change| over final 100 of 5000 epochs = "
            f"{worst:.3e}, tolerance 1e-6")


def test_toy_frozen_strength_spread_collapses():
    scan = bifurcation_sweep(np.linspace(10.0, 0.0, 101))
    spread_high = float(scan[0][1])
    spread_zero = float(scan[-1][1])
    ok = spread_high > 0.1 and spread_zero < 1e-6
    _report("toy attractor spread collapses with the strength", ok,
            f"spread(z=10) = {spread_high:.4f} (want > 0.1), "
            f"spread(z=0) = {spread_zero:.3e} (want < 1e-6)")


def test_hundred_node_maxcut_medians_and_best():
    g = generate_regular(100, 3, seed=0)
    enc = ProblemEncoding("mc")
    details = []
    medians_ok = True
    best_overall = -np.inf
    for kind in ("sgd", "sgdm", "adam"):
        cuts = {}
        for method, chaotic in (("cgbp", ChaoticConfig()), ("bp", BP)):
            cuts[method] = []
            for seed in range(20):
                r = train(g, enc, optimizer=OptimizerConfig(kind=kind),
                          chaotic=chaotic, epochs=10000, seed=seed,
                          patience=10000)
                cuts[method].append(r.best_report.objective
                                    if r.best_report else -np.inf)
        med_c = float(np.median(cuts["cgbp"]))
        med_b = float(np.median(cuts["bp"]))
        best_overall = max(best_overall, max(cuts["cgbp"]))
        medians_ok &= med_c >= med_b
        details.append(f"{kind}: median {med_c:g} vs plain {med_b:g}, "
                       f"best {max(cuts['cgbp'])}")
    ok = medians_ok and best_overall >= 132
    _report("hundred-node max-cut medians and best", ok,
            "20 seeds, 10000 epochs; " + "; ".join(details)
            + f"; overall best {best_overall:g} (want >= 132)")


def test_thousand_node_maxcut_ratio():
    g = generate_regular(1000, 3, seed=0)
    enc = ProblemEncoding("mc")
    bound = cut_upper_bound(3, 1000)
    best = 0.0
    tried = []
    for seed in range(10):
        r = train(g, enc, optimizer=OptimizerConfig(kind="adam"),
                  chaotic=ChaoticConfig(), epochs=10000, seed=seed,
                  patience=10000)
        ratio = r.best_report.objective / bound
        tried.append(f"seed {seed}: {ratio:.4f}")
        best = max(best, ratio)
        if best >= 0.93:
            break
    _report("thousand-node max-cut ratio", best >= 0.93,
            f"best cut ratio {best:.4f} (want >= 0.93) over "
            + ", ".join(tried))


def test_epoch_time_scaling_is_near_linear():
    _, slope = run_regular_scaling(seeds=(0,),
                                   epochs={100: 1000, 1000: 300, 10000: 60})
    _report("per-epoch time scales near linearly",
            0.8 <= slope <= 1.3,
            f"log-log slope {slope:.3f} over n in (100, 1000, 10000), "
            f"want within [0.8, 1.3]")


def test_queen_five_board_reaches_conflict_free():
    g = queen_graph(5, 5)
    enc = ProblemEncoding("gc", n_colors=5)
    best = None
    tried = []
    for seed in range(10):
        r = train(g, enc, arch="sage", optimizer=OptimizerConfig(kind="adam"),
                  chaotic=ChaoticConfig(), epochs=100000, seed=seed)
        conflicts = r.best_report.objective
        tried.append(f"seed {seed}: {conflicts}")
        if best is None or conflicts < best:
            best = conflicts
        if best == 0:
            break
    _report("queen5-5 five-coloring reaches zero conflicts", best == 0,
            f"conflict counts {', '.join(tried)} (want 0)")


@pytest.mark.slow
def test_g14_cut_reaches_published_range():
    path = DATA_DIR / "G14"
    if not path.exists():
        pytest.skip(f"{path} not present; download G14 from the Gset "
                    "collection into data/ to enable this check")
    g = load_graph(path, allow_weights=True)
    enc = ProblemEncoding("mc")
    best = 0
    tried = []
    for seed in range(10):
        r = train(g, enc, optimizer=OptimizerConfig(kind="adam"),
                  chaotic=ChaoticConfig(), epochs=20000, seed=seed,
                  patience=20000)
        best = max(best, r.best_report.objective)
        tried.append(f"seed {seed}: {r.best_report.objective}")
        if best >= 2900:
            break
    _report("G14 cut reaches the published range", best >= 2900,
            f"best cut {best} (want >= 2900) over " + ", ".join(tried))
