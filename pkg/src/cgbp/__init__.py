"""Chaotic graph backpropagation for combinatorial optimization.

Trains small graph networks whose output distribution encodes a relaxed
Hamiltonian of the problem (independent set, max cut, coloring, or a generic
QUBO); a decaying chaotic term added to the weight updates lets the dynamics
search globally before annealing into plain gradient descent.
"""

__version__ = "0.1.0"

from .graph import (Graph, from_edges, generate_regular, load_dimacs_col,
                    load_graph, load_gset, queen_graph, save_dimacs_col,
                    save_gset)
from .hamiltonians import (ObjectiveReport, ProblemEncoding, brute_force,
                           discrete_objective, is_better, loss_and_grad)
from .kernels import BACKEND
from .model import (Model, init_model, load_checkpoint, make_aggregator,
                    network_backward, network_forward, save_checkpoint)
from .projection import (approximation_ratio, cut_upper_bound,
                         greedy_repair_mis, project_argmax, project_binary,
                         project_values)
from .run import RunConfig, run_solve
from .training import (ChaoticConfig, OptimizerConfig, TrainResult, train,
                       write_trajectory)

__all__ = [
    "BACKEND", "ChaoticConfig", "Graph", "Model", "ObjectiveReport",
    "OptimizerConfig", "ProblemEncoding", "RunConfig", "TrainResult",
    "approximation_ratio", "brute_force", "cut_upper_bound",
    "discrete_objective", "from_edges", "generate_regular",
    "greedy_repair_mis", "init_model", "is_better", "load_checkpoint",
    "load_dimacs_col", "load_graph", "load_gset", "loss_and_grad",
    "make_aggregator", "network_backward", "network_forward",
    "project_argmax", "project_binary", "project_values", "queen_graph",
    "run_solve", "save_checkpoint", "save_dimacs_col", "save_gset", "train",
    "write_trajectory",
]
