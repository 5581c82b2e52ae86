import math
from typing import Callable, List, NamedTuple, Optional, TypeVar

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from .energy import check_labeling, evaluate
from .exceptions import CyclicTopologyError, InvalidInputError
from .logger import logger as log
from .model import DiscreteEnergy
from .moves import apply_partial, build_expansion
from .qpbo import labeling_rate, qpbo_solve

EnergyT = TypeVar("EnergyT", bound=DiscreteEnergy)

# on_step(alpha, rho, labeling_rate) observer of OptimizeGA inner steps
StepObserver = Callable[[int, float, float], None]


class EdgeSubset(BaseModel):
    """Kept-edge indices into a parent topology, sorted ascending."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    indices: np.ndarray

    @field_validator("indices", mode="before")
    @classmethod
    def _as_indices(cls, value) -> np.ndarray:
        indices = np.sort(np.array(value, dtype=np.int64).reshape(-1))
        if len(indices) and (indices[0] < 0 or np.any(np.diff(indices) == 0)):
            raise ValueError("edge indices must be non-negative and unique")
        indices.setflags(write=False)
        return indices

    def __len__(self) -> int:
        return len(self.indices)


def subset_size(edge_count: int, rho: float) -> int:
    """round(rho * edge_count), halves rounded up."""
    return int(math.floor(rho * edge_count + 0.5))


def approximate_edges(edge_count: int, rho: float, rng: np.random.Generator) -> EdgeSubset:
    if not 0.0 <= rho <= 1.0:
        raise InvalidInputError(f"rho must lie in [0, 1], got {rho}")
    size = subset_size(edge_count, rho)
    return EdgeSubset(indices=rng.permutation(edge_count)[:size])


def restrict_energy(energy: EnergyT, subset: EdgeSubset) -> EnergyT:
    """The energy with only the pairwise terms of ``subset`` kept."""
    if len(subset) and subset.indices[-1] >= energy.edge_count:
        raise InvalidInputError("edge subset does not fit the energy's topology")
    return energy.restrict(subset.indices)


def optimize_ga(
    energy: DiscreteEnergy,
    x,
    K: int,
    rng: np.random.Generator,
    approx_rng: Optional[np.random.Generator] = None,
    rho: Optional[float] = None,
    alpha: Optional[int] = None,
    on_step: Optional[StepObserver] = None,
) -> np.ndarray:
    """K expansion moves, each solved by QPBO on a randomly edge-approximated
    expansion energy with unlabeled nodes kept at their current label.

    The expansion label is drawn uniformly from ``rng`` unless ``alpha`` pins
    it; rho ~ U(0, 1) and the kept edges come from ``approx_rng`` unless
    ``rho`` pins the kept fraction. The original energy may go up along the way.
    """
    if K < 1:
        raise InvalidInputError(f"K must be at least 1, got {K}")
    if approx_rng is None:
        approx_rng = rng

    x = check_labeling(energy, x)
    for _ in range(K):
        step_alpha = int(rng.integers(energy.label_count)) if alpha is None else alpha
        binary = build_expansion(energy, x, step_alpha)

        step_rho = float(approx_rng.random()) if rho is None else rho
        subset = approximate_edges(energy.edge_count, step_rho, approx_rng)
        partial, _ = qpbo_solve(restrict_energy(binary, subset))

        x = apply_partial(x, np.full(energy.node_count, step_alpha), partial)
        rate = labeling_rate(partial)
        log.debug(
            f"OptimizeGA step alpha={step_alpha} rho={step_rho:.3f} "
            f"kept {len(subset)}/{energy.edge_count} edges, labeling rate {rate:.3f}"
        )
        if on_step is not None:
            on_step(step_alpha, step_rho, rate)

    return x


def _graph(energy: DiscreteEnergy, weights=None) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(energy.node_count))
    for e, (p, q) in enumerate(energy.edges.tolist()):
        if weights is None:
            graph.add_edge(p, q, index=e)
        else:
            graph.add_edge(p, q, index=e, weight=float(weights[e]))
    return graph


def spanning_forest(energy: DiscreteEnergy, rng: np.random.Generator) -> EdgeSubset:
    """Minimum spanning forest under i.i.d. U(0, 1) edge weights."""
    weights = rng.random(energy.edge_count)
    forest = nx.minimum_spanning_edges(
        _graph(energy, weights), algorithm="kruskal", weight="weight", data=True
    )
    return EdgeSubset(indices=[data["index"] for _, _, data in forest])


# relative slack under which two min-marginals count as tied
TIE_TOLERANCE = 1e-9


def _min_marginals(tree_edges, unary: np.ndarray) -> np.ndarray:
    """Min-marginals of a forest energy. ``tree_edges`` lists (parent, child,
    table) in breadth-first order with tables indexed [parent label, child label]."""
    up = unary.copy()
    to_parent = {}
    for parent, child, table in reversed(tree_edges):
        message = np.min(table + up[child][None, :], axis=1)
        to_parent[child] = message
        up[parent] += message

    full = up.copy()
    for parent, child, table in tree_edges:
        # messages are finite, so clamped (infinite) labels stay infinite
        rest = full[parent] - to_parent[child]
        full[child] = up[child] + np.min(table + rest[:, None], axis=0)
    return full


def tree_optimize(energy: DiscreteEnergy) -> np.ndarray:
    """Exact minimizer of an energy on a forest by min-sum dynamic programming.

    Among optimal labelings the lexicographically smallest one (node 0 most
    significant) is returned: while some node has several optimal labels, the
    smallest such node of each component is clamped to its smallest optimal
    label and the min-marginals are recomputed.
    """
    graph = _graph(energy)
    if not nx.is_forest(graph):
        raise CyclicTopologyError("tree dynamic programming needs an acyclic topology")

    theta = energy.folded_pairwise()
    tree_edges = []
    component = np.zeros(energy.node_count, dtype=np.int64)
    for index, nodes in enumerate(nx.connected_components(graph)):
        root = min(nodes)
        component[list(nodes)] = index
        for parent, child in nx.bfs_edges(graph, root):
            e = graph[parent][child]["index"]
            table = theta[e] if energy.edges[e, 0] == parent else theta[e].T
            tree_edges.append((parent, child, table))

    unary = energy.unary.astype(np.float64)
    clamped = np.zeros(energy.node_count, dtype=bool)
    while True:
        full = _min_marginals(tree_edges, unary)
        best = full.min(axis=1, keepdims=True)
        optimal = full <= best + TIE_TOLERANCE * np.maximum(1.0, np.abs(best))
        tied = (optimal.sum(axis=1) > 1) & ~clamped
        if not tied.any():
            return np.argmin(full, axis=1).astype(np.int64)

        # components are independent, so one clamp per component per round
        _, first = np.unique(component[tied], return_index=True)
        for v in np.flatnonzero(tied)[first].tolist():
            label = int(np.argmax(optimal[v]))
            unary[v, :] = np.inf
            unary[v, label] = energy.unary[v, label]
            clamped[v] = True
        log.debug(f"tree DP clamped {len(first)} tied nodes")


def st_proposal(energy: DiscreteEnergy, rng: np.random.Generator) -> np.ndarray:
    """Exact minimizer of the energy restricted to a random spanning forest."""
    forest = spanning_forest(energy, rng)
    log.debug(f"spanning forest keeps {len(forest)}/{energy.edge_count} edges")
    return tree_optimize(restrict_energy(energy, forest))


def random_proposal(node_count: int, L: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, L, size=node_count, dtype=np.int64)


class ProposalSample(NamedTuple):
    kept_fraction: float
    energy: float


def ga_proposal_study(
    energy: DiscreteEnergy, x, count: int, rng: np.random.Generator
) -> List[ProposalSample]:
    """Proposals from alpha-expansion over every label on randomly
    approximated energies, all started from ``x``."""
    x = check_labeling(energy, x)
    samples = []
    for _ in range(count):
        rho = float(rng.random())
        subset = approximate_edges(energy.edge_count, rho, rng)
        approximated = restrict_energy(energy, subset)

        proposal = x
        for alpha in range(energy.label_count):
            partial, _ = qpbo_solve(build_expansion(approximated, proposal, alpha))
            proposal = apply_partial(proposal, np.full(energy.node_count, alpha), partial)

        samples.append(
            ProposalSample(len(subset) / max(energy.edge_count, 1), evaluate(energy, proposal))
        )
    return samples


def st_proposal_study(
    energy: DiscreteEnergy, count: int, rng: np.random.Generator
) -> List[ProposalSample]:
    samples = []
    for _ in range(count):
        forest = spanning_forest(energy, rng)
        proposal = tree_optimize(restrict_energy(energy, forest))
        samples.append(
            ProposalSample(len(forest) / max(energy.edge_count, 1), evaluate(energy, proposal))
        )
    return samples
