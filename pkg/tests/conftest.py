import itertools

import numpy as np
import pytest

from gafusion.energy import evaluate
from gafusion.model import DiscreteEnergy


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_energy(
    rng: np.random.Generator,
    node_count: int,
    label_count: int,
    edge_probability: float = 0.5,
    coupling: float = 1.0,
    scale: float = 1.0,
) -> DiscreteEnergy:
    """Random energy on an Erdos-Renyi style graph with N(0, scale) tables."""
    edges = [
        (p, q)
        for p, q in itertools.combinations(range(node_count), 2)
        if rng.random() < edge_probability
    ]
    return DiscreteEnergy.from_tables(
        node_count,
        edges,
        rng.normal(0.0, scale, size=(node_count, label_count)),
        rng.normal(0.0, scale, size=(len(edges), label_count, label_count)),
        coupling=coupling,
    )


def random_submodular_binary(rng: np.random.Generator, node_count: int) -> DiscreteEnergy:
    """Binary energy whose every pairwise term is submodular."""
    edges = [
        (p, q)
        for p, q in itertools.combinations(range(node_count), 2)
        if rng.random() < 0.5
    ]
    tables = rng.normal(size=(len(edges), 2, 2))
    excess = tables[:, 0, 0] + tables[:, 1, 1] - tables[:, 0, 1] - tables[:, 1, 0]
    tables[:, 0, 1] += np.maximum(excess, 0) + rng.random(len(edges))
    return DiscreteEnergy.from_tables(node_count, edges, rng.normal(size=(node_count, 2)), tables)


def random_tree(rng: np.random.Generator, node_count: int, label_count: int) -> DiscreteEnergy:
    edges = [(int(rng.integers(0, q)), q) for q in range(1, node_count)]
    return DiscreteEnergy.from_tables(
        node_count,
        edges,
        rng.normal(size=(node_count, label_count)),
        rng.normal(size=(len(edges), label_count, label_count)),
    )


def all_labelings(node_count: int, label_count: int):
    return (np.array(x) for x in itertools.product(range(label_count), repeat=node_count))


def exhaustive_min(energy: DiscreteEnergy) -> float:
    return min(evaluate(energy, x) for x in all_labelings(energy.node_count, energy.label_count))


def potts(label_count: int, weight: float = 1.0) -> np.ndarray:
    return weight * (1.0 - np.eye(label_count))


def grid_potts(side: int, unary, weight: float = 1.0) -> DiscreteEnergy:
    edges = []
    for y in range(side):
        for x in range(side):
            p = y * side + x
            if x + 1 < side:
                edges.append((p, p + 1))
            if y + 1 < side:
                edges.append((p, p + side))
    unary = np.asarray(unary, dtype=np.float64)
    tables = np.broadcast_to(potts(unary.shape[1], weight), (len(edges),) + (unary.shape[1],) * 2)
    return DiscreteEnergy.from_tables(side * side, edges, unary, tables)
