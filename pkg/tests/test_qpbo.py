import numpy as np
import pytest

from gafusion.energy import evaluate
from gafusion.exceptions import InvalidInputError
from gafusion.model import UNLABELED, DiscreteEnergy
from gafusion.qpbo import complete_partial, labeling_rate, qpbo_solve

from conftest import exhaustive_min, random_energy, random_submodular_binary


def test_single_node():
    partial, lower_bound = qpbo_solve(DiscreteEnergy.from_tables(1, [], [[0.0, 5.0]], []))
    assert partial.tolist() == [0]
    assert lower_bound == 0.0


def test_lower_bound_with_cheaper_label_one():
    partial, lower_bound = qpbo_solve(DiscreteEnergy.from_tables(1, [], [[-1.0, -2.0]], []))
    assert partial.tolist() == [1]
    assert lower_bound == -2.0


def test_lower_bound_never_exceeds_minimum(rng):
    for _ in range(300):
        node_count = int(rng.integers(1, 7))
        energy = random_energy(rng, node_count, 2, edge_probability=0.6)
        integer = DiscreteEnergy.from_tables(
            node_count,
            energy.edges,
            rng.integers(-4, 5, size=(node_count, 2)),
            rng.integers(-4, 5, size=(energy.edge_count, 2, 2)),
        )
        assert qpbo_solve(integer).lower_bound <= exhaustive_min(integer) + 1e-9


def test_submodular_pair():
    energy = DiscreteEnergy.from_tables(2, [(0, 1)], [[0, 2], [3, 0]], [[[0, 1], [1, 0]]])
    partial, lower_bound = qpbo_solve(energy)
    assert partial.tolist() == [0, 1]
    assert evaluate(energy, partial) == 1.0
    assert lower_bound == pytest.approx(1.0)


def test_frustrated_tie_leaves_nodes_unlabeled():
    energy = DiscreteEnergy.from_tables(2, [(0, 1)], np.zeros((2, 2)), [[[1, 0], [0, 1]]])
    partial, lower_bound = qpbo_solve(energy)
    assert partial.tolist() == [UNLABELED, UNLABELED]
    assert lower_bound <= 0.0 + 1e-12


def test_rejects_multilabel():
    with pytest.raises(InvalidInputError):
        qpbo_solve(DiscreteEnergy.from_tables(1, [], [[0, 1, 2]], []))


def test_labeling_rate():
    assert labeling_rate([0, 1, 1]) == 1.0
    assert labeling_rate([UNLABELED, UNLABELED]) == 0.0
    assert labeling_rate([0, UNLABELED, 1, 1]) == 0.75
    assert labeling_rate([]) == 1.0


def test_complete_partial():
    assert complete_partial([1, UNLABELED, 0]).tolist() == [1, 0, 0]
    assert complete_partial([UNLABELED], fill=1).tolist() == [1]


def test_submodular_energies_are_solved_exactly(rng):
    for _ in range(60):
        energy = random_submodular_binary(rng, int(rng.integers(1, 11)))
        partial, lower_bound = qpbo_solve(energy)
        assert labeling_rate(partial) == 1.0
        best = exhaustive_min(energy)
        assert evaluate(energy, partial) == pytest.approx(best, abs=1e-9)
        assert lower_bound == pytest.approx(best, abs=1e-9)


def test_autarky_and_lower_bound(rng):
    for _ in range(100):
        node_count = int(rng.integers(1, 9))
        energy = random_energy(rng, node_count, 2, edge_probability=0.6)
        partial, lower_bound = qpbo_solve(energy)
        labeled = partial != UNLABELED

        assert lower_bound <= exhaustive_min(energy) + 1e-9
        for _ in range(20):
            reference = rng.integers(0, 2, size=node_count)
            overwritten = np.where(labeled, partial, reference)
            assert evaluate(energy, overwritten) <= evaluate(energy, reference) + 1e-9


def test_invariant_under_table_constants(rng):
    node_count = 7
    edges = [(0, 1), (0, 3), (1, 2), (2, 5), (3, 4), (4, 6), (5, 6), (1, 4)]
    unary = rng.integers(-4, 5, size=(node_count, 2)).astype(float)
    tables = rng.integers(-4, 5, size=(len(edges), 2, 2)).astype(float)
    energy = DiscreteEnergy.from_tables(node_count, edges, unary, tables)

    shifted_tables = tables.copy()
    shifted_tables[2] += 3.0
    shifted_unary = unary.copy()
    shifted_unary[5] -= 2.0
    shifted = DiscreteEnergy.from_tables(node_count, edges, shifted_unary, shifted_tables)

    first, second = qpbo_solve(energy), qpbo_solve(shifted)
    assert np.array_equal(first.partial, second.partial)
    assert second.lower_bound == pytest.approx(first.lower_bound + 1.0)
