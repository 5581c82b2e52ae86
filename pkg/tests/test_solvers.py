import json

import numpy as np
import pytest

from gafusion.energy import evaluate, separable_optimum
from gafusion.exceptions import (InvalidInputError, ProblemTooLargeError,
                                 SpecValidationError)
from gafusion.model import DiscreteEnergy
from gafusion.proposals import tree_optimize
from gafusion.solver import SolverFactory
from gafusion.solvers import (AlphaExpansion, GAFusion, QPBOOnly, RandomFusion,
                              SolverConfig, STFusion, alpha_expansion,
                              brute_force_min, ga_fusion, qpbo_only,
                              random_fusion, st_fusion)
from gafusion.solvers.model import TRACE_HEADER

from conftest import all_labelings, grid_potts, random_energy, random_tree


def config(**settings) -> SolverConfig:
    settings.setdefault("max_iterations", 60)
    return SolverConfig.build(**settings)


def test_config_needs_a_budget():
    with pytest.raises(SpecValidationError):
        SolverConfig.build()
    assert SolverConfig.build(time_budget=1.5).max_iterations is None


@pytest.mark.parametrize(
    "settings",
    [
        {"algorithm": "icm"},
        {"seed": -1},
        {"seed": 2**64},
        {"convergence_window": 0},
        {"fixed_rho": 1.5},
        {"expansion_steps": 0},
        {"initial": "ones"},
    ],
)
def test_config_rejects_bad_settings(settings):
    with pytest.raises(SpecValidationError):
        SolverConfig.build(max_iterations=10, **settings)


def test_config_from_profile(tmp_path):
    profile = tmp_path / "profile.json"
    profile.write_text(json.dumps({"algorithm": "st", "time_budget": 2.0, "seed": 4}))

    loaded = SolverConfig.from_profile(profile, seed=None, convergence_window=5)
    assert loaded.algorithm == "st"
    assert loaded.seed == 4
    assert loaded.convergence_window == 5
    assert SolverConfig.from_profile(profile, seed=9).seed == 9


@pytest.mark.parametrize(
    "algorithm, cls",
    [
        ("ga", GAFusion),
        ("st", STFusion),
        ("random", RandomFusion),
        ("expansion", AlphaExpansion),
        ("expansion-trunc", AlphaExpansion),
        ("qpbo", QPBOOnly),
    ],
)
def test_factory(algorithm, cls):
    solver = SolverFactory.from_algorithm(algorithm, max_iterations=3)
    assert isinstance(solver, cls)
    assert solver.name == algorithm


def test_factory_validates():
    with pytest.raises(SpecValidationError):
        SolverFactory.from_algorithm("ga")


@pytest.mark.parametrize("algorithm", ["ga", "st", "random", "expansion", "expansion-trunc"])
def test_traces_are_deterministic(algorithm):
    energy = random_energy(np.random.default_rng(11), 12, 3)
    runs = [
        SolverFactory.from_config(config(algorithm=algorithm, seed=5)).minimize(energy)
        for _ in range(2)
    ]
    assert np.array_equal(runs[0][0], runs[1][0])
    assert runs[0][1].csv_rows(timing=False) == runs[1][1].csv_rows(timing=False)


def test_seed_changes_ga_run():
    energy = random_energy(np.random.default_rng(11), 12, 4)
    first = ga_fusion(energy, config(seed=1))[1]
    second = ga_fusion(energy, config(seed=2))[1]
    assert [r.alpha for r in first.records] != [r.alpha for r in second.records]


@pytest.mark.parametrize("algorithm", ["ga", "st", "random", "expansion", "expansion-trunc"])
def test_traces_never_increase(rng, algorithm):
    for _ in range(5):
        energy = random_energy(rng, 15, 4, edge_probability=0.3)
        labels, trace = SolverFactory.from_config(
            config(algorithm=algorithm, max_iterations=100)
        ).minimize(energy)

        assert trace.is_non_increasing()
        assert trace.records[0].iteration == 0
        assert trace.final_energy == evaluate(energy, labels)
        assert trace.final_labeling == labels.tolist()


def test_zero_pairwise_gives_separable_optimum(rng):
    energy = grid_potts(4, rng.random((16, 3)), weight=0.0)
    best = separable_optimum(energy)

    assert np.array_equal(ga_fusion(energy, config(max_iterations=200))[0], best)
    assert np.array_equal(st_fusion(energy, config())[0], best)
    assert np.array_equal(alpha_expansion(energy, config())[0], best)
    assert np.array_equal(
        random_fusion(energy, config(max_iterations=300, convergence_window=1000))[0], best
    )


def test_ga_fusion_stops_after_convergence_window(rng):
    energy = grid_potts(3, rng.random((9, 2)), weight=0.0)
    _, trace = ga_fusion(energy, config(max_iterations=500, convergence_window=7))
    energies = trace.energies()
    assert len(trace.records) < 501
    assert all(e == energies[-1] for e in energies[-8:])


def test_ga_fusion_records_inner_steps(rng):
    energy = random_energy(rng, 10, 4)
    _, trace = ga_fusion(energy, config(max_iterations=10, expansion_steps=2, fixed_rho=0.25))
    for record in trace.records[1:]:
        assert len(record.alpha) == 2
        assert record.rho == (0.25, 0.25)
        assert record.proposal_energy is not None
        assert 0.0 <= record.labeling_rate <= 1.0


def test_ga_fusion_default_steps(rng):
    two_labels = random_energy(rng, 6, 2)
    _, trace = ga_fusion(two_labels, config(max_iterations=3))
    assert all(len(record.alpha) == 2 for record in trace.records[1:])

    eight_labels = random_energy(rng, 6, 8)
    _, trace = ga_fusion(eight_labels, config(max_iterations=3))
    assert all(len(record.alpha) == 5 for record in trace.records[1:])


def test_iteration_cap(rng):
    energy = random_energy(rng, 10, 3)
    _, trace = random_fusion(energy, config(max_iterations=4, convergence_window=100))
    assert [record.iteration for record in trace.records] == [0, 1, 2, 3, 4]


def test_initial_labeling_policies(rng):
    energy = random_energy(rng, 10, 3)
    _, trace = st_fusion(energy, config(initial="unary", max_iterations=1))
    assert trace.records[0].energy == evaluate(energy, separable_optimum(energy))

    solver = GAFusion(config(max_iterations=1))
    _, trace = solver.minimize(energy, initial=np.full(10, 2))
    assert trace.records[0].energy == evaluate(energy, np.full(10, 2))

    with pytest.raises(InvalidInputError):
        solver.minimize(energy, initial=[0, 1])


def test_st_fusion_on_tree_reaches_optimum(rng):
    energy = random_tree(rng, 8, 3)
    labels, _ = st_fusion(energy, config(max_iterations=5))
    assert evaluate(energy, labels) == pytest.approx(brute_force_min(energy)[1], abs=1e-9)


def test_expansion_is_locally_optimal(rng):
    energy = grid_potts(3, rng.random((9, 3)), weight=0.6)
    labels, trace = alpha_expansion(energy, config(max_iterations=1000))
    final = evaluate(energy, labels)
    for alpha in range(3):
        for y in all_labelings(9, 2):
            assert evaluate(energy, np.where(y == 1, alpha, labels)) >= final - 1e-9
    assert all(len(record.alpha) == 1 for record in trace.records[1:])


def test_expansion_on_pure_potts():
    energy = grid_potts(3, np.zeros((9, 3)), weight=1.0)
    labels, _ = alpha_expansion(energy, config())
    assert evaluate(energy, labels) == 0.0
    assert len(set(labels.tolist())) == 1


def test_truncated_expansion_trace(rng):
    energy = random_energy(rng, 10, 3, edge_probability=0.5)
    _, trace = alpha_expansion(energy, config(), mode="truncate")
    assert trace.algorithm == "expansion-trunc"
    assert trace.is_non_increasing()


def test_qpbo_only(rng):
    energy = random_energy(rng, 8, 2)
    labels, trace = qpbo_only(energy, config(max_iterations=1))
    assert len(trace.records) == 2
    assert trace.final_energy <= trace.records[0].energy
    assert trace.records[1].lower_bound <= brute_force_min(energy)[1] + 1e-9

    with pytest.raises(InvalidInputError):
        qpbo_only(random_energy(rng, 3, 3), config())


def test_brute_force_single_node():
    energy = DiscreteEnergy.from_tables(1, [], [[2.0, 1.0, 3.0]], [])
    labels, value = brute_force_min(energy)
    assert labels.tolist() == [1]
    assert value == 1.0


def test_brute_force_potts_square():
    unary = [[0, 3], [3, 0], [0, 3], [3, 0]]
    labels, value = brute_force_min(grid_potts(2, unary))
    assert labels.tolist() == [0, 1, 0, 1]
    assert value == 2.0


def test_brute_force_lexicographic_tie_break():
    energy = DiscreteEnergy.from_tables(3, [], np.zeros((3, 2)), [])
    assert brute_force_min(energy)[0].tolist() == [0, 0, 0]


def test_brute_force_size_guard():
    energy = DiscreteEnergy.from_tables(8, [], np.zeros((8, 10)), [])
    with pytest.raises(ProblemTooLargeError):
        brute_force_min(energy)


def test_brute_force_matches_tree_optimize(rng):
    for _ in range(20):
        energy = random_tree(rng, int(rng.integers(1, 8)), 3)
        assert brute_force_min(energy)[1] == pytest.approx(
            evaluate(energy, tree_optimize(energy)), abs=1e-9
        )


def test_trace_csv(tmp_path, rng):
    energy = random_energy(rng, 6, 3)
    _, trace = ga_fusion(energy, config(max_iterations=2, expansion_steps=2, fixed_rho=0.5))
    path = trace.to_csv(tmp_path / "trace.csv", timing=False)

    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(TRACE_HEADER)
    assert lines[1] == f"0,,{trace.records[0].energy:.17g},,,,"
    assert len(lines) == 4
    fields = lines[2].split(",")
    assert fields[1] == ""
    assert fields[5] == "0.5;0.5"
    assert len(fields[6].split(";")) == 2

    timed = trace.to_csv(tmp_path / "timed.csv").read_text().splitlines()
    assert timed[1].split(",")[1] != ""
