"""End-to-end properties of the solvers and generators.

The statistical experiments are marked slow: run them with ``pytest -m slow``.
"""
import numpy as np
import pytest

from gafusion.energy import edge_is_submodular, evaluate, relative_energy, zero_labeling
from gafusion.generators import GrayImage, gen_binary_characterization, gen_deconvolution, gen_synthetic
from gafusion.generators.deconvolution import blur, gaussian_kernel
from gafusion.generators.lattice import half_window_offsets, offset_pairs
from gafusion.generators.synthetic import SyntheticSpec
from gafusion.model import UNLABELED, BinaryEnergy, DiscreteEnergy
from gafusion.moves import fuse
from gafusion.proposals import EdgeSubset, approximate_edges, restrict_energy, tree_optimize
from gafusion.qpbo import labeling_rate, qpbo_solve
from gafusion.solvers import (SolverConfig, alpha_expansion, brute_force_min,
                              ga_fusion, random_fusion, st_fusion)

from conftest import random_energy, random_tree


def test_qpbo_against_enumeration(rng):
    for _ in range(500):
        node_count = int(rng.integers(1, 11))
        energy = random_energy(rng, node_count, 2, edge_probability=0.4)
        partial, lower_bound = qpbo_solve(energy)
        _, best = brute_force_min(energy)
        assert lower_bound <= best + 1e-9

        labeled = partial != UNLABELED
        for _ in range(20):
            reference = rng.integers(0, 2, size=node_count)
            overwritten = np.where(labeled, partial, reference)
            assert evaluate(energy, overwritten) <= evaluate(energy, reference) + 1e-9

        binary = BinaryEnergy.from_energy(energy)
        if all(edge_is_submodular(binary, e) for e in range(binary.edge_count)):
            assert labeling_rate(partial) == 1.0
            assert evaluate(energy, partial) == pytest.approx(best, abs=1e-9)


def test_fusion_monotonicity(rng):
    for _ in range(1000):
        node_count = int(rng.integers(2, 12))
        label_count = int(rng.integers(2, 5))
        energy = random_energy(rng, node_count, label_count, edge_probability=0.5)
        current = rng.integers(0, label_count, size=node_count)
        proposal = rng.integers(0, label_count, size=node_count)
        fused, _ = fuse(energy, current, proposal)
        assert evaluate(energy, fused) <= evaluate(energy, current) + 1e-9


def test_tree_dp_matches_enumeration(rng):
    for trial in range(200):
        label_count = int(rng.integers(2, 5))
        max_nodes = int(np.floor(np.log(60000) / np.log(label_count)))
        node_count = int(rng.integers(1, min(max_nodes, 9) + 1))
        energy = random_tree(rng, node_count, label_count)
        if trial % 2:
            # small integer tables, so that optima tie
            energy = DiscreteEnergy.from_tables(
                node_count,
                energy.edges,
                rng.integers(0, 3, size=(node_count, label_count)),
                rng.integers(0, 3, size=(energy.edge_count, label_count, label_count)),
            )
        keep = [e for e in range(energy.edge_count) if rng.random() < 0.85]
        energy = restrict_energy(energy, EdgeSubset(indices=keep))

        labels, best = brute_force_min(energy)
        found = tree_optimize(energy)
        assert evaluate(energy, found) == pytest.approx(best, abs=1e-9)
        assert found.tolist() == labels.tolist()


def test_deconvolution_energy_identity(rng):
    kernel = gaussian_kernel(3, 3.0)
    palette = np.array([0.0, 128.0, 255.0])
    for _ in range(10):
        pixels = palette.astype(int)[rng.integers(0, 3, size=(6, 6))]
        pixels.reshape(-1)[:3] = palette.astype(int)
        energy, noisy = gen_deconvolution(GrayImage.from_array(pixels), rng=rng)

        for _ in range(20):
            x = rng.integers(0, 3, size=36)
            misfit = ((blur(palette[x].reshape(6, 6), kernel) - noisy.pixels) ** 2).sum()
            potts = sum(
                np.count_nonzero(x[q] != x[r])
                for q, r in (offset_pairs(6, 6, o) for o in half_window_offsets(2))
            )
            assert evaluate(energy, x) == pytest.approx(misfit + potts, abs=1e-6)


@pytest.mark.parametrize("solve", [ga_fusion, st_fusion, random_fusion, alpha_expansion])
def test_solvers_are_deterministic(solve):
    energy = gen_synthetic(SyntheticSpec.build(structure="GRID8", side=6, non_metric_rate=0.5, seed=1))
    config = SolverConfig.build(max_iterations=25, seed=17)
    first, second = solve(energy, config), solve(energy, config)
    assert np.array_equal(first[0], second[0])
    assert first[1].csv_rows(timing=False) == second[1].csv_rows(timing=False)


def mean_labeling_rate(strength: float, rho: float, count: int, rng) -> float:
    rates = []
    for _ in range(count):
        energy = gen_binary_characterization(30, strength, rng)
        subset = approximate_edges(energy.edge_count, rho, rng)
        rates.append(labeling_rate(qpbo_solve(restrict_energy(energy, subset)).partial))
    return float(np.mean(rates))


@pytest.mark.slow
def test_labeling_rate_grows_with_approximation(rng):
    rates = [mean_labeling_rate(0.4, rho, 50, rng) for rho in (0.2, 0.4, 0.6, 0.8, 1.0)]
    assert all(b <= a + 0.01 for a, b in zip(rates, rates[1:]))


@pytest.mark.slow
def test_labeling_rate_anchors(rng):
    assert abs(mean_labeling_rate(1.2, 1.0, 100, rng) - 0.547) <= 0.10
    assert mean_labeling_rate(0.2, 1.0, 100, rng) <= 0.05


@pytest.mark.slow
def test_ga_fusion_escapes_the_zero_labeling():
    ga_relative, expansion_relative = [], []
    for seed in range(10):
        spec = SyntheticSpec.build(structure="GRID8", side=30, coupling=1.0, non_metric_rate=0.5, seed=seed)
        energy = gen_synthetic(spec)
        config = SolverConfig.build(time_budget=10.0, seed=seed)
        ga = ga_fusion(energy, config)[1].final_energy
        expansion = alpha_expansion(energy, config)[1].final_energy

        best = min(ga, expansion)
        zero = evaluate(energy, zero_labeling(energy))
        ga_relative.append(relative_energy(ga, best, zero))
        expansion_relative.append(relative_energy(expansion, best, zero))

    assert np.mean(ga_relative) <= 10.0
    assert np.mean(expansion_relative) >= 90.0


@pytest.mark.slow
def test_ga_fusion_beats_expansion_on_small_instances():
    wins = 0
    for seed in range(50):
        energy = gen_synthetic(
            SyntheticSpec.build(structure="GRID8", side=3, label_count=3, non_metric_rate=0.5, seed=seed)
        )
        config = SolverConfig.build(max_iterations=200, seed=seed)
        ga = ga_fusion(energy, config)[1].final_energy
        expansion = alpha_expansion(energy, config)[1].final_energy
        wins += ga <= expansion + 1e-9
    assert wins >= 45


@pytest.mark.slow
def test_ga_fusion_close_to_optimum(rng):
    close = 0
    for seed in range(50):
        energy = random_energy(rng, 6, 4, edge_probability=0.6)
        _, best = brute_force_min(energy)
        zero = evaluate(energy, zero_labeling(energy))
        # generous budget: a long convergence window keeps drawing proposals after a plateau
        config = SolverConfig.build(max_iterations=2000, convergence_window=200, seed=seed)
        found = ga_fusion(energy, config)[1].final_energy
        if zero == best or relative_energy(found, best, zero) <= 5.0:
            close += 1
    assert close >= 40


@pytest.mark.slow
def test_ga_fusion_ranks_first_on_deconvolution():
    rng = np.random.default_rng(2024)
    # blocky three-tone image, upsampled 8x8 cells
    cells = np.array([0, 128, 255])[rng.integers(0, 3, size=(8, 8))]
    cells.reshape(-1)[:3] = [0, 128, 255]
    clean = GrayImage.from_array(np.kron(cells, np.ones((8, 8), dtype=int)))

    firsts = 0
    for trial in range(10):
        energy, _ = gen_deconvolution(clean, rng=np.random.default_rng(trial))
        config = SolverConfig.build(time_budget=30.0, seed=trial)
        ga = ga_fusion(energy, config)[1].final_energy
        others = [
            solve(energy, config)[1].final_energy
            for solve in (random_fusion, alpha_expansion, st_fusion)
        ]
        firsts += ga <= min(others)
    assert firsts >= 8
