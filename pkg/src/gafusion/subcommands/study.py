import csv
import pathlib
from collections import defaultdict
from typing import List, NamedTuple

import numpy as np
from rich import print
from rich.table import Table

from ..energy import evaluate, relative_energy, zero_labeling
from ..generators import gen_binary_characterization
from ..instance_io import read_energy
from ..logger import logger as log
from ..proposals import approximate_edges, ga_proposal_study, restrict_energy, st_proposal_study
from ..qpbo import complete_partial, labeling_rate, qpbo_solve

DEFAULT_STRENGTHS = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2]
DEFAULT_RHOS = [0.2, 0.4, 0.6, 0.8, 1.0]


class CharacterizationRow(NamedTuple):
    strength: float
    rho: float
    instance: int
    labeling_rate: float
    relative_energy: float


def characterize(
    side: int,
    strengths: List[float],
    rhos: List[float],
    instances: int,
    rng: np.random.Generator,
) -> List[CharacterizationRow]:
    """QPBO on edge-approximated binary grids of controlled unary strength.

    Unlabeled nodes are set to 0; the energy is measured on the full energy
    relative to the zero labeling (ratio variant).
    """
    rows = []
    for strength in strengths:
        for i in range(instances):
            energy = gen_binary_characterization(side, strength, rng)
            zero_energy = evaluate(energy, zero_labeling(energy))
            for rho in rhos:
                subset = approximate_edges(energy.edge_count, rho, rng)
                partial, _ = qpbo_solve(restrict_energy(energy, subset))
                x = complete_partial(partial)
                rows.append(
                    CharacterizationRow(
                        strength=strength,
                        rho=rho,
                        instance=i,
                        labeling_rate=labeling_rate(partial),
                        relative_energy=relative_energy(
                            evaluate(energy, x), 0.0, zero_energy, variant="ratio"
                        ),
                    )
                )
        log.info(f"Characterized unary strength {strength:g} on {instances} instances")
    return rows


def characterize_subcommand(
    side: int,
    strengths: List[float],
    rhos: List[float],
    instances: int,
    seed: int,
    out: pathlib.Path,
) -> pathlib.Path:
    rows = characterize(side, strengths, rhos, instances, np.random.default_rng(seed))

    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CharacterizationRow._fields)
        for row in rows:
            writer.writerow(
                [f"{row.strength:g}", f"{row.rho:g}", row.instance,
                 f"{row.labeling_rate:.17g}", f"{row.relative_energy:.17g}"]
            )

    rates = defaultdict(list)
    for row in rows:
        rates[(row.strength, row.rho)].append(row.labeling_rate)

    table = Table(title="Mean labeling rate")
    table.add_column("strength")
    for rho in rhos:
        table.add_column(f"rho={rho:g}")
    for strength in strengths:
        table.add_row(
            f"{strength:g}", *(f"{np.mean(rates[(strength, rho)]):.1%}" for rho in rhos)
        )
    print(table)
    return out


def proposals_subcommand(
    instance: pathlib.Path, count: int, seed: int, out: pathlib.Path
) -> pathlib.Path:
    """GA and ST proposals drawn from the zero labeling of ``instance``."""
    energy = read_energy(instance)
    rng = np.random.default_rng(seed)
    samples = {
        "ga": ga_proposal_study(energy, zero_labeling(energy), count, rng),
        "st": st_proposal_study(energy, count, rng),
    }

    with open(out, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["method", "kept_fraction", "energy"])
        for method, method_samples in samples.items():
            for sample in method_samples:
                writer.writerow([method, f"{sample.kept_fraction:.17g}", f"{sample.energy:.17g}"])

    table = Table(title=f"Proposals on {instance.name}")
    for column in ("method", "mean kept fraction", "mean energy", "best energy"):
        table.add_column(column)
    for method, method_samples in samples.items():
        energies = [s.energy for s in method_samples]
        table.add_row(
            method,
            f"{np.mean([s.kept_fraction for s in method_samples]):.3f}",
            f"{np.mean(energies):.6g}",
            f"{min(energies):.6g}",
        )
    print(table)
    return out
