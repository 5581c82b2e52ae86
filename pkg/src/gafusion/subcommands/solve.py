import pathlib
import sys
from typing import Optional

from rich import print

from ..exceptions import InvalidInputError, PaletteError
from ..generators import error_rate, read_pgm
from ..instance_io import read_energy, read_labeling, write_labeling
from ..logger import logger as log
from ..solver import SolverFactory
from ..solvers import SolverConfig

DEFAULT_BUDGET_S = 10.0


def solver_config(profile: Optional[pathlib.Path] = None, **overrides) -> SolverConfig:
    """Profile settings, overridden by explicit ones. Without any budget the
    run gets DEFAULT_BUDGET_S seconds."""
    if profile is not None:
        config = SolverConfig.from_profile(profile, **overrides)
    else:
        settings = {key: value for key, value in overrides.items() if value is not None}
        if settings.get("time_budget") is None and settings.get("max_iterations") is None:
            settings["time_budget"] = DEFAULT_BUDGET_S
        config = SolverConfig.build(**settings)
    return config


def solve_subcommand(
    instance: pathlib.Path,
    config: SolverConfig,
    trace: Optional[pathlib.Path] = None,
    labels: Optional[pathlib.Path] = None,
    initial: Optional[pathlib.Path] = None,
    timing: bool = True,
    clean: Optional[pathlib.Path] = None,
) -> float:
    energy = read_energy(instance)
    reference = read_pgm(clean) if clean is not None else None
    if reference is not None and len(reference.palette()) != energy.label_count:
        raise PaletteError(
            f"{clean} has {len(reference.palette())} gray values, the instance has {energy.label_count} labels"
        )
    if reference is not None and reference.pixel_count != energy.node_count:
        raise InvalidInputError(f"{clean} has {reference.pixel_count} pixels, the instance has {energy.node_count} nodes")
    start = read_labeling(initial) if initial is not None else None

    log.info(f"Solving {instance} with {config.algorithm}, seed {config.seed}")
    x, result = SolverFactory.from_config(config).minimize(energy, start)

    if trace is not None:
        result.to_csv(trace, timing=timing)
        log.info(f"Wrote trace with {len(result.records)} records to {trace}")
    if labels is not None:
        write_labeling(x, labels)
        log.info(f"Wrote labeling to {labels}")
    if reference is not None:
        rate = error_rate(x, reference, reference.palette())
        log.info(f"Error rate against {clean}: {rate:.6g}")
        print(f"error rate {rate:.6g}", file=sys.stderr)

    print(f"{result.final_energy:.17g}")
    return result.final_energy
