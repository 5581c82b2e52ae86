from typing import NamedTuple, Tuple

import numpy as np

from .energy import check_labeling, evaluate
from .exceptions import InvalidInputError
from .logger import logger as log
from .model import BinaryEnergy, DiscreteEnergy
from .qpbo import labeling_rate, qpbo_solve


class FusionDiagnostics(NamedTuple):
    proposal_energy: float
    labeling_rate: float
    lower_bound: float


def build_fusion(energy: DiscreteEnergy, current, proposal) -> BinaryEnergy:
    """Binary energy E_b(y) = E(x_b(y)) where node p takes ``current[p]`` for
    y_p = 0 and ``proposal[p]`` for y_p = 1."""
    current = check_labeling(energy, current)
    proposal = check_labeling(energy, proposal)

    candidates = np.stack([current, proposal], axis=1)
    unary = np.take_along_axis(energy.unary, candidates, axis=1)

    p, q = energy.edges[:, 0], energy.edges[:, 1]
    pairwise = energy.pairwise[
        np.arange(energy.edge_count)[:, None, None],
        candidates[p][:, :, None],
        candidates[q][:, None, :],
    ]

    return BinaryEnergy(
        topology=energy.topology,
        label_count=2,
        unary=unary,
        pairwise=pairwise,
        coupling=energy.coupling,
        constant=energy.constant,
        provenance=candidates,
    )


def build_expansion(energy: DiscreteEnergy, current, alpha: int) -> BinaryEnergy:
    if not 0 <= alpha < energy.label_count:
        raise InvalidInputError(f"expansion label {alpha} not in [0, {energy.label_count})")
    return build_fusion(
        energy, current, np.full(energy.node_count, alpha, dtype=np.int64)
    )


def apply_partial(current, proposal, partial) -> np.ndarray:
    """Take the proposal label where ``partial`` is 1, keep the current one
    where it is 0 or unlabeled."""
    current, proposal, partial = map(np.asarray, (current, proposal, partial))
    if not len(current) == len(proposal) == len(partial):
        raise InvalidInputError("labelings and partial labeling differ in length")
    return np.where(partial == 1, proposal, current).astype(np.int64)


def fuse(energy: DiscreteEnergy, current, proposal) -> Tuple[np.ndarray, FusionDiagnostics]:
    current = check_labeling(energy, current)
    proposal = check_labeling(energy, proposal)

    binary = build_fusion(energy, current, proposal)
    partial, lower_bound = qpbo_solve(binary)
    fused = apply_partial(current, proposal, partial)

    diagnostics = FusionDiagnostics(
        proposal_energy=evaluate(energy, proposal),
        labeling_rate=labeling_rate(partial),
        lower_bound=lower_bound,
    )

    if evaluate(energy, fused) > evaluate(energy, current):
        log.warning("fused labeling lost to round-off, keeping the current one")
        fused = current

    return fused, diagnostics


def truncate_to_submodular(binary: BinaryEnergy) -> BinaryEnergy:
    """Raise theta01 and theta10 of every non-submodular edge by half of its
    violation, so that theta00 + theta11 == theta01 + theta10 afterwards."""
    if binary.label_count != 2:
        raise InvalidInputError("truncation needs a two-label energy")

    pairwise = binary.pairwise.copy()
    violation = (pairwise[:, 0, 0] + pairwise[:, 1, 1]) - (
        pairwise[:, 0, 1] + pairwise[:, 1, 0]
    )
    violated = violation > 0
    pairwise[violated, 0, 1] += violation[violated] / 2
    pairwise[violated, 1, 0] += violation[violated] / 2

    # round-off can leave the sum one ulp short of equality
    while True:
        short = pairwise[:, 0, 0] + pairwise[:, 1, 1] > pairwise[:, 0, 1] + pairwise[:, 1, 0]
        if not short.any():
            break
        pairwise[short, 1, 0] = np.nextafter(pairwise[short, 1, 0], np.inf)

    log.debug(f"truncated {int(violated.sum())} of {binary.edge_count} edges")
    pairwise.setflags(write=False)
    return binary.model_copy(update={"pairwise": pairwise})
