from typing import Literal

import numpy as np

from .exceptions import DegenerateReferenceError, InvalidInputError, UndefinedStrengthError
from .logger import logger as log
from .model import BinaryEnergy, DiscreteEnergy

NORMAL_FORM_TOLERANCE = 1e-12
NORMAL_FORM_MAX_ROUNDS = 16


def check_labeling(energy: DiscreteEnergy, x) -> np.ndarray:
    """Return ``x`` as an int array, raising if it does not fit ``energy``."""
    x = np.asarray(x)
    if x.ndim != 1 or len(x) != energy.node_count:
        raise InvalidInputError(
            f"labeling of shape {x.shape} does not match {energy.node_count} nodes"
        )
    if len(x) and not np.issubdtype(x.dtype, np.integer):
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise InvalidInputError("labels must be integers")
    x = x.astype(np.int64)
    if len(x) and (x.min() < 0 or x.max() >= energy.label_count):
        raise InvalidInputError(f"labels must lie in [0, {energy.label_count})")
    return x


def evaluate(energy: DiscreteEnergy, x) -> float:
    x = check_labeling(energy, x)
    unary = energy.unary[np.arange(energy.node_count), x].sum()
    if energy.edge_count == 0:
        return float(unary + energy.constant)

    p, q = energy.edges[:, 0], energy.edges[:, 1]
    pairwise = energy.pairwise[np.arange(energy.edge_count), x[p], x[q]].sum()
    return float(unary + energy.coupling * pairwise + energy.constant)


def evaluate_many(energy: DiscreteEnergy, labelings: np.ndarray) -> np.ndarray:
    """Energies of a (batch, node_count) block of labelings."""
    labelings = np.asarray(labelings, dtype=np.int64)
    nodes = np.arange(energy.node_count)
    values = energy.unary[nodes, labelings].sum(axis=1)
    if energy.edge_count:
        p, q = energy.edges[:, 0], energy.edges[:, 1]
        edges = np.arange(energy.edge_count)
        values = values + energy.coupling * energy.pairwise[
            edges, labelings[:, p], labelings[:, q]
        ].sum(axis=1)
    return values + energy.constant


def zero_labeling(energy: DiscreteEnergy) -> np.ndarray:
    return np.zeros(energy.node_count, dtype=np.int64)


def separable_optimum(energy: DiscreteEnergy) -> np.ndarray:
    """Per-node unary argmin, the optimum when no pairwise term matters."""
    return np.argmin(energy.unary, axis=1).astype(np.int64)


def to_normal_form(energy: DiscreteEnergy) -> DiscreteEnergy:
    """Reparameterize so that unary minima and pairwise row/column minima are 0.

    The coupling is folded into the pairwise tables (output coupling is 1) and
    everything pushed out of the tables lands in ``constant``, so the result
    evaluates identically on every labeling.
    """
    unary = energy.unary.copy()
    pairwise = energy.folded_pairwise()
    constant = energy.constant
    p, q = energy.edges[:, 0], energy.edges[:, 1]

    for _ in range(NORMAL_FORM_MAX_ROUNDS):
        if energy.edge_count:
            row_min = pairwise.min(axis=2)
            pairwise -= row_min[:, :, None]
            np.add.at(unary, p, row_min)

            col_min = pairwise.min(axis=1)
            pairwise -= col_min[:, None, :]
            np.add.at(unary, q, col_min)

        unary_min = unary.min(axis=1)
        unary -= unary_min[:, None]
        constant += unary_min.sum()

        residual = np.abs(unary.min(axis=1)).max()
        if energy.edge_count:
            residual = max(
                residual,
                np.abs(pairwise.min(axis=2)).max(),
                np.abs(pairwise.min(axis=1)).max(),
            )
        if residual <= NORMAL_FORM_TOLERANCE:
            break
    else:
        log.warning(f"normal form not reached after {NORMAL_FORM_MAX_ROUNDS} rounds")

    return type(energy).model_validate(
        {
            **dict(energy),
            "unary": unary,
            "pairwise": pairwise,
            "coupling": 1.0,
            "constant": constant,
        }
    )


def unary_strength(
    energy: DiscreteEnergy, normal_form: bool = True, magnitude: bool = False
) -> float:
    """Mean unary cost over mean pairwise cost.

    By default the energy is brought to normal form first. ``normal_form=False``
    measures the tables as constructed and ``magnitude=True`` averages |theta_pq|
    instead of theta_pq; the binary characterization generator uses both.
    """
    if energy.edge_count == 0:
        raise UndefinedStrengthError("unary strength needs at least one edge")

    if normal_form:
        energy = to_normal_form(energy)

    pairwise = energy.folded_pairwise()
    if magnitude:
        pairwise = np.abs(pairwise)

    pairwise_mean = pairwise.mean()
    if pairwise_mean == 0:
        raise UndefinedStrengthError("mean pairwise cost is zero")

    return float(energy.unary.mean() / pairwise_mean)


def edge_is_submodular(binary: BinaryEnergy, edge: int) -> bool:
    if binary.label_count != 2:
        raise InvalidInputError("submodularity test needs a two-label energy")
    t = binary.pairwise[edge]
    return bool(t[0, 0] + t[1, 1] <= t[0, 1] + t[1, 0])


def submodular_mask(binary: BinaryEnergy) -> np.ndarray:
    t = binary.pairwise
    return t[:, 0, 0] + t[:, 1, 1] <= t[:, 0, 1] + t[:, 1, 0]


def term_is_metric(table) -> bool:
    """True iff t(a,a) + t(b,c) <= t(a,c) + t(b,a) for every label triple."""
    t = np.asarray(table, dtype=np.float64)
    diag = np.diag(t)
    # axes: (alpha, beta, gamma)
    lhs = diag[:, None, None] + t[None, :, :]
    rhs = t[:, None, :] + t.T[:, :, None]
    return bool(np.all(lhs <= rhs))


def relative_energy(
    value: float,
    best: float,
    zero_ref: float,
    variant: Literal["affine", "ratio"] = "affine",
) -> float:
    """Relative energy on one of two scales.

    ``affine``: best maps to 0 and the zero labeling's energy to 100.
    ``ratio``: energy divided by the zero labeling's energy.
    """
    match variant:
        case "affine":
            if zero_ref == best:
                raise DegenerateReferenceError(
                    f"zero reference equals best energy ({best})"
                )
            return 100.0 * (value - best) / (zero_ref - best)

        case "ratio":
            if zero_ref == 0:
                raise DegenerateReferenceError("zero reference energy is 0")
            return value / zero_ref

        case _:
            raise InvalidInputError(f"unknown relative energy variant {variant}")
