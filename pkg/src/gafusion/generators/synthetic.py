import itertools
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..exceptions import SpecValidationError
from ..logger import logger as log
from ..model import DiscreteEnergy
from .lattice import GRID4_OFFSETS, GRID8_OFFSETS, grid_edges, half_window_offsets

Structure = Literal["GRID4", "GRID8", "GRID24", "FULL"]


class SyntheticSpec(BaseModel):
    """
    Usage example:
    >>> spec = SyntheticSpec(structure="GRID8", side=30, coupling=1.0, non_metric_rate=0.5)
    >>> spec.name
    '1-50-GRID8'
    """

    structure: Structure = "GRID4"
    side: int = Field(default=30, ge=2)
    label_count: int = Field(default=5, ge=2)
    coupling: float = Field(default=1.0, ge=0.0)
    non_metric_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    stratified: bool = False

    @model_validator(mode="after")
    def _check_structure(self) -> "SyntheticSpec":
        if self.structure == "GRID4" and self.non_metric_rate == 1.0:
            raise ValueError("a 4-connected grid cannot have 100% non-metric terms")
        return self

    @classmethod
    def build(cls, **settings) -> "SyntheticSpec":
        try:
            return cls(**settings)

        except ValidationError as exc:
            raise SpecValidationError(str(exc)) from exc

    @property
    def name(self) -> str:
        return f"{self.coupling:g}-{round(self.non_metric_rate * 100)}-{self.structure}"

    @property
    def node_count(self) -> int:
        return self.side if self.structure == "FULL" else self.side * self.side


def _topology(spec: SyntheticSpec) -> np.ndarray:
    match spec.structure:
        case "GRID4":
            return grid_edges(spec.side, spec.side, GRID4_OFFSETS)[0]
        case "GRID8":
            return grid_edges(spec.side, spec.side, GRID8_OFFSETS)[0]
        case "GRID24":
            return grid_edges(spec.side, spec.side, half_window_offsets(2))[0]
        case "FULL":
            pairs = list(itertools.combinations(range(spec.side), 2))
            return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def _signed_potts(signs: np.ndarray, gamma: np.ndarray, label_count: int) -> np.ndarray:
    """theta(i, j) = 0 if i == j else s * gamma."""
    off_diagonal = 1.0 - np.eye(label_count)
    return (signs * gamma)[:, None, None] * off_diagonal[None, :, :]


def gen_synthetic(spec: SyntheticSpec) -> DiscreteEnergy:
    """Multi-label test instance: i.i.d. U(0, 1) unaries and signed Potts
    pairwise terms, a sign of -1 making the term non-metric.

    Signs are i.i.d. with P(s = -1) = non_metric_rate, or with exactly
    round(rate * edge_count) negative signs when ``stratified``.
    """
    rng = np.random.default_rng(spec.seed)
    edges = _topology(spec)
    n, m, L = spec.node_count, len(edges), spec.label_count

    unary = rng.random((n, L))
    gamma = rng.random(m)
    if spec.stratified:
        signs = np.ones(m)
        signs[rng.permutation(m)[: int(np.floor(spec.non_metric_rate * m + 0.5))]] = -1.0
    else:
        signs = np.where(rng.random(m) < spec.non_metric_rate, -1.0, 1.0)

    log.info(
        f"Generated {spec.name} instance: {n} nodes, {m} edges, "
        f"{int(np.count_nonzero(signs < 0))} non-metric terms"
    )
    return DiscreteEnergy.from_tables(
        n, edges, unary, _signed_potts(signs, gamma, L), coupling=spec.coupling
    )


def gen_binary_characterization(
    side: int, target_strength: float, rng: np.random.Generator
) -> DiscreteEnergy:
    """Binary 4-connected grid whose unary strength, measured on the tables
    as built with |theta_pq| means, equals ``target_strength``.

    Unary: one label costs 0 and the other k_p ~ U(0, 1), the free label
    picked by a fair coin. Pairwise: 0 on the diagonal, s * gamma off it.
    """
    if side < 2:
        raise SpecValidationError(f"grid side must be at least 2, got {side}")
    if not target_strength > 0:
        raise SpecValidationError(f"target strength must be positive, got {target_strength}")

    edges, _ = grid_edges(side, side, GRID4_OFFSETS)
    n, m = side * side, len(edges)

    k = rng.random(n)
    flipped = rng.integers(0, 2, size=n).astype(bool)
    unary = np.zeros((n, 2))
    unary[~flipped, 1] = k[~flipped]
    unary[flipped, 0] = k[flipped]

    gamma = rng.random(m)
    signs = rng.choice([-1.0, 1.0], size=m)
    pairwise = _signed_potts(signs, gamma, 2)

    coupling = unary.mean() / (target_strength * np.abs(pairwise).mean())
    return DiscreteEnergy.from_tables(n, edges, unary, pairwise, coupling=coupling)
