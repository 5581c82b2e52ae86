import csv
import json
import pathlib
import time
from abc import ABC, abstractmethod
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..energy import check_labeling, separable_optimum, zero_labeling
from ..exceptions import InvalidInputError, SpecValidationError
from ..model import DiscreteEnergy

Algorithm = Literal["ga", "st", "random", "expansion", "expansion-trunc", "qpbo"]

TRACE_HEADER = ["iter", "wall_ms", "energy", "proposal_energy", "labeling_rate", "rho", "alpha"]


class SolverConfig(BaseModel):
    algorithm: Algorithm = "ga"
    time_budget: Optional[float] = Field(default=None, gt=0)
    max_iterations: Optional[int] = Field(default=None, gt=0)
    convergence_window: int = Field(default=20, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    expansion_steps: Optional[int] = Field(default=None, gt=0)
    initial: Literal["zeros", "unary", "random"] = "zeros"
    fixed_rho: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    tolerance: float = Field(default=1e-9, ge=0.0)

    @model_validator(mode="after")
    def _check_budget(self) -> "SolverConfig":
        if self.time_budget is None and self.max_iterations is None:
            raise ValueError("a time budget or an iteration cap is required")
        return self

    @classmethod
    def build(cls, **settings) -> "SolverConfig":
        try:
            return cls(**settings)

        except ValidationError as exc:
            raise SpecValidationError(str(exc)) from exc

    @classmethod
    def from_profile(cls, path: pathlib.Path, **overrides) -> "SolverConfig":
        """Load a JSON profile; overrides that are not None win."""
        settings = json.load(open(path, "r", encoding="utf-8"))
        settings |= {key: value for key, value in overrides.items() if value is not None}
        return cls.build(**settings)


class TraceRecord(BaseModel):
    iteration: int
    wall_ms: float
    energy: float
    proposal_energy: Optional[float] = None
    labeling_rate: Optional[float] = None
    lower_bound: Optional[float] = None
    rho: Tuple[float, ...] = ()
    alpha: Tuple[int, ...] = ()


def _real(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.17g}"


class SolverTrace(BaseModel):
    algorithm: str
    records: List[TraceRecord] = []
    final_labeling: List[int] = []
    final_energy: Optional[float] = None

    def energies(self) -> List[float]:
        return [record.energy for record in self.records]

    def is_non_increasing(self, tolerance: float = 0.0) -> bool:
        energies = self.energies()
        return all(b <= a + tolerance for a, b in zip(energies, energies[1:]))

    def csv_rows(self, timing: bool = True) -> List[List[str]]:
        rows = []
        for record in self.records:
            rows.append(
                [
                    str(record.iteration),
                    f"{record.wall_ms:.3f}" if timing else "",
                    _real(record.energy),
                    _real(record.proposal_energy),
                    _real(record.labeling_rate),
                    ";".join(f"{rho:.17g}" for rho in record.rho),
                    ";".join(str(alpha) for alpha in record.alpha),
                ]
            )
        return rows

    def to_csv(self, path: pathlib.Path, timing: bool = True) -> pathlib.Path:
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRACE_HEADER)
            writer.writerows(self.csv_rows(timing))
        return pathlib.Path(path)


class SolverModel(ABC):
    """
    Usage example:
    >>> solver = SolverFactory.from_config(SolverConfig(algorithm="ga", max_iterations=50))
    >>> labels, trace = solver.minimize(energy)
    """

    name: str
    config: SolverConfig

    def __init__(self, config: SolverConfig):
        self.config = config
        self._start = None

    @abstractmethod
    def minimize(
        self, energy: DiscreteEnergy, initial=None
    ) -> Tuple[np.ndarray, SolverTrace]:
        ...

    def _reset_streams(self):
        # one seed per run, split into independent sub-streams
        proposal, approximation, init = np.random.SeedSequence(self.config.seed).spawn(3)
        self.proposal_rng = np.random.default_rng(proposal)
        self.approx_rng = np.random.default_rng(approximation)
        self.init_rng = np.random.default_rng(init)
        self._start = time.monotonic()

    def initial_labeling(self, energy: DiscreteEnergy, initial=None) -> np.ndarray:
        if initial is not None:
            return check_labeling(energy, initial)

        match self.config.initial:
            case "zeros":
                return zero_labeling(energy)
            case "unary":
                return separable_optimum(energy)
            case "random":
                return self.init_rng.integers(
                    0, energy.label_count, size=energy.node_count, dtype=np.int64
                )
            case _:
                raise InvalidInputError(f"unknown initial policy {self.config.initial}")

    def elapsed_ms(self) -> float:
        return (time.monotonic() - self._start) * 1000.0

    def exhausted(self, iteration: int) -> bool:
        if self.config.max_iterations is not None and iteration >= self.config.max_iterations:
            return True
        if self.config.time_budget is not None:
            return self.elapsed_ms() >= self.config.time_budget * 1000.0
        return False

    def new_trace(self, energy_value: float) -> SolverTrace:
        return SolverTrace(
            algorithm=self.name,
            records=[TraceRecord(iteration=0, wall_ms=self.elapsed_ms(), energy=energy_value)],
        )
