from abc import abstractmethod
from typing import List, Tuple

import numpy as np

from ..energy import evaluate
from ..logger import logger as log
from ..model import DiscreteEnergy
from ..moves import fuse
from ..proposals import optimize_ga, random_proposal, st_proposal
from .model import SolverModel, SolverTrace, TraceRecord


class StepLog:
    """Expansion labels and kept-edge fractions used by one proposal."""

    def __init__(self):
        self.alphas: List[int] = []
        self.rhos: List[float] = []

    def __call__(self, alpha: int, rho: float, rate: float):
        self.alphas.append(alpha)
        self.rhos.append(rho)


class FusionSolver(SolverModel):
    """Propose, fuse with the current labeling, repeat.

    Stops once ``convergence_window`` consecutive fusions brought no decrease
    larger than ``tolerance``, or when the budget runs out.
    """

    @abstractmethod
    def propose(self, energy: DiscreteEnergy, current: np.ndarray, step: StepLog) -> np.ndarray:
        ...

    def minimize(self, energy: DiscreteEnergy, initial=None) -> Tuple[np.ndarray, SolverTrace]:
        self._reset_streams()
        x = self.initial_labeling(energy, initial)
        current_energy = evaluate(energy, x)
        trace = self.new_trace(current_energy)

        iteration = 0
        stalled = 0
        while not self.exhausted(iteration):
            iteration += 1
            step = StepLog()
            proposal = self.propose(energy, x, step)
            x, diagnostics = fuse(energy, x, proposal)
            fused_energy = evaluate(energy, x)

            if fused_energy < current_energy - self.config.tolerance:
                stalled = 0
            else:
                stalled += 1
            current_energy = fused_energy

            trace.records.append(
                TraceRecord(
                    iteration=iteration,
                    wall_ms=self.elapsed_ms(),
                    energy=current_energy,
                    proposal_energy=diagnostics.proposal_energy,
                    labeling_rate=diagnostics.labeling_rate,
                    lower_bound=diagnostics.lower_bound,
                    rho=tuple(step.rhos),
                    alpha=tuple(step.alphas),
                )
            )
            log.debug(
                f"{self.name} iteration {iteration}: energy {current_energy:.10g}, "
                f"proposal {diagnostics.proposal_energy:.10g}, "
                f"labeling rate {diagnostics.labeling_rate:.3f}"
            )

            if stalled >= self.config.convergence_window:
                log.info(f"{self.name} converged after {iteration} fusions")
                break

        trace.final_labeling = x.tolist()
        trace.final_energy = current_energy
        return x, trace


class GAFusion(FusionSolver):
    """
    Usage example:
    >>> labels, trace = GAFusion(SolverConfig(max_iterations=100, seed=7)).minimize(energy)
    """

    name = "ga"

    def expansion_steps(self, energy: DiscreteEnergy) -> int:
        if self.config.expansion_steps is not None:
            return self.config.expansion_steps
        return min(5, energy.label_count)

    def propose(self, energy: DiscreteEnergy, current: np.ndarray, step: StepLog) -> np.ndarray:
        return optimize_ga(
            energy,
            current,
            self.expansion_steps(energy),
            self.proposal_rng,
            approx_rng=self.approx_rng,
            rho=self.config.fixed_rho,
            on_step=step,
        )


class STFusion(FusionSolver):
    name = "st"

    def propose(self, energy: DiscreteEnergy, current: np.ndarray, step: StepLog) -> np.ndarray:
        return st_proposal(energy, self.proposal_rng)


class RandomFusion(FusionSolver):
    name = "random"

    def propose(self, energy: DiscreteEnergy, current: np.ndarray, step: StepLog) -> np.ndarray:
        return random_proposal(energy.node_count, energy.label_count, self.proposal_rng)
