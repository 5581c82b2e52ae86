from typing import Literal, Tuple

import numpy as np

from ..energy import evaluate
from ..logger import logger as log
from ..model import DiscreteEnergy
from ..moves import apply_partial, build_expansion, truncate_to_submodular
from ..qpbo import labeling_rate, qpbo_solve
from .model import SolverConfig, SolverModel, SolverTrace, TraceRecord

ExpansionMode = Literal["qpbo", "truncate"]


class AlphaExpansion(SolverModel):
    """Sweeps alpha = 0..L-1 until a whole sweep brings no decrease.

    In ``qpbo`` mode unlabeled nodes keep their current label; in
    ``truncate`` mode the non-submodular terms are truncated first, so QPBO
    labels every node. A move is only accepted when it does not raise the
    energy.
    """

    def __init__(self, config: SolverConfig, mode: ExpansionMode = "qpbo"):
        super().__init__(config)
        self.mode = mode
        self.name = "expansion" if mode == "qpbo" else "expansion-trunc"

    def minimize(self, energy: DiscreteEnergy, initial=None) -> Tuple[np.ndarray, SolverTrace]:
        self._reset_streams()
        x = self.initial_labeling(energy, initial)
        current_energy = evaluate(energy, x)
        trace = self.new_trace(current_energy)

        iteration = 0
        sweep = 0
        converged = False
        while not converged and not self.exhausted(iteration):
            sweep += 1
            improved = False
            for alpha in range(energy.label_count):
                if self.exhausted(iteration):
                    break
                iteration += 1

                target = np.full(energy.node_count, alpha, dtype=np.int64)
                binary = build_expansion(energy, x, alpha)
                if self.mode == "truncate":
                    binary = truncate_to_submodular(binary)
                partial, lower_bound = qpbo_solve(binary)

                candidate = apply_partial(x, target, partial)
                candidate_energy = evaluate(energy, candidate)
                if candidate_energy < current_energy - self.config.tolerance:
                    improved = True
                if candidate_energy <= current_energy:
                    x, current_energy = candidate, candidate_energy

                trace.records.append(
                    TraceRecord(
                        iteration=iteration,
                        wall_ms=self.elapsed_ms(),
                        energy=current_energy,
                        proposal_energy=evaluate(energy, target),
                        labeling_rate=labeling_rate(partial),
                        lower_bound=lower_bound,
                        alpha=(alpha,),
                    )
                )
            else:
                converged = not improved

            log.debug(f"{self.name} sweep {sweep}: energy {current_energy:.10g}")

        if converged:
            log.info(f"{self.name} converged after {sweep} sweeps")

        trace.final_labeling = x.tolist()
        trace.final_energy = current_energy
        return x, trace
