from typing import Tuple

import numpy as np

from ..energy import evaluate
from ..exceptions import InvalidInputError
from ..logger import logger as log
from ..model import UNLABELED, DiscreteEnergy
from ..qpbo import labeling_rate, qpbo_solve
from .model import SolverModel, SolverTrace, TraceRecord


class QPBOOnly(SolverModel):
    """One roof-dual solve of a two-label energy. Nodes QPBO leaves unlabeled
    keep their initial label."""

    name = "qpbo"

    def minimize(self, energy: DiscreteEnergy, initial=None) -> Tuple[np.ndarray, SolverTrace]:
        if energy.label_count != 2:
            raise InvalidInputError(
                f"the qpbo solver needs a two-label energy, got {energy.label_count} labels"
            )

        self._reset_streams()
        x = self.initial_labeling(energy, initial)
        trace = self.new_trace(evaluate(energy, x))

        partial, lower_bound = qpbo_solve(energy)
        fused = np.where(partial == UNLABELED, x, partial).astype(np.int64)
        # persistency guarantees this never loses against the initial labeling
        if evaluate(energy, fused) <= evaluate(energy, x):
            x = fused

        final_energy = evaluate(energy, x)
        trace.records.append(
            TraceRecord(
                iteration=1,
                wall_ms=self.elapsed_ms(),
                energy=final_energy,
                labeling_rate=labeling_rate(partial),
                lower_bound=lower_bound,
            )
        )
        log.info(
            f"qpbo labeled {labeling_rate(partial):.1%} of the nodes, "
            f"lower bound {lower_bound:.10g}"
        )

        trace.final_labeling = x.tolist()
        trace.final_energy = final_energy
        return x, trace
