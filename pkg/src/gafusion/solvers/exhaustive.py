from typing import Tuple

import numpy as np

from ..energy import evaluate, evaluate_many
from ..exceptions import ProblemTooLargeError
from ..model import DiscreteEnergy

ENUMERATION_LIMIT = 10**7
BLOCK_SIZE = 1 << 16


def brute_force_min(energy: DiscreteEnergy) -> Tuple[np.ndarray, float]:
    """Exact minimum by enumerating every labeling.

    Labelings are visited in lexicographic order (node 0 most significant),
    so the first minimizer wins ties.
    """
    n, L = energy.node_count, energy.label_count
    total = L**n
    if total > ENUMERATION_LIMIT:
        raise ProblemTooLargeError(
            f"{L}^{n} labelings exceed the enumeration limit of {ENUMERATION_LIMIT}"
        )

    place = L ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_index, best_value = 0, np.inf
    for start in range(0, total, BLOCK_SIZE):
        index = np.arange(start, min(start + BLOCK_SIZE, total), dtype=np.int64)
        labelings = (index[:, None] // place[None, :]) % L
        values = evaluate_many(energy, labelings)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_index, best_value = int(index[i]), float(values[i])

    labels = (best_index // place) % L
    labels = labels.astype(np.int64)
    return labels, evaluate(energy, labels)
