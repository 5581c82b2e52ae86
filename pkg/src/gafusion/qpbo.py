"""Roof duality (QPBO) for arbitrary binary pairwise energies.

Every variable y_p gets two graph nodes: ``p`` standing for y_p and
``p + n`` standing for its complement. A node on the source side means the
literal it stands for is 0. Each term is split in halves between the two
copies, submodular pairwise terms linking p -> q and non-submodular ones
linking p -> complement(q). The minimum cut value plus the accumulated
constant is the roof-dual lower bound; a variable is labeled when its two
copies land on opposite sides of the cut.
"""
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInputError
from .logger import logger as log
from .maxflow import FlowNetwork, max_flow
from .model import UNLABELED, DiscreteEnergy


class QPBOResult(NamedTuple):
    partial: np.ndarray
    lower_bound: float

    @property
    def labeling_rate(self) -> float:
        return labeling_rate(self.partial)


def labeling_rate(partial) -> float:
    partial = np.asarray(partial)
    if len(partial) == 0:
        return 1.0
    return float(np.count_nonzero(partial != UNLABELED) / len(partial))


def complete_partial(partial, fill: int = 0) -> np.ndarray:
    """Binary labeling with the unlabeled nodes set to ``fill``."""
    partial = np.asarray(partial)
    return np.where(partial == UNLABELED, fill, partial).astype(np.int64)


def qpbo_solve(binary: DiscreteEnergy) -> QPBOResult:
    """Partial minimizer of a two-label energy with its roof-dual lower bound.

    Labeled entries are persistent (overwriting any labeling with them never
    raises its energy); all nodes are labeled when every edge is submodular.
    """
    if binary.label_count != 2:
        raise InvalidInputError(f"QPBO needs a two-label energy, got {binary.label_count}")

    n = binary.node_count
    theta = binary.folded_pairwise()
    a, b = theta[:, 0, 0], theta[:, 0, 1]
    c, d = theta[:, 1, 0], theta[:, 1, 1]
    weight = b + c - a - d
    submodular = weight >= 0
    p, q = binary.edges[:, 0], binary.edges[:, 1]

    unary = binary.unary.copy()
    constant = binary.constant

    # submodular: A + (C-A) y_p + (D-C) y_q + w (1-y_p) y_q
    constant += a[submodular].sum()
    np.add.at(unary[:, 1], p[submodular], (c - a)[submodular])
    np.add.at(unary[:, 1], q[submodular], (d - c)[submodular])

    # non-submodular: D + (B-D)(1-y_p) + (C-D)(1-y_q) + w'(1-y_p)(1-y_q)
    frustrated = ~submodular
    constant += d[frustrated].sum()
    np.add.at(unary[:, 0], p[frustrated], (b - d)[frustrated])
    np.add.at(unary[:, 0], q[frustrated], (c - d)[frustrated])

    delta = unary[:, 1] - unary[:, 0]
    constant += unary[:, 0].sum()
    # delta y = delta + |delta| (1-y) when delta < 0, and the arcs carry |delta| (1-y)
    constant += np.minimum(delta, 0.0).sum()

    net = FlowNetwork(2 * n)
    for i, value in enumerate(delta.tolist()):
        if value > 0:
            net.add_tedge(i, value / 2, 0.0)
            net.add_tedge(i + n, 0.0, value / 2)
        elif value < 0:
            net.add_tedge(i, 0.0, -value / 2)
            net.add_tedge(i + n, -value / 2, 0.0)

    for u, v, w, plain in zip(p.tolist(), q.tolist(), (weight / 2).tolist(), submodular.tolist()):
        if w == 0:
            continue
        if plain:
            net.add_edge(u, v, w)
            net.add_edge(v + n, u + n, w)
        else:
            net.add_edge(u, v + n, -w)
            net.add_edge(v, u + n, -w)

    flow_value, source_side = max_flow(net)

    literal, complement = source_side[:n], source_side[n:]
    partial = np.full(n, UNLABELED, dtype=np.int8)
    partial[literal & ~complement] = 0
    partial[~literal & complement] = 1

    result = QPBOResult(partial, float(constant + flow_value))
    log.debug(
        f"QPBO on {n} nodes, {int(frustrated.sum())} non-submodular edges: "
        f"labeling rate {result.labeling_rate:.3f}, lower bound {result.lower_bound:.6g}"
    )
    return result
