"""Minimum s-t cut on sparse graphs with real-valued capacities.

The source and sink are implicit: every node carries a capacity from the
source and one to the sink. Arcs are stored in pairs, arc ``a`` and arc
``a ^ 1`` being reverses of each other.
"""
from typing import List, NamedTuple, Tuple

import maxflow
import numpy as np

from .exceptions import InvalidInputError


class MaxFlowResult(NamedTuple):
    flow_value: float
    source_side: np.ndarray


class FlowNetwork:
    """
    Usage example:
    >>> net = FlowNetwork(2)
    >>> net.add_tedge(0, 4.0, 0.0)
    >>> net.add_tedge(1, 0.0, 4.0)
    >>> net.add_edge(0, 1, 1.0, 1.0)
    >>> max_flow(net).flow_value
    1.0
    """

    def __init__(self, node_count: int):
        self.node_count = node_count
        self.source_cap: List[float] = [0.0] * node_count
        self.sink_cap: List[float] = [0.0] * node_count
        self._tails: List[int] = []
        self._heads: List[int] = []
        self._caps: List[float] = []

    def add_edge(self, i: int, j: int, cap: float, rev_cap: float = 0.0):
        if cap < 0 or rev_cap < 0:
            raise InvalidInputError(f"negative capacity on arc ({i}, {j})")
        self._check_node(i)
        self._check_node(j)
        self._tails += [i, j]
        self._heads += [j, i]
        self._caps += [float(cap), float(rev_cap)]

    def add_tedge(self, i: int, source_cap: float, sink_cap: float):
        if source_cap < 0 or sink_cap < 0:
            raise InvalidInputError(f"negative terminal capacity on node {i}")
        self._check_node(i)
        self.source_cap[i] += float(source_cap)
        self.sink_cap[i] += float(sink_cap)

    @property
    def arcs(self) -> List[Tuple[int, int, float, int]]:
        """(from, to, capacity, reverse-arc index) for every arc."""
        return [
            (self._tails[a], self._heads[a], self._caps[a], a ^ 1)
            for a in range(len(self._caps))
        ]

    def _check_node(self, i: int):
        if not 0 <= i < self.node_count:
            raise InvalidInputError(f"node {i} out of range")


def cut_capacity(net: FlowNetwork, source_side) -> float:
    """Capacity of the cut putting ``source_side`` nodes with the source."""
    total = 0.0
    for i in range(net.node_count):
        total += net.sink_cap[i] if source_side[i] else net.source_cap[i]
    for tail, head, cap, _ in net.arcs:
        if source_side[tail] and not source_side[head]:
            total += cap
    return total


def max_flow(net: FlowNetwork) -> MaxFlowResult:
    """Maximum flow by Boykov-Kolmogorov on a ``maxflow.Graph``. Nodes and
    arcs are added in construction order, which makes the result
    deterministic for a fixed network.

    ``source_side`` is the source side of the maximal-source minimum cut: only
    the nodes of the final sink search tree, which are exactly those still
    reaching the sink in the residual graph, are put on the sink side.
    """
    n = net.node_count
    if n == 0:
        return MaxFlowResult(0.0, np.zeros(0, dtype=bool))

    graph = maxflow.Graph[float](n, len(net._caps) // 2)
    nodes = graph.add_grid_nodes((n,))
    graph.add_grid_tedges(
        nodes,
        np.asarray(net.source_cap, dtype=np.float64),
        np.asarray(net.sink_cap, dtype=np.float64),
    )
    for a in range(0, len(net._caps), 2):
        graph.add_edge(net._tails[a], net._heads[a], net._caps[a], net._caps[a + 1])

    flow = float(graph.maxflow())
    source_side = ~np.asarray(graph.get_grid_segments(nodes), dtype=bool)
    return MaxFlowResult(flow, source_side)
