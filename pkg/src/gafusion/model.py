from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .exceptions import InvalidInputError

# Value of a PartialLabeling entry QPBO could not decide.
UNLABELED = -1


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class GraphTopology(BaseModel):
    """Node count plus an edge list of pairs (p, q) with p < q."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    node_count: int = Field(gt=0)
    edges: np.ndarray

    @field_validator("edges", mode="before")
    @classmethod
    def _as_edge_array(cls, value) -> np.ndarray:
        edges = np.array(value, dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, 2)
        if edges.ndim != 2 or edges.shape[1] != 2:
            raise ValueError(f"edges must have shape (m, 2), got {edges.shape}")
        return _frozen(edges)

    @model_validator(mode="after")
    def _check_edges(self) -> "GraphTopology":
        if len(self.edges) == 0:
            return self

        p, q = self.edges[:, 0], self.edges[:, 1]
        if p.min() < 0 or q.max() >= self.node_count:
            raise ValueError("edge endpoint out of range")
        if np.any(p >= q):
            raise ValueError("edges must satisfy p < q (no self-loops)")
        keys = p * self.node_count + q
        if len(np.unique(keys)) != len(keys):
            raise ValueError("duplicate edge")
        return self

    @property
    def edge_count(self) -> int:
        return len(self.edges)


class DiscreteEnergy(BaseModel):
    """Pairwise MRF energy

        E(x) = sum_p unary[p, x_p] + coupling * sum_e pairwise[e, x_p, x_q] + constant

    with a uniform label count over all nodes.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    topology: GraphTopology
    label_count: int = Field(gt=0)
    unary: np.ndarray
    pairwise: np.ndarray
    coupling: float = Field(default=1.0, ge=0.0)
    constant: float = 0.0

    @field_validator("unary", "pairwise", mode="before")
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        return _frozen(np.array(value, dtype=np.float64))

    @model_validator(mode="after")
    def _check_tables(self) -> "DiscreteEnergy":
        n, m, L = self.topology.node_count, self.topology.edge_count, self.label_count
        if self.pairwise.size == 0 and m == 0:
            object.__setattr__(self, "pairwise", _frozen(np.zeros((0, L, L))))

        if self.unary.shape != (n, L):
            raise ValueError(f"unary table shape {self.unary.shape} != {(n, L)}")
        if self.pairwise.shape != (m, L, L):
            raise ValueError(f"pairwise table shape {self.pairwise.shape} != {(m, L, L)}")
        if not (np.all(np.isfinite(self.unary)) and np.all(np.isfinite(self.pairwise))):
            raise ValueError("cost tables must be finite")
        if not np.isfinite(self.constant) or not np.isfinite(self.coupling):
            raise ValueError("coupling and constant must be finite")
        return self

    @classmethod
    def from_tables(
        cls,
        node_count: int,
        edges,
        unary,
        pairwise,
        coupling: float = 1.0,
        constant: float = 0.0,
    ) -> "DiscreteEnergy":
        """Build an energy from raw tables, canonicalizing the edge list.

        Edges given as (q, p) with q > p are flipped and their table transposed,
        then edges are sorted lexicographically so that the internal order never
        depends on the order of the input.
        """
        unary = np.asarray(unary, dtype=np.float64)
        edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
        label_count = unary.shape[1] if unary.ndim == 2 else 0
        pairwise = np.array(pairwise, dtype=np.float64).reshape(
            len(edges), label_count, label_count
        )

        flipped = edges[:, 0] > edges[:, 1]
        edges[flipped] = edges[flipped][:, ::-1]
        pairwise[flipped] = np.transpose(pairwise[flipped], (0, 2, 1))
        order = np.lexsort((edges[:, 1], edges[:, 0]))

        try:
            return cls(
                topology=GraphTopology(node_count=node_count, edges=edges[order]),
                label_count=label_count,
                unary=unary,
                pairwise=pairwise[order],
                coupling=coupling,
                constant=constant,
            )

        except ValidationError as exc:
            raise InvalidInputError(str(exc)) from exc

    @property
    def node_count(self) -> int:
        return self.topology.node_count

    @property
    def edge_count(self) -> int:
        return self.topology.edge_count

    @property
    def edges(self) -> np.ndarray:
        return self.topology.edges

    def folded_pairwise(self) -> np.ndarray:
        return self.coupling * self.pairwise

    def restrict(self, indices) -> "DiscreteEnergy":
        """Same energy keeping only the edges at ``indices``."""
        indices = np.asarray(indices, dtype=np.int64)
        topology = GraphTopology(
            node_count=self.node_count, edges=self.edges[indices]
        )
        return self.model_copy(
            update={
                "topology": topology,
                "pairwise": _frozen(self.pairwise[indices].copy()),
            }
        )


class BinaryEnergy(DiscreteEnergy):
    """Two-label energy of a move. ``provenance[p]`` holds the multi-label
    candidates node p takes for y_p = 0 and y_p = 1."""

    provenance: Optional[np.ndarray] = None

    @field_validator("provenance", mode="before")
    @classmethod
    def _as_provenance(cls, value) -> Optional[np.ndarray]:
        if value is None:
            return None
        return _frozen(np.array(value, dtype=np.int64))

    @model_validator(mode="after")
    def _check_binary(self) -> "BinaryEnergy":
        if self.label_count != 2:
            raise ValueError(f"binary energy needs 2 labels, got {self.label_count}")
        if self.provenance is None:
            identity = np.tile(np.array([0, 1], dtype=np.int64), (self.node_count, 1))
            object.__setattr__(self, "provenance", _frozen(identity))
        elif self.provenance.shape != (self.node_count, 2):
            raise ValueError("provenance must cover every node")
        return self

    @classmethod
    def from_energy(cls, energy: DiscreteEnergy) -> "BinaryEnergy":
        """View a two-label DiscreteEnergy as a move over its own labels."""
        if isinstance(energy, BinaryEnergy):
            return energy
        try:
            return cls(
                topology=energy.topology,
                label_count=energy.label_count,
                unary=energy.unary,
                pairwise=energy.pairwise,
                coupling=energy.coupling,
                constant=energy.constant,
            )

        except ValidationError as exc:
            raise InvalidInputError(str(exc)) from exc
