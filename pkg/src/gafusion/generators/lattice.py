from typing import List, Tuple

import numpy as np

Offset = Tuple[int, int]

GRID4_OFFSETS: List[Offset] = [(0, 1), (1, 0)]
GRID8_OFFSETS: List[Offset] = [(0, 1), (1, -1), (1, 0), (1, 1)]


def half_window_offsets(radius: int) -> List[Offset]:
    """Offsets (dy, dx) with |dy|, |dx| <= radius pointing forward in
    row-major order, so each unordered pixel pair appears once."""
    return [
        (dy, dx)
        for dy in range(0, radius + 1)
        for dx in range(-radius, radius + 1)
        if dy > 0 or dx > 0
    ]


def offset_pairs(height: int, width: int, offset: Offset) -> Tuple[np.ndarray, np.ndarray]:
    """Flat indices (q, r) of every in-image pixel pair with r = q + offset."""
    dy, dx = offset
    ys, xs = np.mgrid[0 : max(height - dy, 0), max(0, -dx) : min(width, width - dx)]
    q = (ys * width + xs).reshape(-1)
    return q, q + dy * width + dx


def grid_edges(height: int, width: int, offsets: List[Offset]) -> Tuple[np.ndarray, np.ndarray]:
    """Edge list of a lattice plus, per edge, the index of its offset."""
    edges, family = [], []
    for k, offset in enumerate(offsets):
        q, r = offset_pairs(height, width, offset)
        edges.append(np.stack([q, r], axis=1))
        family.append(np.full(len(q), k, dtype=np.int64))
    if not edges:
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(edges), np.concatenate(family)
