from typing import List, NamedTuple, Tuple

import numpy as np

from ..exceptions import InvalidInputError, TextureSelectionError
from ..logger import logger as log
from ..model import DiscreteEnergy
from .image import GrayImage, salt_pepper
from .lattice import Offset, half_window_offsets, offset_pairs


class OffsetStatistics(NamedTuple):
    offset: Offset
    table: np.ndarray
    relevance: float
    submodular: bool


def _check_binary(image: GrayImage, what: str):
    if np.any((image.pixels != 0) & (image.pixels != 1)):
        raise InvalidInputError(f"{what} image must be binary with values 0 and 1")


def offset_statistics(clean: GrayImage, window: int = 35) -> List[OffsetStatistics]:
    """Learned pairwise table and relevance of every forward offset inside
    the window, in row-major offset order.

    The table is the negative log of the Laplace-smoothed joint frequency of
    the two pixel values, the relevance the absolute covariance of the pair.
    """
    statistics = []
    pixels = clean.pixels.reshape(-1)
    for offset in half_window_offsets(window // 2):
        q, r = offset_pairs(clean.height, clean.width, offset)
        if len(q) == 0:
            continue
        a, b = pixels[q], pixels[r]
        histogram = np.bincount(2 * a + b, minlength=4).reshape(2, 2)
        table = -np.log((histogram + 1.0) / (len(q) + 4.0))
        covariance = float(np.mean(a * b) - np.mean(a) * np.mean(b))
        statistics.append(
            OffsetStatistics(
                offset=offset,
                table=table,
                relevance=abs(covariance),
                submodular=bool(table[0, 0] + table[1, 1] <= table[0, 1] + table[1, 0]),
            )
        )
    return statistics


def select_offsets(
    statistics: List[OffsetStatistics], S: int, N: int
) -> List[OffsetStatistics]:
    """The S most relevant submodular and N most relevant non-submodular
    offsets. Ties keep the offset order."""
    if S < 0 or N < 0:
        raise InvalidInputError("S and N must be non-negative")

    order = np.argsort([-s.relevance for s in statistics], kind="stable")
    ranked = [statistics[i] for i in order]
    submodular = [s for s in ranked if s.submodular]
    frustrated = [s for s in ranked if not s.submodular]
    if len(submodular) < S or len(frustrated) < N:
        raise TextureSelectionError(
            f"requested {S} submodular and {N} non-submodular offsets, the window has "
            f"{len(submodular)} submodular and {len(frustrated)} non-submodular ones"
        )
    return submodular[:S] + frustrated[:N]


def gen_texture(
    clean: GrayImage,
    noisy: GrayImage,
    S: int,
    N: int,
    beta: float,
    window: int = 35,
) -> DiscreteEnergy:
    """Binary restoration energy with unary -beta / (1 + |I_p - x_p|) and
    pairwise tables learned on ``clean`` for the selected offsets."""
    _check_binary(clean, "clean")
    _check_binary(noisy, "noisy")
    if clean.shape != noisy.shape:
        raise InvalidInputError("clean and noisy images differ in size")

    intensity = noisy.pixels.reshape(-1, 1).astype(np.float64)
    unary = -beta / (1.0 + np.abs(intensity - np.arange(2)[None, :]))

    chosen = select_offsets(offset_statistics(clean, window), S, N)
    edges, tables = [], []
    for statistic in chosen:
        q, r = offset_pairs(clean.height, clean.width, statistic.offset)
        edges.append(np.stack([q, r], axis=1))
        tables.append(np.broadcast_to(statistic.table, (len(q), 2, 2)))
        log.debug(
            f"offset {statistic.offset}: relevance {statistic.relevance:.4f}, "
            f"{'submodular' if statistic.submodular else 'non-submodular'}"
        )

    edges = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    tables = np.concatenate(tables) if tables else np.zeros((0, 2, 2))
    log.info(
        f"Generated texture instance: {clean.pixel_count} nodes, {len(edges)} edges "
        f"from {S} submodular and {N} non-submodular offsets"
    )
    return DiscreteEnergy.from_tables(clean.pixel_count, edges, unary, tables)


def texture_problem(
    clean: GrayImage,
    fraction: float = 0.7,
    S: int = 3,
    N: int = 3,
    beta: float = 5.0,
    window: int = 35,
    rng: np.random.Generator = None,
) -> Tuple[DiscreteEnergy, GrayImage]:
    """Corrupt a binary texture with salt & pepper noise and build the
    restoration energy for it."""
    if rng is None:
        rng = np.random.default_rng()
    _check_binary(clean, "clean")
    noisy = salt_pepper(clean, fraction, rng)
    return gen_texture(clean, noisy, S, N, beta, window), noisy
