"""Deconvolution MRFs.

A clean image painted with three gray values is blurred by a Gaussian kernel
(zero padding outside the image) and corrupted by Gaussian noise. The energy
of a labeling x is the squared misfit between the blurred palette image v(x)
and the noisy observation, expanded exactly into unary terms, pairwise terms
between pixels closer than the kernel's autocorrelation support, and a
constant, plus a Potts prior on that same neighborhood.
"""
from typing import Tuple

import numpy as np
from scipy.signal import convolve2d

from ..exceptions import InvalidInputError, PaletteError
from ..logger import logger as log
from ..model import DiscreteEnergy
from .image import GrayImage
from .lattice import half_window_offsets, offset_pairs

PALETTE_SIZE = 3


def gaussian_kernel(size: int = 3, sigma: float = 3.0) -> np.ndarray:
    """Square Gaussian kernel normalized to sum 1."""
    if size < 1 or size % 2 == 0:
        raise InvalidInputError(f"kernel size must be odd and positive, got {size}")
    if not sigma > 0:
        raise InvalidInputError(f"kernel sigma must be positive, got {sigma}")
    ax = np.arange(size) - size // 2
    g = np.exp(-(ax**2) / (2.0 * sigma**2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def blur(pixels: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    return convolve2d(np.asarray(pixels, dtype=np.float64), kernel, mode="same", boundary="fill")


def palette_of(clean: GrayImage) -> np.ndarray:
    palette = clean.palette()
    if len(palette) != PALETTE_SIZE:
        raise PaletteError(
            f"deconvolution needs exactly {PALETTE_SIZE} gray values, image has {len(palette)}"
        )
    return palette.astype(np.float64)


def degrade(
    clean: GrayImage, kernel: np.ndarray, noise_sigma: float, rng: np.random.Generator
) -> GrayImage:
    """noisy = clip(round(kernel * clean + N(0, noise_sigma^2)))"""
    noise = rng.normal(0.0, noise_sigma, size=clean.shape)
    noisy = np.clip(np.rint(blur(clean.pixels, kernel) + noise), 0, clean.maxval)
    return GrayImage.from_array(noisy.astype(np.int64), maxval=clean.maxval)


def deconvolution_energy(
    noisy: GrayImage, kernel: np.ndarray, palette, smoothness_lambda: float
) -> DiscreteEnergy:
    h, w = noisy.shape
    k = kernel.shape[0]
    c = k // 2
    palette = np.asarray(palette, dtype=np.float64)
    L = len(palette)
    observed = noisy.pixels.astype(np.float64)

    # unary: sum_p w_pq^2 v^2 - 2 y_p w_pq v, with p = q - d for kernel offsets d
    square = np.zeros((h, w))
    cross = np.zeros((h, w))
    padded = np.pad(observed, c)
    for dy in range(-c, c + 1):
        for dx in range(-c, c + 1):
            weight = kernel[c + dy, c + dx]
            valid = np.zeros((h, w))
            valid[max(0, dy) : h + min(0, dy), max(0, dx) : w + min(0, dx)] = 1.0
            square += weight**2 * valid
            cross += weight * padded[c - dy : c - dy + h, c - dx : c - dx + w]
    unary = (
        square.reshape(-1, 1) * palette[None, :] ** 2
        - 2.0 * cross.reshape(-1, 1) * palette[None, :]
    )

    # pairwise: 2 sum_p w_pq w_pr v(x_q) v(x_r) over pixels p covering both q and r
    offsets = half_window_offsets(2 * c)
    products = np.outer(palette, palette)
    potts = smoothness_lambda * (1.0 - np.eye(L))
    edges, tables = [], []
    for delta in offsets:
        q, r = offset_pairs(h, w, delta)
        coefficient = np.zeros(len(q))
        qy, qx = q // w, q % w
        for d1y in range(-c, c + 1):
            for d1x in range(-c, c + 1):
                d2y, d2x = d1y + delta[0], d1x + delta[1]
                if abs(d2y) > c or abs(d2x) > c:
                    continue
                py, px = qy - d1y, qx - d1x
                inside = (py >= 0) & (py < h) & (px >= 0) & (px < w)
                coefficient += 2.0 * kernel[c + d1y, c + d1x] * kernel[c + d2y, c + d2x] * inside
        edges.append(np.stack([q, r], axis=1))
        tables.append(coefficient[:, None, None] * products[None] + potts[None])

    edges = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    tables = np.concatenate(tables) if tables else np.zeros((0, L, L))
    return DiscreteEnergy.from_tables(
        h * w, edges, unary, tables, coupling=1.0, constant=float((observed**2).sum())
    )


def gen_deconvolution(
    clean: GrayImage,
    kernel_sigma: float = 3.0,
    kernel_size: int = 3,
    noise_sigma: float = 10.0,
    smoothness_lambda: float = 1.0,
    rng: np.random.Generator = None,
) -> Tuple[DiscreteEnergy, GrayImage]:
    """
    Usage example:
    >>> energy, noisy = gen_deconvolution(clean, rng=np.random.default_rng(0))

    Labels index the clean image's gray values sorted ascending.
    """
    if rng is None:
        rng = np.random.default_rng()
    if noise_sigma < 0:
        raise InvalidInputError(f"noise sigma must be non-negative, got {noise_sigma}")

    palette = palette_of(clean)
    kernel = gaussian_kernel(kernel_size, kernel_sigma)
    noisy = degrade(clean, kernel, noise_sigma, rng)
    energy = deconvolution_energy(noisy, kernel, palette, smoothness_lambda)

    log.info(
        f"Generated deconvolution instance: {energy.node_count} nodes, "
        f"{energy.edge_count} edges, palette {palette.astype(int).tolist()}"
    )
    return energy, noisy
