import pathlib
from typing import Optional

import numpy as np
from rich import print

from ..generators import (SyntheticSpec, binarize, gen_binary_characterization,
                          gen_deconvolution, gen_synthetic, read_pgm,
                          texture_problem, write_pgm)
from ..generators.image import GrayImage
from ..instance_io import write_energy
from ..logger import logger as log


def _save_noisy(noisy: GrayImage, path: Optional[pathlib.Path]):
    if path is not None:
        write_pgm(noisy, path)
        log.info(f"Wrote degraded image to {path}")


def gen_synthetic_subcommand(spec: SyntheticSpec, out: Optional[pathlib.Path]) -> pathlib.Path:
    if out is None:
        out = pathlib.Path(f"{spec.name}-s{spec.seed}.mrf")
    write_energy(gen_synthetic(spec), out)
    print(f"Generated {spec.name} : {out}")
    return out


def gen_characterization_subcommand(
    side: int, strength: float, seed: int, out: pathlib.Path
) -> pathlib.Path:
    energy = gen_binary_characterization(side, strength, np.random.default_rng(seed))
    write_energy(energy, out)
    print(f"Generated binary instance with unary strength {strength:g} : {out}")
    return out


def gen_deconvolution_subcommand(
    image: pathlib.Path,
    kernel_sigma: float,
    kernel_size: int,
    noise_sigma: float,
    smoothness: float,
    seed: int,
    out: pathlib.Path,
    noisy_out: Optional[pathlib.Path] = None,
) -> pathlib.Path:
    energy, noisy = gen_deconvolution(
        read_pgm(image),
        kernel_sigma=kernel_sigma,
        kernel_size=kernel_size,
        noise_sigma=noise_sigma,
        smoothness_lambda=smoothness,
        rng=np.random.default_rng(seed),
    )
    write_energy(energy, out)
    _save_noisy(noisy, noisy_out)
    print(f"Generated deconvolution instance : {out}")
    return out


def gen_texture_subcommand(
    image: pathlib.Path,
    threshold: int,
    fraction: float,
    S: int,
    N: int,
    beta: float,
    window: int,
    seed: int,
    out: pathlib.Path,
    noisy_out: Optional[pathlib.Path] = None,
) -> pathlib.Path:
    clean = binarize(read_pgm(image), threshold)
    energy, noisy = texture_problem(
        clean, fraction=fraction, S=S, N=N, beta=beta, window=window,
        rng=np.random.default_rng(seed),
    )
    write_energy(energy, out)
    _save_noisy(noisy, noisy_out)
    print(f"Generated texture instance : {out}")
    return out
