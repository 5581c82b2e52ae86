import pathlib
from typing import Tuple

import numpy as np
from PIL import Image
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..exceptions import InstanceFormatError, InvalidInputError
from ..logger import logger as log


class GrayImage(BaseModel):
    """Row-major gray image, ``pixels`` has shape (height, width)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    pixels: np.ndarray
    maxval: int = Field(default=255, gt=0, le=255)

    @field_validator("pixels", mode="before")
    @classmethod
    def _as_pixels(cls, value) -> np.ndarray:
        pixels = np.array(value, dtype=np.int64)
        pixels.setflags(write=False)
        return pixels

    @model_validator(mode="after")
    def _check_pixels(self) -> "GrayImage":
        if self.pixels.shape != (self.height, self.width):
            raise ValueError(
                f"pixel array of shape {self.pixels.shape} does not match "
                f"{self.width}x{self.height}"
            )
        if self.pixels.min() < 0 or self.pixels.max() > self.maxval:
            raise ValueError(f"pixel values must lie in [0, {self.maxval}]")
        return self

    @classmethod
    def from_array(cls, pixels, maxval: int = 255) -> "GrayImage":
        pixels = np.asarray(pixels)
        if pixels.ndim != 2:
            raise InvalidInputError(f"expected a 2-d pixel array, got shape {pixels.shape}")
        try:
            return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels, maxval=maxval)

        except ValidationError as exc:
            raise InvalidInputError(str(exc)) from exc

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def pixel_count(self) -> int:
        return self.width * self.height

    def palette(self) -> np.ndarray:
        return np.unique(self.pixels)


def read_pgm(path: pathlib.Path) -> GrayImage:
    """Read a plain (P2) or raw (P5) PGM file as an 8-bit image."""
    try:
        with Image.open(path) as image:
            if image.format != "PPM" or image.mode not in ("L", "1"):
                raise InstanceFormatError(f"{path} is not a gray PGM image")
            pixels = np.asarray(image.convert("L"), dtype=np.int64)

    except (OSError, ValueError) as exc:
        raise InstanceFormatError(f"cannot read {path}: {exc}") from exc

    log.debug(f"Read {pixels.shape[1]}x{pixels.shape[0]} image from {path}")
    return GrayImage.from_array(pixels)


def write_pgm(image: GrayImage, path: pathlib.Path) -> pathlib.Path:
    """Write ``image`` as a raw PGM, rescaled to the full 8-bit range."""
    pixels = image.pixels * 255 // image.maxval
    Image.fromarray(pixels.astype(np.uint8), mode="L").save(path, format="PPM")
    return pathlib.Path(path)


def binarize(image: GrayImage, threshold: int = 128) -> GrayImage:
    return GrayImage.from_array((image.pixels >= threshold).astype(np.int64), maxval=1)


def salt_pepper_sites(
    pixel_count: int, fraction: float, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Flat positions of round(fraction * pixel_count) distinct pixels, plus a
    fair coin per position (1 means the maximum value)."""
    if not 0.0 <= fraction <= 1.0:
        raise InvalidInputError(f"noise fraction must lie in [0, 1], got {fraction}")
    count = int(np.floor(fraction * pixel_count + 0.5))
    positions = rng.choice(pixel_count, size=count, replace=False)
    coins = rng.integers(0, 2, size=count)
    return positions, coins


def salt_pepper(image: GrayImage, fraction: float, rng: np.random.Generator) -> GrayImage:
    """Replace a fraction of the pixels with 0 or the brightest value present
    in ``image`` (its top palette value), by fair coin."""
    positions, coins = salt_pepper_sites(image.pixel_count, fraction, rng)
    pixels = image.pixels.copy().reshape(-1)
    salt = int(pixels.max()) if pixels.size else 0
    pixels[positions] = coins * salt
    log.debug(f"salt & pepper replaced {len(positions)} of {image.pixel_count} pixels")
    return GrayImage.from_array(pixels.reshape(image.shape), maxval=image.maxval)


def labeling_to_image(x, shape: Tuple[int, int], palette, maxval: int = 255) -> GrayImage:
    """Paint each node with its label's palette value. Nodes are pixels in
    row-major order."""
    palette = np.asarray(palette, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64)
    if x.size != shape[0] * shape[1]:
        raise InvalidInputError(f"{x.size} labels cannot fill a {shape[1]}x{shape[0]} image")
    return GrayImage.from_array(palette[x].reshape(shape), maxval=maxval)


def error_rate(x, clean: GrayImage, palette) -> float:
    """Fraction of pixels whose label paints a different value than ``clean``."""
    restored = labeling_to_image(x, clean.shape, palette, maxval=clean.maxval)
    return float(np.count_nonzero(restored.pixels != clean.pixels) / clean.pixel_count)
