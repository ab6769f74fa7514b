"""Grayscale image container, file I/O and controlled degradations.

Images are square n x n grids of density values in [0, 1], row-major with
index (i, j) = (row from top, column from left).  Byte images map to values
as value = byte / 255 exactly; the same mapping is used on write.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

__all__ = [
    "GrayscaleImage",
    "load_image",
    "save_image",
    "degrade",
    "cyclic_shift",
    "center_crop",
]

# BT.601 luma weights for RGB -> grayscale conversion.
_LUMA = np.array([0.299, 0.587, 0.114])

MIN_SIZE = 16


@dataclass(frozen=True)
class GrayscaleImage:
    """Square density image; pixels[i, j] is the value at row i, column j."""

    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] != px.shape[1]:
            raise ValueError(f"image must be square 2D, got shape {px.shape}")
        if px.shape[0] < MIN_SIZE:
            raise ValueError(f"image side must be >= {MIN_SIZE}, got {px.shape[0]}")
        if not np.isfinite(px).all():
            raise ValueError("image contains non-finite values")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("pixel values must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def n(self) -> int:
        return self.pixels.shape[0]


def center_crop(pixels: np.ndarray, side: int | None = None) -> np.ndarray:
    """Crop a 2D array to a centered square of the given (or maximal) side."""
    h, w = pixels.shape[:2]
    if side is None:
        side = min(h, w)
    if side > min(h, w):
        raise ValueError(f"cannot crop to {side} from {h}x{w}")
    top = (h - side) // 2
    left = (w - side) // 2
    return pixels[top:top + side, left:left + side]


def load_image(path: str | Path) -> GrayscaleImage:
    """Load a PNG or PGM file as a GrayscaleImage.

    RGB inputs are converted with BT.601 luma weights; non-square inputs are
    center-cropped to the largest square with a warning.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    if path.suffix.lower() == ".pgm":
        arr = _read_pgm(path)
    else:
        with PILImage.open(path) as im:
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.float64)
            elif im.mode in ("RGB", "RGBA", "P"):
                rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
                arr = rgb @ _LUMA
            else:
                arr = np.asarray(im.convert("L"), dtype=np.float64)
    if arr.size == 0:
        raise ValueError(f"zero-size image: {path}")
    if arr.shape[0] != arr.shape[1]:
        warnings.warn(
            f"non-square input {arr.shape[0]}x{arr.shape[1]}; center-cropping to square",
            stacklevel=2,
        )
        arr = center_crop(arr)
    return GrayscaleImage(arr / 255.0)


def _read_pgm(path: Path) -> np.ndarray:
    """Read a binary (P5) PGM file and return raw byte values as float64."""
    data = path.read_bytes()
    # Header: magic, width, height, maxval; '#' comments allowed between tokens.
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"truncated PGM header: {path}")
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    if tokens[0] != b"P5":
        raise ValueError(f"unsupported PGM magic {tokens[0]!r} (only binary P5)")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval <= 0 or maxval > 255:
        raise ValueError(f"unsupported PGM maxval {maxval}")
    count = width * height
    raw = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    if raw.size != count:
        raise ValueError(f"truncated PGM payload: {path}")
    arr = raw.reshape(height, width).astype(np.float64)
    # Rescale so maxval maps to 255 -> value 1.0 downstream.
    if maxval != 255:
        arr = arr * (255.0 / maxval)
    return arr


def save_image(img: GrayscaleImage, path: str | Path) -> None:
    """Write an 8-bit grayscale PNG; value -> round(value * 255)."""
    path = Path(path)
    byte = np.rint(img.pixels * 255.0).astype(np.uint8)
    PILImage.fromarray(byte, mode="L").save(path, format="PNG")


def degrade(img: GrayscaleImage, flip_fraction: float, seed: int) -> GrayscaleImage:
    """Invert round(flip_fraction * n^2) distinct pixels (v -> 1 - v), seeded."""
    if not 0.0 <= flip_fraction <= 1.0:
        raise ValueError("flip_fraction must lie in [0, 1]")
    n = img.n
    count = int(round(flip_fraction * n * n))
    if count == 0:
        return img
    rng = np.random.default_rng(seed)
    flat_idx = rng.choice(n * n, size=count, replace=False)
    px = img.pixels.copy()
    flat = px.reshape(-1)
    flat[flat_idx] = 1.0 - flat[flat_idx]
    return GrayscaleImage(px)


def cyclic_shift(img: GrayscaleImage, t: tuple[int, int]) -> GrayscaleImage:
    """Cyclically shift by t = (t_x, t_y): out(i, j) = in((i - t_y) % n, (j - t_x) % n)."""
    t_x, t_y = int(t[0]), int(t[1])
    return GrayscaleImage(np.roll(img.pixels, shift=(t_y, t_x), axis=(0, 1)))
