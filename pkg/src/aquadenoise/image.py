"""Grayscale images: representation, PGM/PNG I/O and padding.

Samples are kept as float64 in the 8-bit intensity convention (nominally
0-255). Nothing is clamped or rounded until :func:`save_image`, so noise
addition and wavelet reconstruction lose no precision on the way.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Image",
    "ImageFormatError",
    "load_image",
    "save_image",
    "pad_symmetric",
    "crop",
    "luma",
    "quantize",
]

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


class ImageFormatError(ValueError):
    """Raised when an image file cannot be decoded."""


@dataclass(frozen=True, eq=False)
class Image:
    """Immutable 2D grayscale raster.

    ``samples`` has shape ``(height, width)`` and is stored row-major as a
    read-only float64 array.
    """

    samples: np.ndarray

    def __post_init__(self):
        data = np.array(self.samples, dtype=np.float64, copy=True)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"image samples must be a non-empty 2D array, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("image samples must be finite")
        data.setflags(write=False)
        object.__setattr__(self, "samples", data)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape

    def __array__(self, dtype=None, copy=None):
        return self.samples if dtype is None else self.samples.astype(dtype)

    def __repr__(self):
        return f"Image(width={self.width}, height={self.height})"


def as_array(img) -> np.ndarray:
    """Samples of an :class:`Image` or any array-like, as a float64 array."""
    if isinstance(img, Image):
        return img.samples
    return np.asarray(img, dtype=np.float64)


def luma(rgb) -> np.ndarray:
    """Rec. 601 luma ``0.299 R + 0.587 G + 0.114 B`` of an ``(..., 3)`` array."""
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = LUMA_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


# -- PGM ---------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def _pgm_header(buf: bytes):
    """Parse magic, width, height, maxval; return them and the payload offset."""
    fields = []
    pos = 0
    for _ in range(4):
        m = _TOKEN.match(buf, pos)
        if m is None:
            raise ImageFormatError("truncated PGM header")
        fields.append(m.group(1))
        pos = m.end()
    magic = fields[0].decode("ascii", "replace")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError:
        raise ImageFormatError("malformed PGM header") from None
    return magic, width, height, maxval, pos


def _read_pgm(buf: bytes) -> np.ndarray:
    magic, width, height, maxval, pos = _pgm_header(buf)
    if magic not in ("P2", "P5"):
        raise ImageFormatError(f"unsupported PNM magic {magic!r}; expected P2 or P5 grayscale")
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise ImageFormatError(f"unsupported bit depth: maxval {maxval} (only 8-bit, maxval <= 255)")
    count = width * height
    if magic == "P5":
        # Exactly one whitespace byte separates the header from binary data.
        payload = buf[pos + 1 : pos + 1 + count]
        if len(payload) < count:
            raise ImageFormatError(
                f"truncated payload: header says {width}x{height} ({count} bytes), got {len(payload)}"
            )
        values = np.frombuffer(payload, dtype=np.uint8)
    else:
        tokens = buf[pos:].split()
        if len(tokens) < count:
            raise ImageFormatError(
                f"truncated payload: header says {width}x{height} ({count} values), got {len(tokens)}"
            )
        values = np.array([int(t) for t in tokens[:count]])
    if values.max(initial=0) > maxval:
        raise ImageFormatError(f"sample exceeds maxval {maxval}")
    data = values.reshape(height, width).astype(np.float64)
    if maxval != 255:
        data *= 255.0 / maxval
    return data


def _read_png(path: Path) -> np.ndarray:
    from PIL import Image as PILImage

    with PILImage.open(path) as im:
        mode = im.mode
        if mode in ("L", "P", "RGB", "RGBA", "LA", "1"):
            if mode == "P":
                im = im.convert("RGBA" if "transparency" in im.info else "RGB")
                mode = im.mode
            arr = np.asarray(im)
        else:
            raise ImageFormatError(f"unsupported PNG mode {mode!r} (only 8-bit grayscale or RGB)")
    if mode == "1":
        return arr.astype(np.float64) * 255.0
    if arr.ndim == 2:
        return arr.astype(np.float64)
    if mode == "LA":
        return arr[..., 0].astype(np.float64)
    return luma(arr[..., :3])


def load_image(path) -> Image:
    """Read an 8-bit grayscale PGM (P2/P5) or 8-bit grayscale/RGB PNG.

    RGB pixels are converted with the 0.299/0.587/0.114 luma weights and kept
    as real values.

    Raises
    ------
    ImageFormatError
        On malformed headers, truncated payloads and unsupported depths.
    OSError
        If the file cannot be read.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
        rest = fh.read()
    buf = head + rest
    if head.startswith(b"\x89PNG"):
        data = _read_png(path)
    elif head[:1] == b"P":
        data = _read_pgm(buf)
    else:
        raise ImageFormatError(f"{path.name}: not a PGM or PNG file")
    return Image(data)


def quantize(img) -> np.ndarray:
    """Clamp to [0, 255] and round half away from zero, as ``uint8``."""
    data = np.clip(as_array(img), 0.0, 255.0)
    # Values are non-negative after clamping, so floor(x + 0.5) rounds half up (= away from zero).
    return np.floor(data + 0.5).astype(np.uint8)


def save_image(img, path) -> None:
    """Write ``img`` as binary P5 PGM, or PNG when ``path`` ends in ``.png``."""
    path = Path(path)
    data = quantize(img)
    if path.suffix.lower() == ".png":
        from PIL import Image as PILImage

        PILImage.fromarray(data, mode="L").save(path)
        return
    height, width = data.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(data.tobytes())
    os.replace(tmp, path)


# -- padding -----------------------------------------------------------------


def pad_symmetric(img, multiple: int) -> tuple[Image, tuple[int, int]]:
    """Pad bottom/right with whole-sample reflection up to a multiple.

    Returns the padded image and the original ``(height, width)`` so that
    :func:`crop` can undo the padding. A row ``[a, b, c]`` padded to length 5
    becomes ``[a, b, c, b, a]``.
    """
    if multiple < 1:
        raise ValueError("multiple must be >= 1")
    data = as_array(img)
    h, w = data.shape
    ph = -h % multiple
    pw = -w % multiple
    if ph == 0 and pw == 0:
        return (img if isinstance(img, Image) else Image(data)), (h, w)
    # numpy's "reflect" is whole-sample symmetric; a length-1 axis can only repeat.
    padded = np.pad(data, ((0, ph), (0, 0)), mode="reflect" if h > 1 else "edge")
    padded = np.pad(padded, ((0, 0), (0, pw)), mode="reflect" if w > 1 else "edge")
    return Image(padded), (h, w)


def crop(img, dims: tuple[int, int]) -> Image:
    """Top-left ``(height, width)`` sub-raster of ``img``."""
    data = as_array(img)
    h, w = (int(v) for v in dims)
    if h < 1 or w < 1 or h > data.shape[0] or w > data.shape[1]:
        raise ValueError(f"cannot crop {data.shape[0]}x{data.shape[1]} image to {h}x{w}")
    return Image(data[:h, :w])
