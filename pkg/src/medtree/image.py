"""Gray-value images: container, binary PGM (P5) I/O and synthetic test images."""

from __future__ import annotations

import math

import numpy as np

_DTYPES = {8: np.uint8, 16: np.uint16}


class PgmFormatError(ValueError):
    """Malformed or unsupported PGM data; message carries the byte position."""


class GrayImage:
    """A 2D grid of unsigned gray values with a declared bit depth.

    ``pixels`` is row-major, height x width, dtype uint8 for 8-bit data and
    uint16 for 16-bit data.  All values are < 2**bit_depth.
    """

    def __init__(self, pixels, bit_depth: int | None = None):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("pixels must be a non-empty 2D array")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"pixels must be integer-valued, got dtype {arr.dtype}")
        if bit_depth is None:
            bit_depth = 8 if arr.dtype == np.uint8 else 16
        if bit_depth not in _DTYPES:
            raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
        if arr.size and (arr.min() < 0 or int(arr.max()) >= (1 << bit_depth)):
            raise ValueError(f"pixel values outside [0, 2^{bit_depth})")
        self.pixels = arr.astype(_DTYPES[bit_depth], copy=False)
        self.bit_depth = int(bit_depth)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GrayImage)
            and self.bit_depth == other.bit_depth
            and self.pixels.shape == other.pixels.shape
            and bool(np.array_equal(self.pixels, other.pixels))
        )

    def __repr__(self) -> str:
        return f"GrayImage({self.width}x{self.height}, {self.bit_depth}-bit)"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments, return (token, position after it)
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise PgmFormatError(f"unexpected end of header at byte {pos}")
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def read_pgm(path) -> GrayImage:
    """Read a binary (P5) PGM file.

    maxval 255 maps to an 8-bit image; maxval in 256..65535 maps to a
    16-bit image with two-byte big-endian samples.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    magic, pos = _next_token(data, 0)
    if magic != b"P5":
        raise PgmFormatError(
            f"unsupported format {magic!r} at byte 0 (only binary P5 is supported)"
        )
    fields = []
    for _ in range(3):
        tok, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise PgmFormatError(f"non-numeric header field {tok!r} at byte {pos - len(tok)}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PgmFormatError(f"bad dimensions {width}x{height} in header")
    if maxval == 255:
        bit_depth, dtype = 8, np.dtype(np.uint8)
    elif 256 <= maxval <= 65535:
        bit_depth, dtype = 16, np.dtype(">u2")
    else:
        raise PgmFormatError(f"unsupported maxval {maxval} at byte {pos - len(str(maxval))}")
    pos += 1  # single whitespace byte after maxval
    count = width * height
    body = data[pos : pos + count * dtype.itemsize]
    if len(body) < count * dtype.itemsize:
        raise PgmFormatError(
            f"truncated pixel data at byte {pos + len(body)}: "
            f"expected {count * dtype.itemsize} bytes, got {len(body)}"
        )
    arr = np.frombuffer(body, dtype=dtype).reshape(height, width)
    return GrayImage(arr.astype(_DTYPES[bit_depth]), bit_depth)


def write_pgm(image: GrayImage, path) -> None:
    """Write a binary (P5) PGM file; 16-bit samples are big-endian."""
    header = f"P5\n{image.width} {image.height}\n{image.max_value}\n".encode("ascii")
    if image.bit_depth == 8:
        body = image.pixels.astype(np.uint8).tobytes()
    else:
        body = image.pixels.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + body)


def gen_image(
    kind: str,
    width: int,
    height: int,
    bit_depth: int = 8,
    seed: int | None = None,
    **params,
) -> GrayImage:
    """Deterministic synthetic test image of the given kind.

    Kinds:
      constant      one gray value everywhere (param ``value``)
      normal_noise  i.i.d. Gaussian noise, rounded and clamped
                    (params ``mean``, ``sigma``; defaults 2^(d-1) and 2^(d-1)/3)
      sine_diag     sine pattern constant along anti-diagonals with the given
                    period measured along the diagonal (param ``period``)
      two_mode      Gaussian mixture concentrated in a narrow value range
                    (params ``centers``, ``sigma``)
    """
    if bit_depth not in _DTYPES:
        raise ValueError(f"bit_depth must be 8 or 16, got {bit_depth}")
    if width < 1 or height < 1:
        raise ValueError("image dimensions must be positive")
    top = (1 << bit_depth) - 1
    rng = np.random.default_rng(seed)

    if kind == "constant":
        value = int(params.pop("value", 1 << (bit_depth - 1)))
        arr = np.full((height, width), value, dtype=np.int64)
    elif kind == "normal_noise":
        mean = float(params.pop("mean", 1 << (bit_depth - 1)))
        sigma = float(params.pop("sigma", (1 << (bit_depth - 1)) / 3.0))
        arr = np.rint(rng.normal(mean, sigma, size=(height, width)))
    elif kind == "sine_diag":
        period = float(params.pop("period", 100.0))
        x = np.arange(width, dtype=np.float64)
        y = np.arange(height, dtype=np.float64)[:, None]
        phase = 2.0 * math.pi * (x + y) / (period * math.sqrt(2.0))
        arr = np.rint(top * (0.5 + 0.5 * np.sin(phase)))
    elif kind == "two_mode":
        scale = float(1 << bit_depth)
        c1, c2 = params.pop("centers", (0.27 * scale, 0.33 * scale))
        sigma = float(params.pop("sigma", 0.014 * scale))
        pick = rng.random(size=(height, width)) < 0.5
        arr = np.rint(rng.normal(np.where(pick, c1, c2), sigma))
    else:
        raise ValueError(f"unknown image kind {kind!r}")
    if params:
        raise ValueError(f"unexpected parameters for kind {kind!r}: {sorted(params)}")
    return GrayImage(np.clip(arr, 0, top).astype(_DTYPES[bit_depth]), bit_depth)
