"""Lossless PPM (P6) / PNG I/O, pixel bitstreams and margin padding.

Pixels are held as a ``(height, width, 3)`` uint8 array.  The bitstream of
an image is its row-major R, G, B byte stream read MSB-first.
"""

from __future__ import annotations

import io
import os
import secrets
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import BinaryIO, Union

import numpy as np
from PIL import Image

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"
ALIGN = 4  # both sides multiples of 4 -> pixel count multiple of 16

Source = Union[str, os.PathLike, bytes, BinaryIO]


class ImageFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ImagePayload:
    width: int
    height: int
    pixels: np.ndarray
    channel_depth: int = 255

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width, 3) or self.pixels.dtype != np.uint8:
            raise ValueError(
                f"pixels must be uint8 of shape {(self.height, self.width, 3)}, "
                f"got {self.pixels.dtype} {self.pixels.shape}"
            )

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int) -> ImagePayload:
        if len(data) != 3 * width * height:
            raise ValueError(f"expected {3 * width * height} pixel bytes, got {len(data)}")
        pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width, 3).copy()
        return cls(width, height, pixels)

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()

    @property
    def nbits(self) -> int:
        return 24 * self.width * self.height

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImagePayload):
            return NotImplemented
        return (self.width, self.height) == (other.width, other.height) and np.array_equal(
            self.pixels, other.pixels
        )


@dataclass(frozen=True)
class PaddingRecord:
    original_width: int
    original_height: int
    pad_right: int = 0
    pad_bottom: int = 0

    @property
    def is_zero(self) -> bool:
        return self.pad_right == 0 and self.pad_bottom == 0


# -- bitstreams ---------------------------------------------------------------

def bits_of(payload: ImagePayload) -> np.ndarray:
    """Flat 0/1 array of the pixel data, MSB-first within each byte."""
    return np.unpackbits(payload.pixels.reshape(-1))


def payload_of(bits: np.ndarray, width: int, height: int) -> ImagePayload:
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size != 24 * width * height:
        raise ValueError(f"expected {24 * width * height} bits, got {bits.size}")
    return ImagePayload(width, height, np.packbits(bits).reshape(height, width, 3))


# -- padding ------------------------------------------------------------------

def _round_up(v: int) -> int:
    return -(-v // ALIGN) * ALIGN


def pad_to_alignment(payload: ImagePayload, rng: Random | None = None) -> tuple[ImagePayload, PaddingRecord]:
    """Extend right/bottom margins with random pixels to multiples of 4."""
    w, h = _round_up(payload.width), _round_up(payload.height)
    record = PaddingRecord(payload.width, payload.height, w - payload.width, h - payload.height)
    if record.is_zero:
        return payload, record
    rng = rng or secrets.SystemRandom()
    pixels = np.frombuffer(rng.randbytes(3 * w * h), dtype=np.uint8).reshape(h, w, 3).copy()
    pixels[: payload.height, : payload.width] = payload.pixels
    return ImagePayload(w, h, pixels), record


def crop_padding(payload: ImagePayload, record: PaddingRecord) -> ImagePayload:
    w, h = record.original_width, record.original_height
    if (w + record.pad_right, h + record.pad_bottom) != (payload.width, payload.height):
        raise ValueError(
            f"padding record {w}+{record.pad_right} x {h}+{record.pad_bottom} "
            f"does not match a {payload.width}x{payload.height} image"
        )
    if record.is_zero:
        return payload
    return ImagePayload(w, h, payload.pixels[:h, :w].copy())


# -- PPM ------------------------------------------------------------------------

def _ppm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in b" \t\r\n\x0b\x0c":
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in b" \t\r\n\x0b\x0c#":
            pos += 1
        if start == pos:
            raise ImageFormatError(f"truncated PPM header at byte offset {pos}")
        tokens.append(data[start:pos])
    return tokens, pos


def decode_ppm(data: bytes) -> ImagePayload:
    if data[:2] == b"P3":
        raise ImageFormatError("unsupported format: ASCII PPM (P3); only binary P6 is accepted")
    if data[:2] != b"P6":
        raise ImageFormatError("not a P6 PPM file")
    tokens, pos = _ppm_tokens(data, 4)
    try:
        width, height, maxval = (int(tok) for tok in tokens[1:])
    except ValueError:
        raise ImageFormatError(f"malformed PPM header: {b' '.join(tokens)!r}") from None
    if width <= 0 or height <= 0:
        raise ImageFormatError(f"invalid PPM dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported depth: maxval {maxval}, only 255 is accepted")
    if pos >= len(data):
        raise ImageFormatError(f"truncated PPM stream at byte offset {pos}")
    pos += 1  # single whitespace byte after maxval
    need = 3 * width * height
    body = data[pos : pos + need]
    if len(body) < need:
        raise ImageFormatError(
            f"truncated PPM stream at byte offset {pos + len(body)}: expected {need} pixel bytes"
        )
    return ImagePayload.from_bytes(body, width, height)


def encode_ppm(payload: ImagePayload) -> bytes:
    return b"P6\n%d %d\n255\n" % (payload.width, payload.height) + payload.to_bytes()


# -- PNG ------------------------------------------------------------------------

def decode_png(data: bytes) -> ImagePayload:
    # IHDR is mandated first: 8 magic + 4 length + 4 type, then w, h, depth, colour type.
    if len(data) < 33 or data[12:16] != b"IHDR":
        raise ImageFormatError(f"truncated or malformed PNG header at byte offset {min(len(data), 33)}")
    depth, colour = data[24], data[25]
    if depth != 8:
        raise ImageFormatError(f"unsupported PNG bit depth {depth}; only 8-bit is accepted")
    if colour not in (0, 2):
        raise ImageFormatError(
            f"unsupported PNG colour type {colour}; only RGB (2) and grayscale (0) are accepted"
        )
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except (OSError, SyntaxError, ValueError) as exc:
        raise ImageFormatError(f"corrupt PNG stream ({len(data)} bytes read): {exc}") from exc
    h, w, _ = arr.shape
    return ImagePayload(w, h, arr.copy())


def encode_png(payload: ImagePayload, compress_level: int = 6) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(payload.pixels, "RGB").save(buf, "PNG", compress_level=compress_level)
    return buf.getvalue()


# -- front door -------------------------------------------------------------------

def _read_source(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if hasattr(source, "read"):
        return source.read()
    return Path(source).read_bytes()


def read_image(source: Source) -> ImagePayload:
    """Decode a P6 PPM or 8-bit RGB/grayscale PNG (sniffed from the magic bytes)."""
    data = _read_source(source)
    if data.startswith(PNG_MAGIC):
        return decode_png(data)
    if data[:1] == b"P":
        return decode_ppm(data)
    raise ImageFormatError("unrecognised image format (expected PNG or PPM)")


def write_image(payload: ImagePayload, fmt: str = "png") -> bytes:
    fmt = fmt.lower()
    if fmt == "png":
        return encode_png(payload)
    if fmt in ("ppm", "pnm"):
        return encode_ppm(payload)
    raise ImageFormatError(f"unsupported output format {fmt!r}")


def save_image(payload: ImagePayload, path: str | os.PathLike, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".") or "png"
    try:
        path.write_bytes(write_image(payload, fmt))
    except OSError as exc:
        raise OSError(f"cannot write image to {path}: {exc.strerror or exc}") from exc
    return path
