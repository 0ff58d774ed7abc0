"""AES-128 in CBC or OFB mode without padding, plus per-participant IVs.

Ciphertext is always exactly as long as the plaintext, so an encrypted
pixel stream still fits the original image.  There is no integrity
protection at this layer.
"""

from __future__ import annotations

import enum
import hashlib

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

try:
    from cryptography.hazmat.decrepit.ciphers.modes import OFB
except ImportError:  # older cryptography releases
    OFB = modes.OFB

from .gf64 import FieldElement

BLOCK_SIZE = 16
KEY_SIZE = 16


class CipherError(ValueError):
    pass


class CipherMode(str, enum.Enum):
    CBC = "cbc"
    OFB = "ofb"


class IvDerivation(str, enum.Enum):
    SHA = "sha"  # first 16 bytes of SHA-256(identifier)
    CONCAT = "concat"  # identifier bytes twice


def derive_iv(identifier: FieldElement, derivation: IvDerivation | str = IvDerivation.SHA) -> bytes:
    raw = identifier.to_bytes()
    derivation = IvDerivation(derivation)
    if derivation is IvDerivation.SHA:
        return hashlib.sha256(raw).digest()[:BLOCK_SIZE]
    return raw + raw


def _cipher(key: bytes, iv: bytes, mode: CipherMode | str) -> Cipher:
    if len(key) != KEY_SIZE:
        raise CipherError(f"AES-128 key must be {KEY_SIZE} bytes, got {len(key)}")
    if len(iv) != BLOCK_SIZE:
        raise CipherError(f"IV must be {BLOCK_SIZE} bytes, got {len(iv)}")
    mode = CipherMode(mode)
    block_mode = modes.CBC(iv) if mode is CipherMode.CBC else OFB(iv)
    return Cipher(algorithms.AES(key), block_mode)


def _check_aligned(data, what: str) -> None:
    size = memoryview(data).nbytes
    if size % BLOCK_SIZE:
        raise CipherError(f"{what} not block-aligned: {size} bytes")


# Streaming in cache-sized pieces keeps the cost per byte flat for large images.
CHUNK = 1 << 16


def _stream(ctx, data, out) -> None:
    src = memoryview(data).cast("B")
    dst = memoryview(out).cast("B")
    if len(dst) != len(src):
        raise CipherError(f"output buffer is {len(dst)} bytes, input is {len(src)}")
    for off in range(0, len(src), CHUNK):
        piece = ctx.update(src[off : off + CHUNK])
        dst[off : off + len(piece)] = piece
    # no padding and block-aligned input: nothing is buffered
    ctx.finalize()


def encrypt_into(plaintext, out, key: bytes, iv: bytes, mode: CipherMode | str = CipherMode.CBC) -> None:
    """Encrypt ``plaintext`` into the writable buffer ``out`` of the same length."""
    _check_aligned(plaintext, "plaintext")
    _stream(_cipher(key, iv, mode).encryptor(), plaintext, out)


def decrypt_into(ciphertext, out, key: bytes, iv: bytes, mode: CipherMode | str = CipherMode.CBC) -> None:
    _check_aligned(ciphertext, "ciphertext")
    _stream(_cipher(key, iv, mode).decryptor(), ciphertext, out)


def encrypt(plaintext: bytes, key: bytes, iv: bytes, mode: CipherMode | str = CipherMode.CBC) -> bytes:
    out = bytearray(len(plaintext))
    encrypt_into(plaintext, out, key, iv, mode)
    return bytes(out)


def decrypt(ciphertext: bytes, key: bytes, iv: bytes, mode: CipherMode | str = CipherMode.CBC) -> bytes:
    out = bytearray(len(ciphertext))
    decrypt_into(ciphertext, out, key, iv, mode)
    return bytes(out)
