"""Threshold secret sharing for images over GF(2^64) with AES-128."""

from .gf64 import FieldElement, PrimeFieldElement
from .imagecodec import ImagePayload, PaddingRecord, read_image, write_image
from .scheme import SchemeParams, ShareBundle, generate_shares, reconstruct

__all__ = [
    "FieldElement",
    "PrimeFieldElement",
    "ImagePayload",
    "PaddingRecord",
    "SchemeParams",
    "ShareBundle",
    "generate_shares",
    "read_image",
    "reconstruct",
    "write_image",
]
