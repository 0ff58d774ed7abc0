"""Image sharing and reconstruction.

Sharing (per session):

1. pad the image to dimensions that are multiples of 4 with random pixels;
2. take 128 key bits from the pixel bitstream at ``key_position``;
3. Shamir-split the two 64-bit halves of the key over GF(2^64) with ``n``
   random distinct nonzero identifiers;
4. for each participant, AES-encrypt the remaining bits under the key with
   an IV derived from their identifier, and prepend their two 8-byte
   Shamir shares.

Each share is an ordinary image of the padded size.  Its identifier and the
session parameters travel in a ``key = value`` sidecar file next to it.

The 128 key bits are protected information-theoretically by Shamir; the
rest of the image only computationally, by AES.  Nothing authenticates the
shares beyond a checksum of the original that is verified after decryption.
"""

from __future__ import annotations

import hashlib
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from random import Random

import numpy as np

from . import imagecodec, shamir
from .cipher import CipherMode, IvDerivation, decrypt_into, derive_iv, encrypt_into
from .gf64 import FieldElement
from .imagecodec import ImagePayload, PaddingRecord

FORMAT_VERSION = 1
KEY_BITS = 128
CHUNK_BITS = 64
META_SUFFIX = ".meta"


class SchemeError(ValueError):
    pass


class InsufficientSharesError(SchemeError):
    pass


class InconsistentSessionError(SchemeError):
    pass


class ReconstructionError(SchemeError):
    pass


class MetadataError(SchemeError):
    pass


@dataclass(frozen=True)
class SchemeParams:
    t: int
    n: int
    mode: CipherMode = CipherMode.CBC
    iv_derivation: IvDerivation = IvDerivation.SHA
    key_position: int = 0
    key_bits: int = KEY_BITS

    def __post_init__(self):
        object.__setattr__(self, "mode", CipherMode(self.mode))
        object.__setattr__(self, "iv_derivation", IvDerivation(self.iv_derivation))
        if not 1 <= self.t <= self.n:
            raise SchemeError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")
        if self.key_bits != KEY_BITS:
            raise SchemeError(f"only {KEY_BITS}-bit keys are supported")
        if self.key_position < 0 or self.key_position % 8:
            raise SchemeError(f"key_position must be a non-negative multiple of 8, got {self.key_position}")

    @property
    def ell(self) -> int:
        return self.key_bits // CHUNK_BITS


@dataclass(frozen=True)
class SidecarMetadata:
    version: int
    session: str
    identifier: str
    index: int
    t: int
    n: int
    key_bits: int
    mode: str
    iv_derivation: str
    key_position: int
    width: int
    height: int
    original_width: int
    original_height: int
    pad_right: int
    pad_bottom: int
    checksum: str

    # everything except the per-participant fields
    SESSION_FIELDS = (
        "version", "session", "t", "n", "key_bits", "mode", "iv_derivation", "key_position",
        "width", "height", "original_width", "original_height", "pad_right", "pad_bottom", "checksum",
    )

    def session_key(self) -> tuple:
        return tuple(getattr(self, f) for f in self.SESSION_FIELDS)

    @property
    def padding(self) -> PaddingRecord:
        return PaddingRecord(self.original_width, self.original_height, self.pad_right, self.pad_bottom)

    def to_text(self) -> str:
        lines = ["# imgshare share metadata"]
        lines += [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> SidecarMetadata:
        types = {f.name: f.type for f in fields(cls)}
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise MetadataError(f"line {lineno}: expected 'key = value', got {line!r}")
            if key not in types:
                raise MetadataError(f"line {lineno}: unknown key {key!r}")
            if key in raw:
                raise MetadataError(f"line {lineno}: duplicate key {key!r}")
            raw[key] = value
        if "version" in raw and raw["version"] != str(FORMAT_VERSION):
            raise MetadataError(f"unsupported metadata version {raw['version']!r} (expected {FORMAT_VERSION})")
        missing = [k for k in types if k not in raw]
        if missing:
            raise MetadataError(f"truncated metadata: missing {', '.join(missing)}")
        values = {}
        for key, value in raw.items():
            if types[key] == "int":
                try:
                    values[key] = int(value)
                except ValueError:
                    raise MetadataError(f"{key} must be an integer, got {value!r}") from None
            else:
                values[key] = value
        meta = cls(**values)
        meta._validate()
        return meta

    def _validate(self) -> None:
        try:
            int(self.identifier, 16)
            bytes.fromhex(self.session)
            CipherMode(self.mode)
            IvDerivation(self.iv_derivation)
        except ValueError as exc:
            raise MetadataError(f"malformed metadata value: {exc}") from None
        if len(self.identifier) != 16:
            raise MetadataError("identifier must be 16 hex digits")
        if not self.checksum.startswith("sha256:"):
            raise MetadataError(f"unknown checksum {self.checksum!r}")


@dataclass(frozen=True)
class ShareBundle:
    identifier: FieldElement
    share_image: ImagePayload
    metadata: SidecarMetadata


def image_checksum(image: ImagePayload) -> str:
    h = hashlib.sha256(b"%dx%d:" % (image.width, image.height))
    h.update(np.ascontiguousarray(image.pixels))
    return "sha256:" + h.hexdigest()


def generate_shares(
    image: ImagePayload,
    params: SchemeParams,
    rng: Random | None = None,
    jobs: int = 1,
) -> list[ShareBundle]:
    """Produce ``params.n`` share bundles of ``image``."""
    rng = rng or secrets.SystemRandom()
    padded, record = imagecodec.pad_to_alignment(image, rng)
    data = padded.pixels.reshape(-1)
    kpos = params.key_position // 8
    nkey = params.key_bits // 8
    if kpos + nkey > len(data):
        raise SchemeError(
            f"key_position {params.key_position} + {params.key_bits} bits exceeds the {8 * len(data)}-bit image"
        )
    key = data[kpos : kpos + nkey].tobytes()
    rest = data[nkey:] if kpos == 0 else np.concatenate((data[:kpos], data[kpos + nkey :]))

    ids = shamir.random_identifiers(params.n, rng)
    chunk_shares = [
        shamir.split(FieldElement.from_bytes(key[8 * j : 8 * j + 8]), params.t, params.n, ids, rng)
        for j in range(params.ell)
    ]
    session = rng.randbytes(8).hex()
    checksum = image_checksum(image)

    def build(i: int) -> ShareBundle:
        ident = ids[i]
        prefix = b"".join(chunk_shares[j][i].value.to_bytes() for j in range(params.ell))
        out = np.empty(data.size, dtype=np.uint8)
        out[:nkey] = np.frombuffer(prefix, dtype=np.uint8)
        encrypt_into(rest, out[nkey:], key, derive_iv(ident, params.iv_derivation), params.mode)
        meta = SidecarMetadata(
            version=FORMAT_VERSION,
            session=session,
            identifier=ident.to_bytes().hex(),
            index=i + 1,
            t=params.t,
            n=params.n,
            key_bits=params.key_bits,
            mode=params.mode.value,
            iv_derivation=params.iv_derivation.value,
            key_position=params.key_position,
            width=padded.width,
            height=padded.height,
            original_width=record.original_width,
            original_height=record.original_height,
            pad_right=record.pad_right,
            pad_bottom=record.pad_bottom,
            checksum=checksum,
        )
        share = ImagePayload(padded.width, padded.height, out.reshape(padded.height, padded.width, 3))
        return ShareBundle(ident, share, meta)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(build, range(params.n)))
    return [build(i) for i in range(params.n)]


def _check_session(bundles: list[ShareBundle]) -> SidecarMetadata:
    if not bundles:
        raise InsufficientSharesError("insufficient shares: none given")
    meta = bundles[0].metadata
    for b in bundles[1:]:
        if b.metadata.session_key() != meta.session_key():
            raise InconsistentSessionError("shares belong to different sharing sessions")
    idents = [b.identifier for b in bundles]
    if len(set(idents)) != len(idents):
        raise SchemeError("duplicate share identifiers")
    for b in bundles:
        if (b.share_image.width, b.share_image.height) != (meta.width, meta.height):
            raise InconsistentSessionError(
                f"share {b.metadata.index} is {b.share_image.width}x{b.share_image.height}, "
                f"metadata says {meta.width}x{meta.height}"
            )
    if len(bundles) < meta.t:
        raise InsufficientSharesError(f"insufficient shares: have {len(bundles)}, need {meta.t}")
    return meta


def recover_key(bundles: list[ShareBundle]) -> bytes:
    """Interpolate the key chunks from the share prefixes."""
    meta = _check_session(bundles)
    ell = meta.key_bits // CHUNK_BITS
    prefixes = [b.share_image.pixels.reshape(-1)[: meta.key_bits // 8].tobytes() for b in bundles]
    key = b""
    for j in range(ell):
        points = [
            shamir.ShamirShare(b.identifier, FieldElement.from_bytes(p[8 * j : 8 * j + 8]))
            for b, p in zip(bundles, prefixes)
        ]
        key += shamir.reconstruct(points, meta.t).to_bytes()
    return key


def reconstruct(bundles: list[ShareBundle], verify_all: bool = True) -> ImagePayload:
    """Rebuild the original image from at least ``t`` bundles.

    The first ``t`` bundles are used.  Every used share's body is decrypted
    and checked against the original's checksum (only the first one when
    ``verify_all`` is false).
    """
    bundles = list(bundles)
    meta = _check_session(bundles)
    key = recover_key(bundles)
    kpos = meta.key_position // 8
    nkey = meta.key_bits // 8
    mode = CipherMode(meta.mode)

    result = None
    used = bundles[: meta.t] if verify_all else bundles[:1]
    keyarr = np.frombuffer(key, dtype=np.uint8)
    for b in used:
        body = np.ascontiguousarray(b.share_image.pixels).reshape(-1)[nkey:]
        iv = derive_iv(b.identifier, meta.iv_derivation)
        out = np.empty(body.size + nkey, dtype=np.uint8)
        if kpos == 0:
            out[:nkey] = keyarr
            decrypt_into(body, out[nkey:], key, iv, mode)
        else:
            rest = np.empty(body.size, dtype=np.uint8)
            decrypt_into(body, rest, key, iv, mode)
            out[:kpos] = rest[:kpos]
            out[kpos : kpos + nkey] = keyarr
            out[kpos + nkey :] = rest[kpos:]
        padded = ImagePayload(meta.width, meta.height, out.reshape(meta.height, meta.width, 3))
        image = imagecodec.crop_padding(padded, meta.padding)
        if image_checksum(image) != meta.checksum:
            raise ReconstructionError(
                f"reconstruction failed: wrong or corrupted shares (checksum mismatch on share {b.metadata.index})"
            )
        if result is None:
            result = image
    return result


def inspect(bundle: ShareBundle) -> str:
    """Human-readable session summary.  Never touches share content."""
    m = bundle.metadata
    lines = [
        f"share {m.index} of {m.n} (threshold {m.t}), format version {m.version}",
        f"  session:        {m.session}",
        f"  identifier:     {m.identifier}",
        f"  cipher:         AES-{m.key_bits} {m.mode.upper()}, IV from {m.iv_derivation}",
        f"  key position:   bit {m.key_position}",
        f"  share size:     {m.width}x{m.height}",
        f"  original size:  {m.original_width}x{m.original_height} (pad right {m.pad_right}, bottom {m.pad_bottom})",
        f"  checksum:       {m.checksum}",
    ]
    return "\n".join(lines)


# -- files ------------------------------------------------------------------------

def sidecar_path(image_path: str | Path) -> Path:
    return Path(image_path).with_suffix(META_SUFFIX)


def save_bundle(bundle: ShareBundle, image_path: str | Path, fmt: str | None = None) -> tuple[Path, Path]:
    image_path = imagecodec.save_image(bundle.share_image, image_path, fmt)
    meta_path = sidecar_path(image_path)
    meta_path.write_text(bundle.metadata.to_text(), encoding="utf-8")
    return image_path, meta_path


def load_metadata(path: str | Path) -> SidecarMetadata:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise MetadataError(f"{path}: not UTF-8 text") from exc
    try:
        return SidecarMetadata.from_text(text)
    except MetadataError as exc:
        raise MetadataError(f"{path}: {exc}") from None


def load_bundle(image_path: str | Path, meta_path: str | Path | None = None) -> ShareBundle:
    meta = load_metadata(meta_path or sidecar_path(image_path))
    image = imagecodec.read_image(image_path)
    return ShareBundle(FieldElement(int(meta.identifier, 16)), image, meta)
