import random
from dataclasses import replace
from itertools import combinations

import numpy as np
import pytest

from conftest import random_image
from imgshare import scheme, shamir
from imgshare.gf64 import FieldElement
from imgshare.imagecodec import ImagePayload
from imgshare.scheme import (
    InconsistentSessionError,
    InsufficientSharesError,
    MetadataError,
    ReconstructionError,
    SchemeError,
    SchemeParams,
    ShareBundle,
    SidecarMetadata,
)


def _tamper(bundle: ShareBundle, offset: int) -> ShareBundle:
    pixels = bundle.share_image.pixels.copy()
    pixels.reshape(-1)[offset] ^= 0x01
    return replace(bundle, share_image=ImagePayload(bundle.share_image.width, bundle.share_image.height, pixels))


def test_params_validation():
    with pytest.raises(SchemeError):
        SchemeParams(3, 2)
    with pytest.raises(SchemeError):
        SchemeParams(0, 2)
    with pytest.raises(SchemeError):
        SchemeParams(2, 3, key_position=12)
    with pytest.raises(SchemeError):
        SchemeParams(2, 3, key_bits=256)
    with pytest.raises(ValueError):
        SchemeParams(2, 3, mode="ecb")
    p = SchemeParams(2, 3, "ofb", "concat")
    assert p.ell == 2 and p.mode.value == "ofb" and p.iv_derivation.value == "concat"


def test_single_share_degenerate(rng):
    img = random_image(16, 16, rng)
    [b] = scheme.generate_shares(img, SchemeParams(1, 1, iv_derivation="concat"), rng)
    # constant polynomials: the prefix is the key, i.e. the first 16 image bytes
    assert b.share_image.to_bytes()[:16] == img.to_bytes()[:16]
    assert scheme.reconstruct([b]) == img


def test_three_shares_two_needed(rng):
    img = random_image(40, 24, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    assert len(bundles) == 3
    assert scheme.reconstruct(bundles[:2]) == img
    for pair in combinations(bundles, 2):
        assert scheme.reconstruct(list(pair)) == img


@pytest.mark.parametrize("t, n", [(2, 3), (3, 5), (5, 5)])
def test_all_subsets(t, n, rng):
    img = random_image(32, 32, rng)
    bundles = scheme.generate_shares(img, SchemeParams(t, n), rng)
    for subset in combinations(bundles, t):
        assert scheme.reconstruct(list(subset)) == img


@pytest.mark.parametrize("mode", ["cbc", "ofb"])
@pytest.mark.parametrize("iv", ["sha", "concat"])
@pytest.mark.parametrize("key_position", [0, 8, 1024, 24 * 8 * 8 - 128])
def test_variants(mode, iv, key_position, rng):
    img = random_image(8, 8, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 4, mode, iv, key_position), rng)
    assert scheme.reconstruct(bundles[1:3]) == img


def test_key_position_out_of_range(rng):
    img = random_image(4, 4, rng)
    with pytest.raises(SchemeError, match="exceeds"):
        scheme.generate_shares(img, SchemeParams(2, 3, key_position=24 * 16 - 120), rng)


def test_key_position_moves_key(rng):
    img = random_image(8, 8, rng)
    [b] = scheme.generate_shares(img, SchemeParams(1, 1, key_position=80), rng)
    assert b.share_image.to_bytes()[:16] == img.to_bytes()[10:26]


def test_prefix_is_shamir_share(rng):
    img = random_image(12, 12, rng)
    bundles = scheme.generate_shares(img, SchemeParams(3, 4), rng)
    key = img.to_bytes()[:16]
    for j in range(2):
        pts = [
            shamir.ShamirShare(b.identifier, FieldElement.from_bytes(b.share_image.to_bytes()[8 * j : 8 * j + 8]))
            for b in bundles
        ]
        assert shamir.reconstruct(pts[1:], 3).to_bytes() == key[8 * j : 8 * j + 8]


def test_resolution_and_distinctness(rng):
    img = random_image(13, 7, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 4), rng)
    for b in bundles:
        assert (b.share_image.width, b.share_image.height) == (16, 8)
    raws = [b.share_image.to_bytes() for b in bundles]
    assert len(set(raws)) == 4
    assert len({b.identifier for b in bundles}) == 4


def test_shares_differ_in_about_half_the_bits(rng):
    img = random_image(64, 64, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    bodies = [np.unpackbits(b.share_image.pixels.reshape(-1)[16:]) for b in bundles]
    for a, b in combinations(bodies, 2):
        assert np.mean(a != b) > 0.49


def test_under_threshold_fails(rng):
    img = random_image(16, 16, rng)
    bundles = scheme.generate_shares(img, SchemeParams(3, 5), rng)
    with pytest.raises(InsufficientSharesError, match="insufficient shares"):
        scheme.reconstruct(bundles[:2])
    with pytest.raises(InsufficientSharesError):
        scheme.reconstruct([])


def test_tampered_ciphertext_detected(rng):
    img = random_image(16, 16, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    for victim in (0, 1):
        used = list(bundles[:2])
        used[victim] = _tamper(used[victim], 100)
        with pytest.raises(ReconstructionError, match="wrong or corrupted shares"):
            scheme.reconstruct(used)


def test_tampered_prefix_detected(rng):
    img = random_image(16, 16, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    with pytest.raises(ReconstructionError):
        scheme.reconstruct([_tamper(bundles[0], 3), bundles[1]])


def test_verify_first_only(rng):
    img = random_image(16, 16, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    # second share's body is not decrypted in this mode
    assert scheme.reconstruct([bundles[0], _tamper(bundles[1], 100)], verify_all=False) == img


def test_mixed_sessions_rejected(rng):
    img = random_image(16, 16, rng)
    a = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    b = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    with pytest.raises(InconsistentSessionError):
        scheme.reconstruct([a[0], b[1]])


def test_duplicate_share_rejected(rng):
    img = random_image(16, 16, rng)
    a = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    with pytest.raises(SchemeError, match="duplicate"):
        scheme.reconstruct([a[0], a[0]])


def test_surplus_shares(rng):
    img = random_image(16, 16, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 4), rng)
    assert scheme.reconstruct(bundles) == img


def test_deterministic_under_seed():
    img = random_image(10, 10, random.Random(1))
    a = scheme.generate_shares(img, SchemeParams(2, 3), random.Random(42))
    b = scheme.generate_shares(img, SchemeParams(2, 3), random.Random(42), jobs=3)
    assert [x.share_image for x in a] == [y.share_image for y in b]
    assert [x.metadata for x in a] == [y.metadata for y in b]


def test_sidecar_roundtrip(rng):
    [b] = scheme.generate_shares(random_image(5, 6, rng), SchemeParams(1, 1, "ofb", "concat", 16), rng)
    text = b.metadata.to_text()
    assert SidecarMetadata.from_text(text) == b.metadata
    assert "identifier = " + b.identifier.to_bytes().hex() in text


def test_sidecar_rejections(rng):
    [b] = scheme.generate_shares(random_image(4, 4, rng), SchemeParams(1, 1), rng)
    text = b.metadata.to_text()
    with pytest.raises(MetadataError, match="version"):
        SidecarMetadata.from_text(text.replace("version = 1", "version = 2"))
    with pytest.raises(MetadataError, match="unknown key"):
        SidecarMetadata.from_text(text + "colour = blue\n")
    with pytest.raises(MetadataError, match="duplicate"):
        SidecarMetadata.from_text(text + "t = 1\n")
    with pytest.raises(MetadataError, match="integer"):
        SidecarMetadata.from_text(text.replace("t = 1", "t = one"))
    with pytest.raises(MetadataError):
        SidecarMetadata.from_text(text.replace("mode = cbc", "mode = ecb"))
    with pytest.raises(MetadataError, match="key = value"):
        SidecarMetadata.from_text(text + "garbage\n")


def test_sidecar_truncation_corpus(rng):
    [b] = scheme.generate_shares(random_image(4, 4, rng), SchemeParams(1, 1), rng)
    text = b.metadata.to_text()
    body_start = text.index("\n") + 1
    for cut in range(body_start, len(text) - 1):
        try:
            meta = SidecarMetadata.from_text(text[:cut])
        except MetadataError:
            continue
        # only cuts inside the trailing checksum hex can still parse; they must not match
        assert meta.checksum != b.metadata.checksum


def test_inspect_lists_fields(rng):
    [b] = scheme.generate_shares(random_image(5, 5, rng), SchemeParams(1, 1, key_position=8), rng)
    out = scheme.inspect(b)
    m = b.metadata
    for value in (m.session, m.identifier, m.checksum, "CBC", "bit 8", "8x8", "5x5"):
        assert str(value) in out
    # the key itself never appears
    key_hex = b.share_image.to_bytes()[:16].hex()
    assert key_hex not in out


def test_save_and_load(tmp_path, rng):
    img = random_image(9, 9, rng)
    bundles = scheme.generate_shares(img, SchemeParams(2, 3), rng)
    loaded = []
    for i, b in enumerate(bundles):
        for fmt in ("png", "ppm"):
            img_path, meta_path = scheme.save_bundle(b, tmp_path / f"s{i}.{fmt}")
            assert meta_path.name == f"s{i}.meta"
            back = scheme.load_bundle(img_path)
            assert back.share_image == b.share_image and back.metadata == b.metadata
        loaded.append(back)
    assert scheme.reconstruct(loaded[1:]) == img


def test_load_rejects_bad_sidecar(tmp_path, rng):
    [b] = scheme.generate_shares(random_image(4, 4, rng), SchemeParams(1, 1), rng)
    img_path, meta_path = scheme.save_bundle(b, tmp_path / "x.png")
    meta_path.write_bytes(b"\xff\xfe")
    with pytest.raises(MetadataError):
        scheme.load_bundle(img_path)
