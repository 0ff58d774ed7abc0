import subprocess
import sys

import pytest

from conftest import random_image
from imgshare import cli, imagecodec, scheme


@pytest.fixture
def image_file(tmp_path, rng):
    img = random_image(21, 14, rng)
    path = tmp_path / "bridge.png"
    imagecodec.save_image(img, path)
    return path, img


def test_share_then_reconstruct(tmp_path, image_file, capsys):
    path, img = image_file
    out = tmp_path / "shares"
    assert cli.main(["share", str(path), "-t", "2", "-n", "3", "-o", str(out), "--seed", "7"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [f"bridge.share{i}.{ext}" for i in (1, 2, 3) for ext in ("meta", "png")]

    rec = tmp_path / "rec.png"
    assert cli.main(["reconstruct", str(out / "bridge.share1.png"), str(out / "bridge.share2.png"), "-o", str(rec)]) == 0
    assert "checksum verified" in capsys.readouterr().out
    assert imagecodec.read_image(rec) == img
    # PNG-normalized input and output are the same byte stream
    assert rec.read_bytes() == imagecodec.write_image(imagecodec.read_image(path), "png")


def test_ppm_in_ppm_out(tmp_path, rng):
    img = random_image(8, 5, rng)
    src = tmp_path / "a.ppm"
    src.write_bytes(imagecodec.write_image(img, "ppm"))
    out = tmp_path / "s"
    assert cli.main(["share", str(src), "-t", "3", "-n", "3", "-o", str(out), "--format", "ppm",
                     "--mode", "ofb", "--iv-derivation", "concat", "--key-position", "64", "--jobs", "2"]) == 0
    rec = tmp_path / "r.ppm"
    shares = [str(out / f"a.share{i}.ppm") for i in (3, 1, 2)]
    assert cli.main(["reconstruct", *shares, "-o", str(rec)]) == 0
    assert rec.read_bytes() == src.read_bytes()


def test_seed_is_reproducible(tmp_path, image_file):
    path, _ = image_file
    for d in ("x", "y"):
        assert cli.main(["share", str(path), "-t", "2", "-n", "2", "-o", str(tmp_path / d), "--seed", "3"]) == 0
    for name in ("bridge.share1.png", "bridge.share2.meta"):
        assert (tmp_path / "x" / name).read_bytes() == (tmp_path / "y" / name).read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["share", "in.png", "-t", "3", "-n", "2"],
        ["share", "in.png", "-t", "0", "-n", "2"],
        ["share", "in.png", "-t", "2", "-n", "3", "--key-position", "5"],
        ["share", "in.png", "-t", "2", "-n", "3", "--mode", "ecb"],
        ["bench", "--grid", "2x3"],
        [],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2
    assert not any(tmp_path.iterdir())


def test_unwritable_output_dir(tmp_path, image_file, capsys):
    path, _ = image_file
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["share", str(path), "-t", "2", "-n", "3", "-o", str(blocker / "sub")]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_input(tmp_path):
    assert cli.main(["share", str(tmp_path / "nope.png"), "-t", "1", "-n", "1", "-o", str(tmp_path)]) == 1


def test_partial_outputs_removed(tmp_path, image_file, monkeypatch):
    path, _ = image_file
    real = scheme.save_bundle
    calls = []

    def flaky(bundle, p, fmt=None):
        calls.append(p)
        if len(calls) == 2:
            raise OSError("disk full")
        return real(bundle, p, fmt)

    monkeypatch.setattr(scheme, "save_bundle", flaky)
    out = tmp_path / "o"
    assert cli.main(["share", str(path), "-t", "2", "-n", "3", "-o", str(out)]) == 1
    assert list(out.iterdir()) == []


def test_reconstruct_failures_leave_no_output(tmp_path, image_file, capsys):
    path, _ = image_file
    for d, seed in (("a", "1"), ("b", "2")):
        cli.main(["share", str(path), "-t", "3", "-n", "4", "-o", str(tmp_path / d), "--seed", seed])
    rec = tmp_path / "rec.png"
    a = [str(tmp_path / "a" / f"bridge.share{i}.png") for i in (1, 2, 3, 4)]
    b = [str(tmp_path / "b" / f"bridge.share{i}.png") for i in (1, 2, 3, 4)]

    assert cli.main(["reconstruct", *a[:2], "-o", str(rec)]) == 1
    assert "insufficient shares" in capsys.readouterr().err
    assert cli.main(["reconstruct", a[0], a[1], b[2], "-o", str(rec)]) == 1
    assert "different sharing sessions" in capsys.readouterr().err
    assert not rec.exists()


def test_inspect(tmp_path, image_file, capsys):
    path, _ = image_file
    out = tmp_path / "s"
    cli.main(["share", str(path), "-t", "2", "-n", "3", "-o", str(out), "--seed", "1"])
    capsys.readouterr()
    assert cli.main(["inspect", str(out / "bridge.share2.png"), str(out / "bridge.share3.meta")]) == 0
    text = capsys.readouterr().out
    assert "share 2 of 3 (threshold 2)" in text and "share 3 of 3" in text
    assert "original size:  21x14 (pad right 3, bottom 2)" in text


def test_inspect_malformed(tmp_path, capsys):
    bad = tmp_path / "x.meta"
    bad.write_text("version = 1\n")
    assert cli.main(["inspect", str(bad)]) == 1
    assert "truncated metadata" in capsys.readouterr().err


def test_no_secret_material_printed(tmp_path, rng, capfd):
    img = random_image(8, 8, rng)
    src = tmp_path / "k.png"
    imagecodec.save_image(img, src)
    out = tmp_path / "s"
    assert cli.main(["-vv", "share", str(src), "-t", "2", "-n", "2", "-o", str(out), "--seed", "9"]) == 0
    shares = [str(out / f"k.share{i}.png") for i in (1, 2)]
    assert cli.main(["-vv", "reconstruct", *shares, "-o", str(tmp_path / "r.png")]) == 0
    assert cli.main(["-vv", "inspect", *shares]) == 0
    printed = capfd.readouterr()
    key = img.to_bytes()[:16]
    for secret in (key.hex(), key[:8].hex(), key[8:].hex()):
        assert secret not in printed.out and secret not in printed.err


def test_bench_tsv_schema(capsys):
    assert cli.main(["bench", "--sizes", "0.05", "0.1", "--grid", "2,3", "--repeats", "1", "--format", "tsv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "size_mb\tnbytes\tt\tn\tshare_s\treconstruct_s"
    assert len(lines[1].split("\t")) == 6
    assert lines[3] == ""
    assert lines[4] == "fit\tt\tn\tslope_s_per_mb\tintercept_s\tr_squared"
    assert lines[5].startswith("fit\t2\t3\t")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "imgshare", "share", "x", "-t", "4", "-n", "2"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 2
    assert "need 1 <= t <= n" in proc.stderr
