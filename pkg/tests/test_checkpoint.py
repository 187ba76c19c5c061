import numpy as np
import pytest

from boussinesq1d import checkpoint
from boussinesq1d.fields import InitialData, discretize


def test_roundtrip_bit_exact(tmp_path):
    s = discretize(InitialData.blowup(3.0), 100).evolve(t=0.123456789)
    p = tmp_path / checkpoint.filename(7)
    checkpoint.write(p, s, 7)
    step, back = checkpoint.read(p)
    assert step == 7 and back.t == s.t and back.broken is False
    for name in ("labels", "phi", "rho", "omega"):
        assert np.array_equal(getattr(back, name), getattr(s, name))


def test_layout_is_little_endian():
    s = discretize(InitialData.zero(), 16)
    blob = checkpoint.encode(s, 3)
    assert blob[:8] == checkpoint.MAGIC
    assert int.from_bytes(blob[8:12], "little") == checkpoint.FORMAT_VERSION
    assert len(blob) == 8 + 4 + 4 + 8 + 8 + 8 + 4 * 8 * 17


@pytest.mark.parametrize("mutate", [lambda b: b[:10], lambda b: b"XXXXXXXX" + b[8:], lambda b: b[:-8]])
def test_corrupt_files_rejected(mutate):
    blob = checkpoint.encode(discretize(InitialData.zero(), 16), 0)
    with pytest.raises(checkpoint.CheckpointError):
        checkpoint.decode(mutate(blob))


def test_directory_listing_in_step_order(tmp_path):
    s = discretize(InitialData.zero(), 16)
    for n in (10, 2, 33):
        checkpoint.write(tmp_path / checkpoint.filename(n), s, n)
    (tmp_path / "notes.txt").write_text("x")
    assert [n for n, _ in checkpoint.load_dir(tmp_path)] == [2, 10, 33]
    with pytest.raises(checkpoint.CheckpointError):
        (tmp_path / "empty").mkdir()
        checkpoint.load_dir(tmp_path / "empty")
