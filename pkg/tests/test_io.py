"""Tensor file format and graymap frame handling."""

import struct

import numpy as np
import pytest

from trpca.errors import (
    BadMagic,
    BadVersion,
    EmptySequence,
    InconsistentDims,
    NonFiniteData,
    TruncatedPayload,
)
from trpca.io import (
    frames_to_tensor,
    read_frames,
    read_pgm,
    read_tensor,
    tensor_to_frames,
    write_frames,
    write_pgm,
    write_tensor,
)


# ------------------------------------------------------------- tensor format


def test_tensor_round_trip_bitwise(tmp_path, rng):
    a = rng.standard_normal((3, 4, 5))
    path = tmp_path / "t.ten"
    write_tensor(path, a)
    back = read_tensor(path)
    np.testing.assert_array_equal(back, a)
    assert back.dtype == np.float64


def test_tensor_layout_row_index_fastest(tmp_path):
    # entry (i, j, k) sits at flat offset i + j*n1 + k*n1*n2
    a = np.empty((2, 3, 2))
    for i in range(2):
        for j in range(3):
            for k in range(2):
                a[i, j, k] = i + 10 * j + 100 * k
    path = tmp_path / "t.ten"
    write_tensor(path, a)
    raw = path.read_bytes()
    assert raw[:4] == b"TEN3"
    version, n1, n2, n3 = struct.unpack_from("<IIII", raw, 4)
    assert (version, n1, n2, n3) == (1, 2, 3, 2)
    flat = np.frombuffer(raw[20:], "<f8")
    for i in range(2):
        for j in range(3):
            for k in range(2):
                assert flat[i + j * 2 + k * 6] == a[i, j, k]


def test_read_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.ten"
    path.write_bytes(b"XXXX" + b"\x00" * 32)
    with pytest.raises(BadMagic):
        read_tensor(path)


def test_read_rejects_bad_version(tmp_path):
    path = tmp_path / "bad.ten"
    path.write_bytes(struct.pack("<4sIIII", b"TEN3", 2, 1, 1, 1) + b"\x00" * 8)
    with pytest.raises(BadVersion):
        read_tensor(path)


def test_read_rejects_short_payload(tmp_path):
    path = tmp_path / "short.ten"
    header = struct.pack("<4sIIII", b"TEN3", 1, 10, 10, 10)
    path.write_bytes(header + b"\x00" * (999 * 8))
    with pytest.raises(TruncatedPayload):
        read_tensor(path)


def test_read_rejects_trailing_bytes(tmp_path):
    path = tmp_path / "long.ten"
    header = struct.pack("<4sIIII", b"TEN3", 1, 1, 1, 1)
    path.write_bytes(header + b"\x00" * 16)
    with pytest.raises(TruncatedPayload):
        read_tensor(path)


def test_read_rejects_empty_dims(tmp_path):
    path = tmp_path / "empty.ten"
    path.write_bytes(struct.pack("<4sIIII", b"TEN3", 1, 0, 2, 2))
    with pytest.raises(TruncatedPayload):
        read_tensor(path)


def test_read_rejects_nonfinite_payload(tmp_path):
    path = tmp_path / "nan.ten"
    header = struct.pack("<4sIIII", b"TEN3", 1, 1, 1, 1)
    path.write_bytes(header + struct.pack("<d", float("nan")))
    with pytest.raises(NonFiniteData):
        read_tensor(path)


def test_read_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        read_tensor(tmp_path / "nope.ten")


# ------------------------------------------------------------------ graymaps


def test_pgm_round_trip_8bit(tmp_path, rng):
    frame = (rng.random((5, 7)) * 255).astype(np.uint8)
    path = tmp_path / "f.pgm"
    write_pgm(path, frame)
    np.testing.assert_array_equal(read_pgm(path), frame)


def test_pgm_round_trip_16bit(tmp_path, rng):
    frame = (rng.random((4, 6)) * 65535).astype(np.uint16)
    path = tmp_path / "f.pgm"
    write_pgm(path, frame)
    back = read_pgm(path)
    assert back.dtype == np.uint16
    np.testing.assert_array_equal(back, frame)


def test_pgm_header_comments(tmp_path):
    body = bytes(range(6))
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# a comment\n3 2\n# another\n255\n" + body)
    frame = read_pgm(path)
    np.testing.assert_array_equal(frame, np.arange(6, dtype=np.uint8).reshape(2, 3))


def test_pgm_rejects_wrong_magic(tmp_path):
    path = tmp_path / "p2.pgm"
    path.write_bytes(b"P2\n2 2\n255\n0 0 0 0")
    with pytest.raises(BadMagic):
        read_pgm(path)


def test_pgm_rejects_odd_maxval(tmp_path):
    path = tmp_path / "odd.pgm"
    path.write_bytes(b"P5\n2 2\n1000\n" + b"\x00" * 8)
    with pytest.raises(BadVersion):
        read_pgm(path)


def test_pgm_rejects_short_raster(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + b"\x00" * 3)
    with pytest.raises(TruncatedPayload):
        read_pgm(path)


# -------------------------------------------------------------------- frames


def test_frames_stack_as_frontal_slices(rng):
    frames = [(rng.random((4, 5)) * 255).astype(np.uint8) for _ in range(3)]
    t = frames_to_tensor(frames, normalize="none")
    assert t.shape == (4, 5, 3)
    for k, frame in enumerate(frames):
        np.testing.assert_array_equal(t[:, :, k], frame.astype(float))


def test_frames_surveillance_scale(rng):
    # 20 frames of 144 x 176 stack into a 144 x 176 x 20 tensor
    frames = [(rng.random((144, 176)) * 255).astype(np.uint8) for _ in range(20)]
    t = frames_to_tensor(frames, normalize="unit")
    assert t.shape == (144, 176, 20)
    assert 0.0 <= t.min() and t.max() <= 1.0


def test_frames_unit_normalization():
    frame = np.array([[0, 255], [255, 0]], dtype=np.uint8)
    t = frames_to_tensor([frame], normalize="unit")
    np.testing.assert_array_equal(t[:, :, 0], [[0.0, 1.0], [1.0, 0.0]])


def test_frames_16bit_unit_scale():
    frame = np.array([[0, 65535]], dtype=np.uint16)
    t = frames_to_tensor([frame], normalize="unit")
    np.testing.assert_array_equal(t[:, :, 0], [[0.0, 1.0]])


def test_frames_reject_mixed_dims():
    with pytest.raises(InconsistentDims):
        frames_to_tensor(
            [np.zeros((2, 2), np.uint8), np.zeros((3, 3), np.uint8)]
        )


def test_frames_reject_mixed_depth():
    with pytest.raises(InconsistentDims):
        frames_to_tensor(
            [np.zeros((2, 2), np.uint8), np.zeros((2, 2), np.uint16)]
        )


def test_frames_reject_empty():
    with pytest.raises(EmptySequence):
        frames_to_tensor([])


def test_frames_bad_normalize_flag():
    with pytest.raises(ValueError):
        frames_to_tensor([np.zeros((2, 2), np.uint8)], normalize="raw")


def test_tensor_to_frames_clip_midpoint():
    frames = tensor_to_frames(np.full((2, 2, 1), 0.5), clamp="clip")
    assert (frames[0] == 128).all()


def test_tensor_to_frames_rescale_endpoints():
    a = np.array([-1.0, 3.0]).reshape(1, 2, 1)
    frame = tensor_to_frames(a, clamp="rescale")[0]
    assert frame[0, 0] == 0
    assert frame[0, 1] == 255


def test_tensor_to_frames_constant_rescale():
    frame = tensor_to_frames(np.full((2, 2, 1), 3.3), clamp="rescale")[0]
    assert (frame == 0).all()


def test_quantization_round_trip_8bit(rng):
    frames = [(rng.random((6, 6)) * 255).astype(np.uint8) for _ in range(4)]
    back = tensor_to_frames(frames_to_tensor(frames, "unit"), "clip")
    for a, b in zip(frames, back):
        np.testing.assert_array_equal(a, b)


def test_frame_directory_round_trip(tmp_path, rng):
    frames = [(rng.random((3, 4)) * 255).astype(np.uint8) for _ in range(5)]
    write_frames(tmp_path / "seq", frames)
    back = read_frames(tmp_path / "seq")
    assert len(back) == 5
    for a, b in zip(frames, back):
        np.testing.assert_array_equal(a, b)


def test_read_frames_empty_dir(tmp_path):
    (tmp_path / "seq").mkdir()
    with pytest.raises(EmptySequence):
        read_frames(tmp_path / "seq")
