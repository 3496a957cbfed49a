"""Bit-exact tensor serialization and grayscale frame handling.

Tensor files: magic ``TEN3``, then version, n1, n2, n3 as little-endian
u32, then n1*n2*n3 little-endian doubles with the row index fastest, then
the column, then the tube index.  Frames are binary P5 graymaps with
maxval 255 or 65535 (two-byte samples are big-endian per the PNM rules).
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import as_tensor3
from .errors import (
    BadMagic,
    BadVersion,
    EmptySequence,
    InconsistentDims,
    TruncatedPayload,
)

MAGIC = b"TEN3"
VERSION = 1
_HEADER = struct.Struct("<4sIIII")

_BIT_DEPTH_MAX = {np.dtype(np.uint8): 255, np.dtype(np.uint16): 65535}


def write_tensor(path, a) -> None:
    """Write a tensor file; `read_tensor` restores it bit for bit."""
    a = as_tensor3(a)
    n1, n2, n3 = a.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, n1, n2, n3))
        f.write(a.astype("<f8").tobytes(order="F"))


def read_tensor(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise BadMagic(f"{path}: expected magic {MAGIC!r}, got {data[:4]!r}")
    if len(data) < _HEADER.size:
        raise TruncatedPayload(f"{path}: header cut short at {len(data)} bytes")
    _, version, n1, n2, n3 = _HEADER.unpack_from(data)
    if version != VERSION:
        raise BadVersion(f"{path}: unsupported version {version}")
    if min(n1, n2, n3) < 1:
        raise TruncatedPayload(f"{path}: header declares empty tensor {n1}x{n2}x{n3}")
    need = n1 * n2 * n3 * 8
    payload = data[_HEADER.size :]
    if len(payload) != need:
        raise TruncatedPayload(
            f"{path}: payload is {len(payload)} bytes, header promises {need}"
        )
    flat = np.frombuffer(payload, dtype="<f8")
    return as_tensor3(flat.reshape((n1, n2, n3), order="F"), name=str(path))


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) graymap as a uint8 or uint16 matrix."""
    data = Path(path).read_bytes()
    pos = 0

    def token() -> bytes:
        nonlocal pos
        while pos < len(data):
            ch = data[pos : pos + 1]
            if ch == b"#":
                while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                    pos += 1
            elif ch.isspace():
                pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise TruncatedPayload(f"{path}: graymap header cut short")
        return data[start:pos]

    if token() != b"P5":
        raise BadMagic(f"{path}: not a binary P5 graymap")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError as exc:
        raise TruncatedPayload(f"{path}: malformed graymap header") from exc
    if maxval not in (255, 65535):
        raise BadVersion(f"{path}: unsupported maxval {maxval}, need 255 or 65535")
    pos += 1  # exactly one whitespace byte separates maxval from the raster
    dtype = np.dtype(">u2") if maxval == 65535 else np.dtype("u1")
    need = width * height * dtype.itemsize
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise TruncatedPayload(f"{path}: raster is {len(raster)} bytes, need {need}")
    frame = np.frombuffer(raster, dtype=dtype).reshape(height, width)
    return frame.astype(np.uint16) if maxval == 65535 else frame.copy()


def write_pgm(path, frame) -> None:
    frame = np.asarray(frame)
    if frame.ndim != 2:
        raise InconsistentDims(f"frame must be 2-d, got shape {frame.shape}")
    if frame.dtype == np.uint8:
        maxval, raster = 255, frame.tobytes()
    elif frame.dtype == np.uint16:
        maxval, raster = 65535, frame.astype(">u2").tobytes()
    else:
        raise InconsistentDims(f"frame dtype must be uint8 or uint16, got {frame.dtype}")
    height, width = frame.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n{maxval}\n".encode("ascii"))
        f.write(raster)


def read_frames(directory) -> list[np.ndarray]:
    """Read every .pgm/.pnm file in a directory, sorted by name."""
    directory = Path(directory)
    paths = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in (".pgm", ".pnm")
    )
    if not paths:
        raise EmptySequence(f"{directory}: no graymap frames found")
    return [read_pgm(p) for p in paths]


def write_frames(directory, frames, stem: str = "frame") -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for k, frame in enumerate(frames):
        p = directory / f"{stem}_{k:04d}.pgm"
        write_pgm(p, frame)
        out.append(p)
    return out


def frames_to_tensor(frames, normalize: str = "unit") -> np.ndarray:
    """Stack frames as frontal slices; frame k becomes slice k.

    With normalize="unit" pixel counts are divided by the bit-depth
    maximum so entries land in [0, 1]; "none" keeps raw counts.
    """
    if normalize not in ("none", "unit"):
        raise ValueError(f"normalize must be 'none' or 'unit', got {normalize!r}")
    frames = list(frames)
    if not frames:
        raise EmptySequence("frame sequence is empty")
    first = np.asarray(frames[0])
    depth = _BIT_DEPTH_MAX.get(first.dtype)
    if first.ndim != 2 or depth is None:
        raise InconsistentDims(
            f"frames must be 2-d uint8 or uint16, got shape {first.shape} dtype {first.dtype}"
        )
    out = np.empty((first.shape[0], first.shape[1], len(frames)))
    for k, frame in enumerate(frames):
        frame = np.asarray(frame)
        if frame.shape != first.shape or frame.dtype != first.dtype:
            raise InconsistentDims(
                f"frame {k} is {frame.shape} {frame.dtype}, expected {first.shape} {first.dtype}"
            )
        out[:, :, k] = frame
    if normalize == "unit":
        out /= depth
    return out


def tensor_to_frames(a, clamp: str = "clip") -> list[np.ndarray]:
    """Quantize frontal slices to 8-bit frames.

    clamp="clip" truncates to [0, 1] before scaling to 0..255;
    clamp="rescale" maps [min, max] affinely onto 0..255.  Quantization
    rounds halves away from zero so it is platform-independent.
    """
    a = as_tensor3(a)
    if clamp == "clip":
        v = np.clip(a, 0.0, 1.0)
    elif clamp == "rescale":
        lo, hi = float(a.min()), float(a.max())
        v = (a - lo) / (hi - lo) if hi > lo else np.zeros_like(a)
    else:
        raise ValueError(f"clamp must be 'clip' or 'rescale', got {clamp!r}")
    q = np.floor(v * 255.0 + 0.5).astype(np.uint8)
    return [q[:, :, k] for k in range(a.shape[2])]
