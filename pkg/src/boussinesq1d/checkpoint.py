"""Binary checkpoints of particle states.

Layout (all little-endian): 8-byte magic, uint32 format version, uint32
flags (bit 0: broken ordering), uint64 step index, uint64 particle count,
float64 t, then the float64 arrays labels, phi, rho, omega.
"""
from __future__ import annotations

import os
import re
import struct

import numpy as np

from .fields import ParticleState

MAGIC = b"B1DCKPT\x00"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIQQd")
_NAME = re.compile(r"^step_(\d{9})\.ckpt$")


class CheckpointError(OSError):
    """A checkpoint file is missing, truncated or of an unknown format."""


def encode(state: ParticleState, step: int) -> bytes:
    head = _HEADER.pack(MAGIC, FORMAT_VERSION, int(state.broken), step, state.size, state.t)
    body = b"".join(np.asarray(a, dtype="<f8").tobytes() for a in (state.labels, state.phi, state.rho, state.omega))
    return head + body


def decode(blob: bytes) -> tuple[int, ParticleState]:
    if len(blob) < _HEADER.size:
        raise CheckpointError("checkpoint shorter than its header")
    magic, version, flags, step, count, t = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise CheckpointError("not a checkpoint file")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if len(blob) != _HEADER.size + 4 * 8 * count:
        raise CheckpointError("checkpoint size does not match its particle count")
    arrays = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).reshape(4, count).astype(float)
    labels, phi, rho, omega = arrays
    return step, ParticleState(t=t, labels=labels, phi=phi, rho=rho, omega=omega, broken=bool(flags & 1))


def write(path, state: ParticleState, step: int) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(state, step))


def read(path) -> tuple[int, ParticleState]:
    with open(path, "rb") as fh:
        return decode(fh.read())


def filename(step: int) -> str:
    return f"step_{step:09d}.ckpt"


def list_dir(directory) -> list[str]:
    """Checkpoint files of a directory in step order."""
    names = sorted(n for n in os.listdir(directory) if _NAME.match(n))
    return [os.path.join(directory, n) for n in names]


def load_dir(directory) -> list[tuple[int, ParticleState]]:
    out = [read(p) for p in list_dir(directory)]
    if not out:
        raise CheckpointError(f"no checkpoints in {directory}")
    return out
