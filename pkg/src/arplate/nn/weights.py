"""ACRW weight file format.

Little-endian binary layout:

    magic "ACRW" | u32 version (=1) | u32 tensor count
    per tensor: u16 name length | UTF-8 name | u8 rank | u32 dim per
    axis | IEEE-754 f32 payload, row-major

Weights are quantized to float32 on save; since trained models keep
float32 master copies, save followed by load is bit-exact.
"""
from __future__ import annotations

import struct

import numpy as np

MAGIC = b"ACRW"
VERSION = 1


class AcrwError(Exception):
    """Base class for weight-file failures."""


class AcrwMagicError(AcrwError):
    """File does not start with the ACRW magic."""


class AcrwVersionError(AcrwError):
    """Unsupported format version."""


class AcrwTruncatedError(AcrwError):
    """File ends before the payload the header promises."""


def save_weights(weights: dict[str, np.ndarray], path) -> None:
    """Write an ordered name -> tensor dict as an ACRW file."""
    parts = [MAGIC, struct.pack("<II", VERSION, len(weights))]
    for name, tensor in weights.items():
        arr = np.ascontiguousarray(np.asarray(tensor, dtype="<f4"))
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<B", arr.ndim))
        parts.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(arr.tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise AcrwTruncatedError(
                f"needed {n} bytes at offset {self.pos}, file has {len(self.data)}"
            )
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk


def load_weights(path) -> dict[str, np.ndarray]:
    """Read an ACRW file into an ordered name -> float32 tensor dict."""
    with open(path, "rb") as fh:
        data = fh.read()
    r = _Reader(data)
    if r.take(4) != MAGIC:
        raise AcrwMagicError("not an ACRW file")
    version, count = struct.unpack("<II", r.take(8))
    if version != VERSION:
        raise AcrwVersionError(f"unsupported version {version}")
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", r.take(2))
        name = r.take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<B", r.take(1))
        dims = struct.unpack(f"<{rank}I", r.take(4 * rank)) if rank else ()
        n = int(np.prod(dims)) if dims else 1
        payload = r.take(4 * n)
        arr = np.frombuffer(payload, dtype="<f4", count=n).reshape(dims)
        out[name] = arr.astype(np.float32).reshape(dims).copy()
    return out
