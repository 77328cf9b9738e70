"""Core image types, color-to-gray conversion and binary PNM (P5/P6) I/O.

Images are plain numpy arrays: RGB is (H, W, 3) uint8, grayscale is
(H, W) uint8, binary masks are (H, W) bool.  Only the binary netpbm
formats with maxval 255 are read or written; they are byte-exact, which
is what the roundtrip tests rely on.
"""
from __future__ import annotations

import numpy as np

from .validation import check_binary_image, check_gray_image, check_rgb_image

# ITU-R BT.601 luma weights.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114


class PnmError(Exception):
    """Base class for netpbm read failures."""


class PnmHeaderError(PnmError):
    """Header is malformed (missing or non-numeric fields)."""


class PnmMagicError(PnmError):
    """Magic number is not P5 or P6."""


class PnmMaxvalError(PnmError):
    """Maxval is not 255."""


class PnmTruncatedError(PnmError):
    """Pixel payload is shorter than the header promises."""


def to_gray(img: np.ndarray) -> np.ndarray:
    """Convert an RGB image to 8-bit grayscale.

    Each pixel becomes round(0.299 R + 0.587 G + 0.114 B), rounding
    half away from zero, clamped to [0, 255].
    """
    img = check_rgb_image(img)
    f = img.astype(np.float64)
    luma = _LUMA_R * f[..., 0] + _LUMA_G * f[..., 1] + _LUMA_B * f[..., 2]
    # values are non-negative, so half-away-from-zero == floor(x + 0.5)
    out = np.floor(luma + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


def gray_to_rgb(img: np.ndarray) -> np.ndarray:
    """Promote grayscale to RGB by channel replication."""
    img = check_gray_image(img)
    return np.repeat(img[:, :, None], 3, axis=2)


def binary_to_gray(mask: np.ndarray) -> np.ndarray:
    """Render a boolean mask as an 8-bit image (foreground = 255)."""
    mask = check_binary_image(mask)
    return np.where(mask, 255, 0).astype(np.uint8)


def _read_header(data: bytes):
    """Parse 'magic width height maxval' allowing whitespace and # comments.

    Returns (magic, width, height, maxval, payload_offset).
    """
    if len(data) < 2:
        raise PnmHeaderError("file too short for a PNM header")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise PnmMagicError(f"unsupported magic {magic!r} (only binary P5/P6)")
    fields = []
    i = 2
    n = len(data)
    while len(fields) < 3:
        if i >= n:
            raise PnmHeaderError("header ended before width/height/maxval")
        c = data[i:i + 1]
        if c == b"#":
            while i < n and data[i:i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < n and data[j:j + 1].isdigit():
                j += 1
            fields.append(int(data[i:j]))
            i = j
        else:
            raise PnmHeaderError(f"unexpected byte {c!r} in header")
    # exactly one whitespace byte separates the header from the payload
    if i >= n or not data[i:i + 1].isspace():
        raise PnmHeaderError("missing whitespace after maxval")
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmHeaderError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"unsupported maxval {maxval} (must be 255)")
    return magic, width, height, maxval, i + 1


def read_pnm(path) -> np.ndarray:
    """Read a binary PGM (P5) or PPM (P6) file.

    Returns (H, W) uint8 for P5 and (H, W, 3) uint8 for P6.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    magic, width, height, _, off = _read_header(data)
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    payload = data[off:off + need]
    if len(payload) < need:
        raise PnmTruncatedError(
            f"payload has {len(payload)} bytes, header promises {need}"
        )
    arr = np.frombuffer(payload, dtype=np.uint8, count=need)
    if channels == 1:
        return arr.reshape(height, width).copy()
    return arr.reshape(height, width, 3).copy()


def write_pnm(img: np.ndarray, path) -> None:
    """Write a gray image as binary P5 or an RGB image as binary P6."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        arr = check_gray_image(arr)
        magic = b"P5"
    elif arr.ndim == 3:
        arr = check_rgb_image(arr)
        magic = b"P6"
    else:
        raise ValueError(f"cannot write array of shape {arr.shape} as PNM")
    h, w = arr.shape[:2]
    header = magic + b"\n" + f"{w} {h}".encode("ascii") + b"\n255\n"
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())
