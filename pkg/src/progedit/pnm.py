"""Binary portable pixmap I/O: P5 graymaps and P6 pixmaps, 8-bit.

Values map linearly between bytes [0, 255] and floats [0, 1]. Writing
clamps to [0, 1] and rounds half away from zero; this is the single place
where image export quantization happens.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

__all__ = [
    "write_pnm_bytes",
    "read_pnm_bytes",
    "write_pnm",
    "read_pnm",
    "write_map_bytes",
    "read_map_bytes",
]


def _quantize(values: np.ndarray) -> np.ndarray:
    clipped = np.clip(values, 0.0, 1.0)
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def write_pnm_bytes(img: np.ndarray, force_rgb: bool = False) -> bytes:
    """Serialize a (C, H, W) float image to P5 (1 channel) or P6 (3) bytes."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[0] not in (1, 3):
        raise ValueError(f"expected (1|3, H, W) image, got shape {img.shape}")
    if force_rgb and img.shape[0] == 1:
        img = np.repeat(img, 3, axis=0)
    c, h, w = img.shape
    magic = b"P5" if c == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, w, h)
    # interleave channels: P6 stores RGB per pixel, row-major
    data = _quantize(img).transpose(1, 2, 0).tobytes()
    return header + data


def _read_tokens(buf: io.BytesIO, n: int) -> list[int]:
    tokens: list[int] = []
    while len(tokens) < n:
        ch = buf.read(1)
        if not ch:
            raise ValueError("truncated pnm header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = buf.read(1)
            continue
        if ch.isspace():
            continue
        tok = ch
        ch = buf.read(1)
        while ch and not ch.isspace() and ch != b"#":
            tok += ch
            ch = buf.read(1)
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = buf.read(1)
        if not tok.isdigit():
            raise ValueError(f"bad pnm header token {tok!r}")
        tokens.append(int(tok))
    return tokens


def read_pnm_bytes(data: bytes) -> np.ndarray:
    """Parse P5/P6 bytes into a (C, H, W) float64 image in [0, 1]."""
    if len(data) < 2 or data[:1] != b"P" or data[1:2] not in (b"5", b"6"):
        raise ValueError("not a binary P5/P6 pixmap")
    channels = 1 if data[1:2] == b"5" else 3
    buf = io.BytesIO(data[2:])
    w, h, maxval = _read_tokens(buf, 3)
    if maxval != 255:
        raise ValueError(f"only 8-bit pixmaps supported, maxval={maxval}")
    raw = buf.read(w * h * channels)
    if len(raw) != w * h * channels:
        raise ValueError("truncated pnm payload")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(h, w, channels)
    return arr.transpose(2, 0, 1).astype(np.float64) / 255.0


def write_pnm(path: str | Path, img: np.ndarray, force_rgb: bool = False) -> None:
    Path(path).write_bytes(write_pnm_bytes(img, force_rgb=force_rgb))


def read_pnm(path: str | Path) -> np.ndarray:
    return read_pnm_bytes(Path(path).read_bytes())


def write_map_bytes(mu: np.ndarray) -> bytes:
    """Serialize an (H, W) edit map or mask to P5 bytes."""
    mu = np.asarray(mu, dtype=np.float64)
    if mu.ndim != 2:
        raise ValueError(f"expected (H, W) map, got shape {mu.shape}")
    return write_pnm_bytes(mu[None, :, :])


def read_map_bytes(data: bytes) -> np.ndarray:
    """Parse P5 bytes into an (H, W) float64 map in [0, 1]."""
    img = read_pnm_bytes(data)
    if img.shape[0] != 1:
        raise ValueError("edit maps must be single-channel (P5)")
    return img[0]
