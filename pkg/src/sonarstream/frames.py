"""Sonar frame rasters and clip container I/O.

Two on-disk forms are supported:

* ``.sfr`` -- a fixed little-endian container: magic ``SFRM``, u16
  version (1), u32 width, u32 height, f32 fps, u32 frame_count, then raw
  8-bit planes back to back.  Bit-exact and seekable on every platform.
* a directory of binary PGM (P5, maxval 255) frames, read in filename
  order.  Annotation tooling exports this interchange form.

Timestamps are not stored; they are synthesized as ``index / fps``.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"SFRM"
VERSION = 1
_HEADER = struct.Struct("<4sHIIfI")  # magic, version, width, height, fps, frame_count


class ClipFormatError(ValueError):
    """Malformed container or PGM input; carries the failing byte offset."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


@dataclass
class SonarFrame:
    """Single-channel 8-bit intensity raster with timing metadata."""

    pixels: np.ndarray  # (height, width) uint8
    timestamp: float = 0.0
    index: int = 0

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.uint8)
        if self.pixels.ndim != 2:
            raise ValueError(f"frame raster must be 2-D, got shape {self.pixels.shape}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SonarFrame):
            return NotImplemented
        return (
            self.index == other.index
            and self.timestamp == other.timestamp
            and np.array_equal(self.pixels, other.pixels)
        )


@dataclass
class ClipHeader:
    width: int
    height: int
    fps: float
    frame_count: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad clip dims {self.width}x{self.height}")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.frame_count < 0:
            raise ValueError(f"negative frame count {self.frame_count}")


def read_clip(path: str | Path, fps: float = 10.0) -> list[SonarFrame]:
    """Read an ``.sfr`` clip or a directory of P5 PGM frames.

    ``fps`` is only used to synthesize timestamps for PGM directories;
    container clips carry their own fps.
    """
    path = Path(path)
    if path.is_dir():
        return _read_pgm_dir(path, fps)
    data = path.read_bytes()
    return _parse_container(data)


def write_clip(frames: list[SonarFrame], path: str | Path, fps: float = 10.0) -> None:
    """Write frames to an ``.sfr`` container. All frames must share dims."""
    path = Path(path)
    if frames:
        h, w = frames[0].pixels.shape
        for i, f in enumerate(frames):
            if f.pixels.shape != (h, w):
                raise ValueError(
                    f"frame {i} dims {f.pixels.shape[1]}x{f.pixels.shape[0]} "
                    f"differ from clip dims {w}x{h}"
                )
    else:
        h, w = 1, 1
    header = _HEADER.pack(MAGIC, VERSION, w, h, fps, len(frames))
    with open(path, "wb") as fh:
        fh.write(header)
        for f in frames:
            fh.write(f.pixels.tobytes())


def _parse_container(data: bytes) -> list[SonarFrame]:
    if len(data) < _HEADER.size:
        raise ClipFormatError("truncated header", offset=len(data))
    magic, version, w, h, fps, count = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ClipFormatError(f"bad magic {magic!r}", offset=0)
    if version != VERSION:
        raise ClipFormatError(f"unsupported container version {version}", offset=4)
    header = ClipHeader(w, h, fps, count)
    plane = w * h
    expected = _HEADER.size + count * plane
    if len(data) < expected:
        raise ClipFormatError(
            f"truncated payload: need {expected} bytes, have {len(data)}",
            offset=len(data),
        )
    frames = []
    for i in range(count):
        off = _HEADER.size + i * plane
        pix = np.frombuffer(data, dtype=np.uint8, count=plane, offset=off)
        frames.append(SonarFrame(pix.reshape(h, w).copy(), timestamp=i / header.fps, index=i))
    return frames


def _read_pgm_dir(path: Path, fps: float) -> list[SonarFrame]:
    files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".pgm")
    frames = []
    dims = None
    for i, p in enumerate(files):
        pix = read_pgm(p)
        if dims is None:
            dims = pix.shape
        elif pix.shape != dims:
            raise ClipFormatError(
                f"{p.name}: dims {pix.shape[1]}x{pix.shape[0]} differ from "
                f"clip dims {dims[1]}x{dims[0]}"
            )
        frames.append(SonarFrame(pix, timestamp=i / fps, index=i))
    return frames


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    # header tokens: P5 <width> <height> <maxval>, comments allowed
    m = re.match(
        rb"P5\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s+(?:#[^\n]*\n\s*)*(\d+)\s",
        data,
    )
    if m is None:
        raise ClipFormatError(f"{path}: not a binary PGM", offset=0)
    w, h, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ClipFormatError(f"{path}: unsupported maxval {maxval}", offset=m.end())
    pix = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=m.end())
    if pix.size != w * h:
        raise ClipFormatError(f"{path}: truncated pixel data", offset=len(data))
    return pix.reshape(h, w).copy()


def write_pgm(pixels: np.ndarray, path: str | Path) -> None:
    pixels = np.asarray(pixels, dtype=np.uint8)
    h, w = pixels.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(pixels.tobytes())
