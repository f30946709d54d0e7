"""Grayscale image codecs: binary PGM (P5) files and 8-bit palettized BMP."""

from __future__ import annotations

import struct
from pathlib import Path

from shotvod.errors import CorruptFrame
from shotvod.kernels import pack_dib_rows
from shotvod.types import FrameImage


def pgm_bytes(frame: FrameImage) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.data


def write_pgm(path: Path, frame: FrameImage, pad_bytes: int = 0) -> int:
    """Write a binary PGM; optional trailing padding inflates the file size.

    Returns the number of bytes written. Padding after the raster is ignored
    by read_pgm.
    """
    payload = pgm_bytes(frame)
    if pad_bytes:
        payload += b"\x00" * pad_bytes
    path.write_bytes(payload)
    return len(payload)


def read_pgm(path: Path) -> FrameImage:
    """Parse a binary PGM written by write_pgm; trailing bytes are tolerated."""
    raw = path.read_bytes()
    if not raw.startswith(b"P5"):
        raise CorruptFrame(f"{path}: not a binary PGM")
    # header = magic, width height, maxval, each followed by one whitespace
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(raw) and raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptFrame(f"{path}: truncated PGM header")
        fields.append(raw[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(f) for f in fields)
    except ValueError:
        raise CorruptFrame(f"{path}: non-numeric PGM header") from None
    if maxval != 255 or width < 1 or height < 1:
        raise CorruptFrame(f"{path}: unsupported PGM header {fields}")
    data = raw[pos:pos + width * height]
    if len(data) < width * height:
        raise CorruptFrame(f"{path}: short pixel payload")
    return FrameImage(width, height, data)


# 256-entry grayscale palette, BGRA order, shared by BMP and AVI.
GRAY_PALETTE = b"".join(struct.pack("<BBBB", i, i, i, 0) for i in range(256))

_BMP_HEADER_SIZE = 14 + 40 + len(GRAY_PALETTE)


def encode_bmp(frame: FrameImage) -> bytes:
    """Encode as an 8-bit palettized grayscale BMP (bottom-up DIB rows)."""
    rows = pack_dib_rows(frame.data, frame.width, frame.height)
    file_size = _BMP_HEADER_SIZE + len(rows)
    file_header = struct.pack("<2sIHHI", b"BM", file_size, 0, 0, _BMP_HEADER_SIZE)
    info_header = struct.pack(
        "<IiiHHIIiiII",
        40, frame.width, frame.height, 1, 8, 0, len(rows), 2835, 2835, 256, 0,
    )
    return file_header + info_header + GRAY_PALETTE + rows
