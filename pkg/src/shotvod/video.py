"""Uncompressed 8-bit AVI synthesis and a header parser used to verify it.

One 'vids' stream of palettized grayscale DIB frames ('00db' chunks,
bottom-up rows, 4-byte aligned), with an 'idx1' index. Frame counts and
sizes are patched into the headers after the frame stream is written, so
muxing holds only one frame in memory at a time.
"""

from __future__ import annotations

import shlex
import struct
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable

from shotvod.errors import DimensionMismatch, EmptyInput, NotAvi, TruncatedFile
from shotvod.imaging import GRAY_PALETTE
from shotvod.kernels import pack_dib_rows
from shotvod.types import FrameImage

AVIF_HASINDEX = 0x00000010
AVIIF_KEYFRAME = 0x00000010
_FPS_SCALE = 1_000_000


@dataclass
class VideoMeta:
    frame_count: int
    fps_nominal: float
    width: int
    height: int
    micro_sec_per_frame: int = 0
    container: str = "avi-uncompressed"


def nominal_fps(frame_count: int, length_s: float) -> float:
    """Container playback rate preserving the shot's wall-clock duration."""
    return frame_count / max(length_s, 1e-3)


def _chunk(fourcc: bytes, payload: bytes) -> bytes:
    data = fourcc + struct.pack("<I", len(payload)) + payload
    if len(payload) % 2:
        data += b"\x00"
    return data


def mux_avi(frames: Iterable[FrameImage], fps_nominal: float, out: BinaryIO | str | Path) -> VideoMeta:
    """Write the frame sequence as an AVI file; returns the container metadata.

    `out` is a seekable binary sink or a path; header sizes are patched in
    place once the frame count is known.
    """
    if fps_nominal <= 0:
        raise ValueError(f"fps must be > 0, got {fps_nominal}")
    if isinstance(out, (str, Path)):
        with open(out, "wb") as fh:
            return mux_avi(frames, fps_nominal, fh)

    it = iter(frames)
    try:
        first = next(it)
    except StopIteration:
        raise EmptyInput("mux_avi needs at least one frame") from None
    width, height = first.width, first.height
    stride = (width + 3) & ~3
    frame_bytes = stride * height
    usec = round(1e6 / fps_nominal)
    rate = round(fps_nominal * _FPS_SCALE)

    # headers with count-dependent fields zeroed; patched after the movi pass
    avih = struct.pack(
        "<14I",
        usec, frame_bytes * max(1, round(fps_nominal)), 0, AVIF_HASINDEX,
        0, 0, 1, frame_bytes, width, height, 0, 0, 0, 0,
    )
    strh = struct.pack(
        "<4s4sIHHIIIIIIiI4H",
        b"vids", b"DIB ", 0, 0, 0, 0,
        _FPS_SCALE, rate, 0, 0, frame_bytes, -1, 0,
        0, 0, width, height,
    )
    strf = struct.pack(
        "<IiiHHIIiiII", 40, width, height, 1, 8, 0, frame_bytes, 0, 0, 256, 0,
    ) + GRAY_PALETTE

    strl = b"strl" + _chunk(b"strh", strh) + _chunk(b"strf", strf)
    hdrl = b"hdrl" + _chunk(b"avih", avih) + _chunk(b"LIST", strl)

    start = out.tell()
    out.write(b"RIFF\x00\x00\x00\x00AVI ")
    out.write(_chunk(b"LIST", hdrl))
    movi_header_pos = out.tell()
    out.write(b"LIST\x00\x00\x00\x00movi")

    index = []
    count = 0
    offset = 4  # from the 'movi' fourcc
    frame = first
    while True:
        if (frame.width, frame.height) != (width, height):
            raise DimensionMismatch(
                f"frame {count} is {frame.width}x{frame.height}, expected {width}x{height}"
            )
        payload = pack_dib_rows(frame.data, frame.width, frame.height)
        out.write(_chunk(b"00db", payload))
        index.append(struct.pack("<4sIII", b"00db", AVIIF_KEYFRAME, offset, len(payload)))
        offset += 8 + len(payload)
        count += 1
        try:
            frame = next(it)
        except StopIteration:
            break

    movi_end = out.tell()
    out.write(_chunk(b"idx1", b"".join(index)))
    total = out.tell()

    out.seek(start + 4)
    out.write(struct.pack("<I", total - start - 8))
    # avih dwTotalFrames: RIFF(12) + LIST hdr(8) + 'hdrl'(4) + avih hdr(8) + 4 fields
    out.seek(start + 12 + 8 + 4 + 8 + 16)
    out.write(struct.pack("<I", count))
    # strh dwLength sits 40 bytes into strh: after hdrl prefix + avih chunk +
    # LIST strl hdr(8) + 'strl'(4) + strh hdr(8)
    strh_pos = start + 12 + 8 + 4 + 8 + len(avih) + 8 + 4 + 8
    out.seek(strh_pos + 32)
    out.write(struct.pack("<I", count))
    out.seek(movi_header_pos + 4)
    out.write(struct.pack("<I", movi_end - movi_header_pos - 8))
    out.seek(0, 2)
    out.flush()

    return VideoMeta(count, rate / _FPS_SCALE, width, height, usec)


def _subchunks(buf: bytes, pos: int, end: int):
    while pos + 8 <= end:
        fourcc = buf[pos:pos + 4]
        (size,) = struct.unpack_from("<I", buf, pos + 4)
        body_end = pos + 8 + size
        if body_end > end:
            raise TruncatedFile(f"chunk {fourcc!r} runs past its parent")
        yield fourcc, pos + 8, body_end
        pos = body_end + (size % 2)


def parse_avi_header(data: bytes) -> VideoMeta:
    """Extract frame count, fps and dimensions from an AVI's header chunks."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"AVI ":
        raise NotAvi("missing RIFF/AVI signature")
    (riff_size,) = struct.unpack_from("<I", data, 4)
    if 8 + riff_size > len(data):
        raise TruncatedFile(f"RIFF declares {riff_size} bytes, have {len(data) - 8}")

    avih = strh = strf = None
    for fourcc, body, body_end in _subchunks(data, 12, 8 + riff_size):
        if fourcc == b"LIST" and data[body:body + 4] == b"hdrl":
            for f2, b2, e2 in _subchunks(data, body + 4, body_end):
                if f2 == b"avih":
                    avih = data[b2:e2]
                elif f2 == b"LIST" and data[b2:b2 + 4] == b"strl":
                    for f3, b3, e3 in _subchunks(data, b2 + 4, e2):
                        if f3 == b"strh":
                            strh = data[b3:e3]
                        elif f3 == b"strf":
                            strf = data[b3:e3]
    if avih is None or strh is None or strf is None or len(avih) < 56 or len(strh) < 56:
        raise TruncatedFile("header chunks missing or short")

    usec, _, _, _, total_frames = struct.unpack_from("<5I", avih, 0)
    scale, rate = struct.unpack_from("<II", strh, 20)
    width, height = struct.unpack_from("<ii", strf, 4)
    fps = rate / scale if scale else 0.0
    return VideoMeta(total_frames, fps, width, abs(height), usec)


def run_post_encode(command: str, avi_path: Path, out_path: Path) -> None:
    """Run a user-supplied encoder command with {in}/{out} substituted."""
    argv = [
        arg.replace("{in}", str(avi_path)).replace("{out}", str(out_path))
        for arg in shlex.split(command)
    ]
    subprocess.run(argv, check=True)
