import io
import random
import struct

import pytest

from shotvod import video
from shotvod.acquisition import generate_frame
from shotvod.errors import DimensionMismatch, EmptyInput, NotAvi, TruncatedFile
from shotvod.kernels import pack_dib_rows


def mux_bytes(frames, fps):
    buf = io.BytesIO()
    meta = video.mux_avi(iter(frames), fps, buf)
    return buf.getvalue(), meta


def test_round_trip_small():
    frames = [generate_frame(1, i, 6, 4) for i in range(3)]
    data, meta = mux_bytes(frames, 2.0)
    parsed = video.parse_avi_header(data)
    assert parsed.frame_count == 3
    assert parsed.fps_nominal == 2.0
    assert (parsed.width, parsed.height) == (6, 4)
    assert meta.frame_count == 3


def test_single_frame_fps_one():
    data, meta = mux_bytes([generate_frame(1, 0, 4, 4)], 1.0)
    parsed = video.parse_avi_header(data)
    assert parsed.micro_sec_per_frame == 1_000_000
    assert parsed.frame_count == 1
    assert data.count(b"00db") >= 2  # one movi chunk + one idx1 entry


def test_frame_payloads_are_bottom_up_dib():
    frame = generate_frame(3, 0, 5, 3)
    data, _ = mux_bytes([frame], 10.0)
    payload = pack_dib_rows(frame.data, 5, 3)
    assert payload in data


def test_total_frames_97():
    frames = (generate_frame(77212, i, 8, 6) for i in range(97))
    data, meta = mux_bytes(frames, video.nominal_fps(97, 0.78))
    assert video.parse_avi_header(data).frame_count == 97
    assert meta.fps_nominal == pytest.approx(97 / 0.78, rel=1e-6)


def test_deterministic_output():
    frames = [generate_frame(2, i, 10, 10) for i in range(5)]
    a, _ = mux_bytes(frames, 25.0)
    b, _ = mux_bytes(frames, 25.0)
    assert a == b


def test_riff_sizes_consistent():
    data, _ = mux_bytes([generate_frame(1, 0, 4, 4)], 5.0)
    assert data[:4] == b"RIFF"
    (riff_size,) = struct.unpack_from("<I", data, 4)
    assert riff_size + 8 == len(data)


def test_empty_input():
    with pytest.raises(EmptyInput):
        video.mux_avi(iter([]), 1.0, io.BytesIO())


def test_dimension_mismatch():
    frames = [generate_frame(1, 0, 4, 4), generate_frame(1, 1, 8, 8)]
    with pytest.raises(DimensionMismatch):
        video.mux_avi(iter(frames), 1.0, io.BytesIO())


def test_not_avi():
    with pytest.raises(NotAvi):
        video.parse_avi_header(b"\x01\x02random junk that is long enough")
    with pytest.raises(NotAvi):
        video.parse_avi_header(b"RIFF\x04\x00\x00\x00WAVE")


def test_truncated_file():
    data, _ = mux_bytes([generate_frame(1, 0, 16, 16)], 5.0)
    with pytest.raises(TruncatedFile):
        video.parse_avi_header(data[: len(data) // 2])


def test_round_trip_randomized():
    rng = random.Random(99)
    for _ in range(20):
        n = rng.randint(1, 40)
        w, h = rng.randint(1, 40), rng.randint(1, 40)
        fps = round(rng.uniform(0.5, 200.0), 3)
        frames = [generate_frame(7, i, w, h) for i in range(n)]
        data, _ = mux_bytes(frames, fps)
        parsed = video.parse_avi_header(data)
        assert parsed.frame_count == n
        assert parsed.fps_nominal == fps
        assert (parsed.width, parsed.height) == (w, h)


def test_mux_to_path(tmp_path):
    path = tmp_path / "video.avi"
    meta = video.mux_avi(iter([generate_frame(1, 0, 4, 4)]), 3.0, path)
    assert meta.frame_count == 1
    assert video.parse_avi_header(path.read_bytes()).frame_count == 1
