import random

import pytest

from shotvod.acquisition import generate_frame
from shotvod.frame_store import open_store
from shotvod.types import CameraId


@pytest.fixture
def store(tmp_path):
    s = open_store(tmp_path / "store", create_if_missing=True)
    yield s
    s.close()


def make_frames(shot_id, n, width=16, height=12):
    return [generate_frame(shot_id, i, width, height) for i in range(n)]


def random_times(rng: random.Random, n: int) -> list:
    times = []
    t = rng.uniform(0.0, 0.5)
    for _ in range(n):
        times.append(round(t, 6))
        t += rng.uniform(0.0, 0.05)
    return times


def ingest_random_shot(store, rng, shot_id, camera=CameraId.WK_IR, n=None,
                       width=16, height=12):
    """Append one shot with random segment splits; returns (frames, times)."""
    n = n if n is not None else rng.randint(1, 500)
    frames = make_frames(shot_id, n, width, height)
    times = random_times(rng, n)
    writer = store.create_shot(shot_id, camera)
    pos = 0
    while pos < n:
        step = rng.randint(1, max(1, n - pos))
        writer.append_segment(frames[pos:pos + step], times[pos:pos + step])
        pos += step
    writer.finalize(total_size_bytes=n * width * height)
    return frames, times
