"""Simulated camera acquisition: deterministic frames, times file, notification.

A produced shot lands in <incoming>/<shot_id>/<camera>/ as frame_%06d.pgm
files plus times.txt (one decimal seconds value per line, t_i = i / fps).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from shotvod.errors import IoFailure, UnknownProfile
from shotvod.imaging import write_pgm
from shotvod.kernels import fill_pattern
from shotvod.protocol import notify_shot
from shotvod.types import AckMessage, CameraId, FrameImage, ShotManifest, ShotMessage

DEFAULT_WIDTH = 320
DEFAULT_HEIGHT = 240

# Built-in reference workloads: shot number, length (s), payload size (MiB),
# frame count, and the reference old/new ingest times (s) they are compared to.
@dataclass(frozen=True)
class ShotProfile:
    shot_no: int
    length_s: float
    size_mb: float
    frames: int
    old_time_s: float
    new_time_s: float

    @property
    def fps(self) -> float:
        return self.frames / self.length_s

    @property
    def size_bytes(self) -> int:
        return round(self.size_mb * 1024 * 1024)


PROFILES = {
    p.shot_no: p
    for p in [
        ShotProfile(77212, 0.78, 1.02, 97, 7.9735, 1.0145),
        ShotProfile(77213, 9.79, 30.9, 1198, 30.002, 10.518),
        ShotProfile(77214, 5.31, 15.3, 650, 16.787, 4.896),
        ShotProfile(77215, 9.37, 31.7, 1146, 26.226, 9.368),
        ShotProfile(77216, 9.48, 31.8, 1160, 29.376, 8.778),
        ShotProfile(73999, 104.78, 169.8, 12810, 271.607, 91.875),
    ]
}

# Profile payloads average well under a raw 320x240 raster per frame, so
# replayed shots use a smaller raster and pad each file up to the budget.
REPLAY_WIDTH = 96
REPLAY_HEIGHT = 96


@dataclass
class AcqConfig:
    incoming_dir: Path
    daemon_host: str = "127.0.0.1"
    daemon_port: int = 9000
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT
    fps: float = 25.0
    duration_s: float = 1.0
    camera_id: CameraId = CameraId.WK_IR
    notify_timeout: float = 5.0

    def __post_init__(self):
        self.incoming_dir = Path(self.incoming_dir)
        if self.fps <= 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")
        if self.duration_s < 0:
            raise ValueError(f"duration_s must be >= 0, got {self.duration_s}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad dimensions {self.width}x{self.height}")


def generate_frame(shot_id: int, frame_index: int, width: int, height: int) -> FrameImage:
    """Deterministic test raster: pixel(x, y) = (x + y + 7*index + shot) mod 256."""
    data = fill_pattern(width, height, 7 * frame_index + shot_id)
    return FrameImage(width, height, data)


def write_shot_files(
    cfg: AcqConfig, shot_id: int, n_frames: int | None = None, pad_per_frame: int = 0
) -> ShotManifest:
    """Write frames and times.txt to the incoming directory (no notification)."""
    n = n_frames if n_frames is not None else max(1, round(cfg.fps * cfg.duration_s))
    shot_dir = cfg.incoming_dir / str(shot_id) / cfg.camera_id.value
    try:
        shot_dir.mkdir(parents=True, exist_ok=True)
        manifest = ShotManifest(shot_id, cfg.camera_id, n)
        for i in range(n):
            frame = generate_frame(shot_id, i, cfg.width, cfg.height)
            path = shot_dir / f"frame_{i:06d}.pgm"
            manifest.total_bytes += write_pgm(path, frame, pad_bytes=pad_per_frame)
            manifest.frame_paths.append(str(path))
        times_path = shot_dir / "times.txt"
        lines = "".join(f"{i / cfg.fps:.6f}\n" for i in range(n))
        times_path.write_text(lines, encoding="ascii")
        manifest.times_path = str(times_path)
        manifest.total_bytes += times_path.stat().st_size
    except OSError as exc:
        raise IoFailure(f"cannot write shot {shot_id} to {shot_dir}: {exc}") from exc
    return manifest


def produce_shot(cfg: AcqConfig, shot_id: int) -> tuple[ShotManifest, AckMessage]:
    """Write a synthetic shot and notify the daemon.

    On notification failure the files stay on disk so the notify can be retried.
    """
    manifest = write_shot_files(cfg, shot_id)
    ack = notify_shot(
        cfg.daemon_host,
        cfg.daemon_port,
        ShotMessage(shot_id, cfg.camera_id),
        timeout=cfg.notify_timeout,
    )
    return manifest, ack


def replay_profile(
    cfg: AcqConfig, shot_no: int, notify: bool = True
) -> tuple[ShotManifest, AckMessage | None]:
    """Produce a shot matching a built-in profile's frame count and byte volume."""
    profile = PROFILES.get(shot_no)
    if profile is None:
        raise UnknownProfile(f"no built-in profile for shot {shot_no}")
    cfg.width, cfg.height = REPLAY_WIDTH, REPLAY_HEIGHT
    cfg.fps = profile.fps
    cfg.duration_s = profile.length_s
    per_frame_budget = profile.size_bytes // profile.frames
    raw_frame = len(f"P5\n{cfg.width} {cfg.height}\n255\n") + cfg.width * cfg.height
    pad = max(0, per_frame_budget - raw_frame)
    manifest = write_shot_files(cfg, shot_no, n_frames=profile.frames, pad_per_frame=pad)
    ack = None
    if notify:
        ack = notify_shot(
            cfg.daemon_host,
            cfg.daemon_port,
            ShotMessage(shot_no, cfg.camera_id),
            timeout=cfg.notify_timeout,
        )
    return manifest, ack
