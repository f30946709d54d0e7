"""Domain types shared by the store, daemon, acquisition and API layers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CameraId(str, Enum):
    """The four camera positions recording a shot."""

    WD_VIS = "WD-VIS"
    WG_VIS = "WG-VIS"
    WK_VIS = "WK-VIS"
    WK_IR = "WK-IR"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FrameImage:
    """One grayscale raster, 8-bit row-major."""

    width: int
    height: int
    data: bytes

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"bad dimensions {self.width}x{self.height}")
        if len(self.data) != self.width * self.height:
            raise ValueError(
                f"data length {len(self.data)} != {self.width}x{self.height}"
            )


@dataclass
class ShotRecord:
    """Catalog entry for one (shot, camera) sequence."""

    shot_id: int
    camera_id: CameraId
    length_s: float = 0.0
    size_bytes: int = 0
    frame_count: int = 0
    status: str = "ingesting"  # ingesting | complete | failed
    created_at: float = 0.0

    def to_json(self) -> dict:
        return {
            "shot_id": self.shot_id,
            "camera_id": self.camera_id.value,
            "length_s": self.length_s,
            "size_bytes": self.size_bytes,
            "frame_count": self.frame_count,
            "status": self.status,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ShotRecord":
        return cls(
            shot_id=int(obj["shot_id"]),
            camera_id=CameraId(obj["camera_id"]),
            length_s=float(obj["length_s"]),
            size_bytes=int(obj["size_bytes"]),
            frame_count=int(obj["frame_count"]),
            status=str(obj["status"]),
            created_at=float(obj["created_at"]),
        )


@dataclass(frozen=True)
class ShotMessage:
    """TCP notification that a shot's frames are ready on disk."""

    shot_id: int
    camera_id: CameraId

    def __post_init__(self):
        if self.shot_id < 1:
            raise ValueError(f"shot_id must be >= 1, got {self.shot_id}")


@dataclass(frozen=True)
class AckMessage:
    shot_id: int
    accepted: bool


@dataclass
class ShotManifest:
    """What produce_shot left in the incoming directory."""

    shot_id: int
    camera_id: CameraId
    frame_count: int
    frame_paths: list = field(default_factory=list)
    times_path: str = ""
    total_bytes: int = 0
