"""Append-only segmented frame store.

Layout: <root>/<shot_id>/<camera>/seg_%05d.fseg plus a catalog.jsonl journal
at the root. Segment files are FSEG1: magic "FSEG1", little-endian u32
width/height/frame_count, frame_count f64 timestamps, then raw rasters.
One writer per store (lock file), any number of readers.
"""

from __future__ import annotations

import bisect
import errno
import json
import os
import struct
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional

from shotvod.errors import (
    CatalogCorrupt,
    DimensionMismatch,
    DuplicateShot,
    EmptyShot,
    IndexOutOfRange,
    InvalidStride,
    IoFailure,
    PathUnwritable,
    StoreLocked,
    TimeOrderViolation,
    UnknownShot,
)
from shotvod.types import CameraId, FrameImage, ShotRecord

SEGMENT_MAGIC = b"FSEG1"
_SEG_HEADER = struct.Struct("<III")  # width, height, frame_count
CATALOG_NAME = "catalog.jsonl"
LOCK_NAME = ".writer.lock"
VIDEO_NAME = "video.avi"
DEFAULT_SEGMENT_SIZE = 64


def _shot_dir(root: Path, shot_id: int, camera: CameraId) -> Path:
    return root / str(shot_id) / camera.value


def _segment_paths(shot_dir: Path) -> list[Path]:
    if not shot_dir.is_dir():
        return []
    return sorted(shot_dir.glob("seg_*.fseg"))


def write_segment(path: Path, frames: list[FrameImage], times: list[float]) -> int:
    """Serialize one FSEG1 segment file; returns bytes written."""
    width, height = frames[0].width, frames[0].height
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(SEGMENT_MAGIC)
        fh.write(_SEG_HEADER.pack(width, height, len(frames)))
        fh.write(struct.pack(f"<{len(times)}d", *times))
        for frame in frames:
            fh.write(frame.data)
        fh.flush()
        os.fsync(fh.fileno())
        size = fh.tell()
    os.replace(tmp, path)
    return size


@dataclass
class _SegmentInfo:
    path: Path
    width: int
    height: int
    count: int
    times: list
    first_index: int  # cumulative frame index of this segment's first frame

    @property
    def data_offset(self) -> int:
        return len(SEGMENT_MAGIC) + _SEG_HEADER.size + 8 * self.count


def _read_segment_info(path: Path, first_index: int) -> _SegmentInfo:
    with open(path, "rb") as fh:
        magic = fh.read(len(SEGMENT_MAGIC))
        if magic != SEGMENT_MAGIC:
            raise IoFailure(f"{path}: bad segment magic {magic!r}")
        width, height, count = _SEG_HEADER.unpack(fh.read(_SEG_HEADER.size))
        times = list(struct.unpack(f"<{count}d", fh.read(8 * count)))
    return _SegmentInfo(path, width, height, count, times, first_index)


class _ShotReader:
    """Cached per-(shot, camera) view over the segment files."""

    def __init__(self, shot_dir: Path):
        self.segments: list[_SegmentInfo] = []
        total = 0
        for path in _segment_paths(shot_dir):
            info = _read_segment_info(path, total)
            total += info.count
            self.segments.append(info)
        self.frame_count = total
        self.times: list[float] = []
        for seg in self.segments:
            self.times.extend(seg.times)

    def locate(self, index: int) -> tuple[_SegmentInfo, int]:
        for seg in self.segments:
            if index < seg.first_index + seg.count:
                return seg, index - seg.first_index
        raise IndexOutOfRange(f"index {index} >= frame_count {self.frame_count}")


class ShotWriter:
    """Appends segments for one (shot, camera); finalize makes the shot durable."""

    def __init__(self, store: "FrameStore", record: ShotRecord, resume_from: list[_SegmentInfo]):
        self._store = store
        self._record = record
        self._dir = _shot_dir(store.root, record.shot_id, record.camera_id)
        self._finalized = False
        self._next_segment = len(resume_from)
        self._frame_count = sum(s.count for s in resume_from)
        self._t_begin = resume_from[0].times[0] if resume_from else None
        self._t_end = resume_from[-1].times[-1] if resume_from else None
        self._dims = (resume_from[0].width, resume_from[0].height) if resume_from else None

    @property
    def frame_count(self) -> int:
        return self._frame_count

    def append_segment(self, frames, times) -> int:
        """Persist one contiguous run of frames; returns the segment index."""
        if self._finalized:
            raise RuntimeError("writer already finalized")
        frames = list(frames)
        times = [float(t) for t in times]
        if not frames or len(frames) != len(times):
            raise ValueError(f"got {len(frames)} frames and {len(times)} times")
        for prev, cur in zip(times, times[1:]):
            if cur < prev:
                raise TimeOrderViolation(f"times not non-decreasing: {prev} > {cur}")
        if self._t_end is not None and times[0] < self._t_end:
            raise TimeOrderViolation(
                f"segment starts at {times[0]} before previous end {self._t_end}"
            )
        dims = (frames[0].width, frames[0].height)
        for frame in frames:
            if (frame.width, frame.height) != dims:
                raise DimensionMismatch("frames within a segment differ in size")
        if self._dims is not None and dims != self._dims:
            raise DimensionMismatch(f"segment dims {dims} != shot dims {self._dims}")

        seg_index = self._next_segment
        path = self._dir / f"seg_{seg_index:05d}.fseg"
        try:
            self._dir.mkdir(parents=True, exist_ok=True)
            write_segment(path, frames, times)
        except OSError as exc:
            raise IoFailure(f"cannot write segment {path}: {exc}") from exc

        self._next_segment += 1
        self._frame_count += len(frames)
        if self._t_begin is None:
            self._t_begin = times[0]
        self._t_end = times[-1]
        self._dims = dims
        return seg_index

    def finalize(self, total_size_bytes: int = 0) -> ShotRecord:
        """Mark the shot complete and journal the final record."""
        if self._finalized:
            raise RuntimeError("writer already finalized")
        if self._frame_count == 0:
            raise EmptyShot(f"shot {self._record.shot_id} has no segments")
        self._finalized = True
        rec = self._record
        rec.frame_count = self._frame_count
        rec.length_s = self._t_end - self._t_begin
        rec.size_bytes = int(total_size_bytes)
        rec.status = "complete"
        self._store._journal(rec)
        self._store._drop_reader_cache(rec.shot_id, rec.camera_id)
        return rec

    def abort(self) -> None:
        """Journal the shot as failed; the writer becomes unusable."""
        if self._finalized:
            return
        self._finalized = True
        rec = self._record
        rec.frame_count = self._frame_count
        rec.status = "failed"
        self._store._journal(rec)


class FrameStore:
    def __init__(self, root: Path, writable: bool = False):
        self.root = root
        self._records: dict[tuple[int, str], ShotRecord] = {}
        self._readers: dict[tuple[int, str], _ShotReader] = {}
        self._catalog_pos = 0
        self._lock_fd: Optional[int] = None
        self._load_catalog()
        if writable:
            self._acquire_lock()

    # --- catalog journal ---

    @property
    def _catalog_path(self) -> Path:
        return self.root / CATALOG_NAME

    def _load_catalog(self) -> None:
        self._records.clear()
        self._catalog_pos = 0
        self.refresh()

    def refresh(self) -> None:
        """Apply catalog lines appended since the last load (last entry wins)."""
        path = self._catalog_path
        if not path.exists():
            return
        with open(path, "rb") as fh:
            fh.seek(self._catalog_pos)
            chunk = fh.read()
        # only consume whole lines; a torn tail is picked up next refresh
        end = chunk.rfind(b"\n") + 1
        for line in chunk[:end].splitlines():
            if not line.strip():
                continue
            try:
                rec = ShotRecord.from_json(json.loads(line))
            except (ValueError, KeyError) as exc:
                raise CatalogCorrupt(f"bad catalog line {line!r}: {exc}") from exc
            self._records[(rec.shot_id, rec.camera_id.value)] = rec
        self._catalog_pos += end

    def _journal(self, rec: ShotRecord) -> None:
        line = json.dumps(rec.to_json(), separators=(",", ":")) + "\n"
        try:
            with open(self._catalog_path, "ab") as fh:
                fh.write(line.encode("ascii"))
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise IoFailure(f"cannot append to catalog: {exc}") from exc
        self._catalog_pos += len(line)
        self._records[(rec.shot_id, rec.camera_id.value)] = rec

    # --- writer lock ---

    @property
    def _lock_path(self) -> Path:
        return self.root / LOCK_NAME

    def _acquire_lock(self) -> None:
        if self._lock_fd is not None:
            return
        for _ in range(2):
            try:
                fd = os.open(self._lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.write(fd, str(os.getpid()).encode())
                self._lock_fd = fd
                return
            except FileExistsError:
                if self._steal_stale_lock():
                    continue
                raise StoreLocked(f"writer lock held: {self._lock_path}") from None
        raise StoreLocked(f"writer lock held: {self._lock_path}")

    def _steal_stale_lock(self) -> bool:
        try:
            pid = int(self._lock_path.read_text() or "0")
        except (OSError, ValueError):
            return False
        if pid == os.getpid():
            return False
        try:
            os.kill(pid, 0)
            return False  # holder alive
        except ProcessLookupError:
            pass
        except OSError:
            return False
        try:
            self._lock_path.unlink()
            return True
        except OSError:
            return False

    def close(self) -> None:
        if self._lock_fd is not None:
            os.close(self._lock_fd)
            try:
                self._lock_path.unlink()
            except OSError:
                pass
            self._lock_fd = None

    def __enter__(self) -> "FrameStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- writes ---

    def create_shot(self, shot_id: int, camera: CameraId, overwrite: bool = False) -> ShotWriter:
        """Start (or resume) ingesting a shot; overwrite truncates prior data."""
        if shot_id < 1:
            raise ValueError(f"shot_id must be >= 1, got {shot_id}")
        self._acquire_lock()
        existing = self._records.get((shot_id, camera.value))
        shot_dir = _shot_dir(self.root, shot_id, camera)
        resume: list[_SegmentInfo] = []
        if existing is not None and existing.status == "complete" and not overwrite:
            raise DuplicateShot(f"shot {shot_id}/{camera.value} already complete")
        if overwrite or (existing is not None and existing.status != "ingesting"):
            for path in _segment_paths(shot_dir):
                path.unlink()
            video = shot_dir / VIDEO_NAME
            if video.exists():
                video.unlink()
        elif existing is not None and existing.status == "ingesting":
            total = 0
            for path in _segment_paths(shot_dir):
                info = _read_segment_info(path, total)
                total += info.count
                resume.append(info)
        self._drop_reader_cache(shot_id, camera)
        rec = ShotRecord(
            shot_id=shot_id,
            camera_id=camera,
            frame_count=sum(s.count for s in resume),
            status="ingesting",
            created_at=existing.created_at if resume else time.time(),
        )
        self._journal(rec)
        return ShotWriter(self, rec, resume)

    def mark_failed(self, shot_id: int, camera: CameraId) -> None:
        """Journal a failed status without touching any stored segments."""
        self._acquire_lock()
        existing = self._records.get((shot_id, camera.value))
        rec = ShotRecord(
            shot_id=shot_id,
            camera_id=camera,
            frame_count=existing.frame_count if existing else 0,
            status="failed",
            created_at=existing.created_at if existing else time.time(),
        )
        self._journal(rec)

    # --- reads ---

    def _require(self, shot_id: int, camera: CameraId) -> ShotRecord:
        rec = self._records.get((shot_id, camera.value))
        if rec is None:
            raise UnknownShot(f"no record for shot {shot_id}/{camera.value}")
        return rec

    def _reader(self, shot_id: int, camera: CameraId) -> _ShotReader:
        key = (shot_id, camera.value)
        reader = self._readers.get(key)
        if reader is None:
            reader = _ShotReader(_shot_dir(self.root, shot_id, camera))
            self._readers[key] = reader
        return reader

    def _drop_reader_cache(self, shot_id: int, camera: CameraId) -> None:
        self._readers.pop((shot_id, camera.value), None)

    def frame_count(self, shot_id: int, camera: CameraId) -> int:
        rec = self._require(shot_id, camera)
        if rec.status == "complete":
            return rec.frame_count
        return self._reader(shot_id, camera).frame_count

    def get_frame(self, shot_id: int, camera: CameraId, index: int) -> tuple[FrameImage, float]:
        self._require(shot_id, camera)
        reader = self._reader(shot_id, camera)
        if index < 0 or index >= reader.frame_count:
            raise IndexOutOfRange(f"index {index} not in [0, {reader.frame_count})")
        seg, local = reader.locate(index)
        frame_bytes = seg.width * seg.height
        with open(seg.path, "rb") as fh:
            fh.seek(seg.data_offset + local * frame_bytes)
            data = fh.read(frame_bytes)
        return FrameImage(seg.width, seg.height, data), seg.times[local]

    def iter_frames(self, shot_id: int, camera: CameraId) -> Iterator[tuple[FrameImage, float]]:
        """Sequential bulk read of all frames, one segment file at a time."""
        self._require(shot_id, camera)
        reader = self._reader(shot_id, camera)
        for seg in reader.segments:
            frame_bytes = seg.width * seg.height
            with open(seg.path, "rb") as fh:
                fh.seek(seg.data_offset)
                blob = fh.read(frame_bytes * seg.count)
            for i in range(seg.count):
                data = blob[i * frame_bytes:(i + 1) * frame_bytes]
                yield FrameImage(seg.width, seg.height, data), seg.times[i]

    def frame_at_time(self, shot_id: int, camera: CameraId, t: float) -> tuple[int, float]:
        """Greatest index with times[index] <= t, clamped to the valid range."""
        self._require(shot_id, camera)
        reader = self._reader(shot_id, camera)
        times = reader.times
        if not times:
            raise UnknownShot(f"shot {shot_id}/{camera.value} has no frames")
        idx = bisect.bisect_right(times, t) - 1
        idx = max(0, min(idx, len(times) - 1))
        return idx, times[idx]

    def times(self, shot_id: int, camera: CameraId) -> list[float]:
        """All per-frame timestamps for a shot, concatenated across segments."""
        self._require(shot_id, camera)
        return list(self._reader(shot_id, camera).times)

    def sampled_indices(self, shot_id: int, camera: CameraId, stride: int) -> list[int]:
        if stride < 1:
            raise InvalidStride(f"stride must be >= 1, got {stride}")
        n = self.frame_count(shot_id, camera)
        return list(range(0, n, stride))

    def list_shots(
        self,
        shot_from: Optional[int] = None,
        shot_to: Optional[int] = None,
        camera: Optional[CameraId] = None,
        status: Optional[str] = None,
    ) -> list[ShotRecord]:
        out = []
        for rec in self._records.values():
            if shot_from is not None and rec.shot_id < shot_from:
                continue
            if shot_to is not None and rec.shot_id > shot_to:
                continue
            if camera is not None and rec.camera_id != camera:
                continue
            if status is not None and rec.status != status:
                continue
            out.append(rec)
        out.sort(key=lambda r: (-r.shot_id, r.camera_id.value))
        return out

    def get_record(self, shot_id: int, camera: CameraId) -> ShotRecord:
        return self._require(shot_id, camera)

    def video_path(self, shot_id: int, camera: CameraId) -> Path:
        return _shot_dir(self.root, shot_id, camera) / VIDEO_NAME

    def has_video(self, shot_id: int, camera: CameraId) -> bool:
        return self.video_path(shot_id, camera).exists()


def open_store(root, create_if_missing: bool = False, writable: bool = False) -> FrameStore:
    """Open (optionally creating) a store rooted at a directory."""
    root = Path(root)
    if not root.is_dir():
        if not create_if_missing:
            raise PathUnwritable(f"{root} does not exist")
        try:
            root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            if exc.errno in (errno.EACCES, errno.EROFS, errno.ENOTDIR, errno.EPERM):
                raise PathUnwritable(f"cannot create {root}: {exc}") from exc
            raise IoFailure(str(exc)) from exc
    return FrameStore(root, writable=writable)
