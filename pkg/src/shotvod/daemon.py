"""Ingest daemon: TCP listener feeding a bounded FIFO queue, one ingester.

The listener thread accepts shot notifications, ACKs them into the queue
(NAK when full, duplicate pending notifications are coalesced). The single
ingester thread drains the queue: bulk-reads the incoming PGM frames and
times file, writes store segments, synthesizes the AVI and finalizes the
catalog record. A failed shot is journaled as failed and never blocks the
next one.
"""

from __future__ import annotations

import json
import logging
import queue
import shutil
import socket
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from shotvod import frame_store, protocol
from shotvod.errors import (
    BindFailure,
    CorruptFrame,
    DuplicateShot,
    FrameCountMismatch,
    MalformedMessage,
    MissingTimesFile,
    ShotVodError,
)
from shotvod.imaging import read_pgm
from shotvod.types import AckMessage, CameraId, ShotMessage
from shotvod.video import mux_avi, nominal_fps, run_post_encode

log = logging.getLogger("shotvod.daemon")


def _event(name: str, **fields) -> None:
    log.info(json.dumps({"event": name, **fields}, separators=(",", ":")))


@dataclass
class DaemonConfig:
    store_root: Path
    incoming_dir: Path
    host: str = "127.0.0.1"
    port: int = protocol.DEFAULT_PORT
    segment_size: int = frame_store.DEFAULT_SEGMENT_SIZE
    queue_capacity: int = 128
    synth_video: bool = True
    delete_incoming: bool = False
    overwrite: bool = False
    post_encode: Optional[str] = None

    def __post_init__(self):
        self.store_root = Path(self.store_root)
        self.incoming_dir = Path(self.incoming_dir)
        if self.segment_size < 1:
            raise ValueError("segment_size must be >= 1")
        if self.queue_capacity < 1:
            raise ValueError("queue_capacity must be >= 1")


@dataclass
class IngestReport:
    shot_id: int
    camera_id: CameraId
    frames_ingested: int = 0
    bytes_read: int = 0
    segments_written: int = 0
    video_bytes: int = 0
    elapsed_s: float = 0.0
    read_s: float = 0.0
    write_s: float = 0.0
    synth_s: float = 0.0


def _incoming_frames(shot_dir: Path) -> list[Path]:
    paths = sorted(shot_dir.glob("frame_*.pgm"))
    for i, path in enumerate(paths):
        if path.name != f"frame_{i:06d}.pgm":
            raise FrameCountMismatch(
                f"{shot_dir}: frame files not contiguous at index {i} ({path.name})"
            )
    return paths


def ingest_shot(store: frame_store.FrameStore, msg: ShotMessage, cfg: DaemonConfig) -> IngestReport:
    """Ingest one notified shot from the incoming directory into the store."""
    report = IngestReport(msg.shot_id, msg.camera_id)
    t0 = time.perf_counter()
    shot_dir = cfg.incoming_dir / str(msg.shot_id) / msg.camera_id.value

    existing = store.list_shots(msg.shot_id, msg.shot_id, msg.camera_id)
    if existing and existing[0].status == "complete" and not cfg.overwrite:
        raise DuplicateShot(
            f"shot {msg.shot_id}/{msg.camera_id.value} already complete"
        )

    try:
        times_path = shot_dir / "times.txt"
        if not times_path.exists():
            raise MissingTimesFile(f"{times_path} missing")
        try:
            times = [float(line) for line in times_path.read_text().split()]
        except ValueError as exc:
            raise CorruptFrame(f"{times_path}: unparseable timestamp: {exc}") from exc
        frame_paths = _incoming_frames(shot_dir)
        if not frame_paths or len(frame_paths) != len(times):
            raise FrameCountMismatch(
                f"{shot_dir}: {len(frame_paths)} frame files vs {len(times)} timestamps"
            )
    except ShotVodError:
        store.mark_failed(msg.shot_id, msg.camera_id)
        raise

    writer = store.create_shot(msg.shot_id, msg.camera_id, overwrite=True)
    try:
        for start in range(0, len(frame_paths), cfg.segment_size):
            chunk_paths = frame_paths[start:start + cfg.segment_size]
            t_read = time.perf_counter()
            frames = []
            for path in chunk_paths:
                report.bytes_read += path.stat().st_size
                frames.append(read_pgm(path))
            report.read_s += time.perf_counter() - t_read
            t_write = time.perf_counter()
            writer.append_segment(frames, times[start:start + len(frames)])
            report.write_s += time.perf_counter() - t_write
            report.segments_written += 1
            report.frames_ingested += len(frames)
            _event(
                "segment",
                shot=msg.shot_id,
                camera=msg.camera_id.value,
                segment=report.segments_written - 1,
                frames=len(frames),
            )
        report.bytes_read += times_path.stat().st_size

        if cfg.synth_video:
            t_synth = time.perf_counter()
            video_path = store.video_path(msg.shot_id, msg.camera_id)
            fps = nominal_fps(len(times), times[-1] - times[0])
            frames_iter = (f for f, _ in store.iter_frames(msg.shot_id, msg.camera_id))
            mux_avi(frames_iter, fps, video_path)
            report.video_bytes = video_path.stat().st_size
            if cfg.post_encode:
                run_post_encode(
                    cfg.post_encode, video_path, video_path.with_suffix(".enc")
                )
            report.synth_s = time.perf_counter() - t_synth

        writer.finalize(total_size_bytes=report.bytes_read)
    except Exception:
        writer.abort()
        raise
    if cfg.delete_incoming:
        shutil.rmtree(shot_dir, ignore_errors=True)
    report.elapsed_s = time.perf_counter() - t0
    return report


class StorageDaemon:
    """Listener + ingester threads around one writable store."""

    def __init__(self, cfg: DaemonConfig):
        self.cfg = cfg
        self._queue: queue.Queue[ShotMessage] = queue.Queue(maxsize=cfg.queue_capacity)
        self._pending: set[tuple[int, str]] = set()
        self._lock = threading.Lock()
        self._shutdown = threading.Event()
        self._current: Optional[ShotMessage] = None
        self._sock: Optional[socket.socket] = None
        self._threads: list[threading.Thread] = []
        self._store: Optional[frame_store.FrameStore] = None
        self.reports: list[IngestReport] = []
        self.port: int = cfg.port

    # --- lifecycle ---

    def start(self) -> None:
        self._store = frame_store.open_store(
            self.cfg.store_root, create_if_missing=True, writable=True
        )
        try:
            sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            sock.bind((self.cfg.host, self.cfg.port))
            sock.listen(16)
        except OSError as exc:
            self._store.close()
            raise BindFailure(
                f"cannot bind {self.cfg.host}:{self.cfg.port}: {exc}"
            ) from exc
        sock.settimeout(0.2)
        self._sock = sock
        self.port = sock.getsockname()[1]
        self._threads = [
            threading.Thread(target=self._listen_loop, name="vodd-listener", daemon=True),
            threading.Thread(target=self._ingest_loop, name="vodd-ingester", daemon=True),
        ]
        for t in self._threads:
            t.start()
        _event("started", host=self.cfg.host, port=self.port)

    def stop(self, timeout: float = 30.0) -> None:
        """Signal shutdown; the in-flight ingest finishes before threads exit."""
        self._shutdown.set()
        for t in self._threads:
            t.join(timeout)
        if self._sock is not None:
            self._sock.close()
            self._sock = None
        if self._store is not None:
            self._store.close()
            self._store = None
        _event("stopped")

    def request_shutdown(self) -> None:
        self._shutdown.set()

    def run_forever(self) -> None:
        self.start()
        try:
            while not self._shutdown.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def queue_status(self) -> tuple[int, Optional[ShotMessage]]:
        with self._lock:
            return self._queue.qsize(), self._current

    # --- listener ---

    def _listen_loop(self) -> None:
        assert self._sock is not None
        while not self._shutdown.is_set():
            try:
                conn, _ = self._sock.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            try:
                self._handle_connection(conn)
            except Exception as exc:  # a bad client never stops the listener
                _event("listener_error", error=str(exc))
            finally:
                conn.close()

    def _handle_connection(self, conn: socket.socket) -> None:
        conn.settimeout(5.0)
        try:
            line = protocol.read_line(conn)
        except (socket.timeout, OSError):
            return
        try:
            msg = protocol.decode_shot_msg(line)
        except MalformedMessage as exc:
            _event("rejected", reason=str(exc))
            return
        accepted = self._enqueue(msg)
        _event(
            "received",
            shot=msg.shot_id,
            camera=msg.camera_id.value,
            accepted=accepted,
        )
        try:
            conn.sendall(protocol.encode_ack(AckMessage(msg.shot_id, accepted)))
        except OSError:
            pass

    def _enqueue(self, msg: ShotMessage) -> bool:
        key = (msg.shot_id, msg.camera_id.value)
        with self._lock:
            if key in self._pending:
                return True  # coalesce retried notification
            try:
                self._queue.put_nowait(msg)
            except queue.Full:
                return False
            self._pending.add(key)
            return True

    # --- ingester ---

    def _ingest_loop(self) -> None:
        assert self._store is not None
        while not self._shutdown.is_set():
            try:
                msg = self._queue.get(timeout=0.1)
            except queue.Empty:
                continue
            with self._lock:
                self._pending.discard((msg.shot_id, msg.camera_id.value))
                self._current = msg
            _event("ingest_started", shot=msg.shot_id, camera=msg.camera_id.value)
            try:
                report = ingest_shot(self._store, msg, self.cfg)
            except (ShotVodError, OSError) as exc:
                _event(
                    "failed",
                    shot=msg.shot_id,
                    camera=msg.camera_id.value,
                    error=type(exc).__name__,
                    detail=str(exc),
                )
            else:
                self.reports.append(report)
                _event(
                    "completed",
                    shot=msg.shot_id,
                    camera=msg.camera_id.value,
                    frames=report.frames_ingested,
                    segments=report.segments_written,
                    video_bytes=report.video_bytes,
                    elapsed_s=round(report.elapsed_s, 6),
                    read_s=round(report.read_s, 6),
                    write_s=round(report.write_s, 6),
                    synth_s=round(report.synth_s, 6),
                )
            finally:
                with self._lock:
                    self._current = None
