import socket
import threading
import time

import pytest

from shotvod import daemon as daemon_mod
from shotvod import protocol
from shotvod.acquisition import AcqConfig, generate_frame, produce_shot, write_shot_files
from shotvod.daemon import DaemonConfig, StorageDaemon, ingest_shot
from shotvod.errors import ConnectFailure, FrameCountMismatch, MissingTimesFile
from shotvod.frame_store import open_store
from shotvod.types import CameraId, ShotMessage

CAM = CameraId.WK_IR


@pytest.fixture
def paths(tmp_path):
    return tmp_path / "store", tmp_path / "incoming"


def make_daemon(paths, **kw):
    store_root, incoming = paths
    cfg = DaemonConfig(store_root=store_root, incoming_dir=incoming,
                       host="127.0.0.1", port=0, **kw)
    return StorageDaemon(cfg)


def acq_cfg(incoming, port, **kw):
    return AcqConfig(incoming_dir=incoming, daemon_host="127.0.0.1",
                     daemon_port=port, width=16, height=12, **kw)


def wait_for(predicate, timeout=10.0, interval=0.02):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return True
        time.sleep(interval)
    return False


def completed(store_root, shot_id, camera=CAM):
    store = open_store(store_root, create_if_missing=True)
    try:
        recs = store.list_shots(shot_id, shot_id, camera, status="complete")
        return bool(recs)
    finally:
        store.close()


# --- ingest_shot unit behavior ---

def test_ingest_shot_segments_and_video(paths):
    store_root, incoming = paths
    cfg = DaemonConfig(store_root=store_root, incoming_dir=incoming, segment_size=64)
    write_shot_files(AcqConfig(incoming_dir=incoming, fps=124.36, duration_s=0.78,
                               width=16, height=12), 77212)
    store = open_store(store_root, create_if_missing=True, writable=True)
    try:
        report = ingest_shot(store, ShotMessage(77212, CAM), cfg)
        assert report.frames_ingested == 97
        assert report.segments_written == 2  # ceil(97/64)
        assert report.video_bytes > 0
        assert store.frame_count(77212, CAM) == 97
        assert store.has_video(77212, CAM)
        # stored frames and times are bit-exact
        frame, t = store.get_frame(77212, CAM, 96)
        assert frame == generate_frame(77212, 96, 16, 12)
        assert t == float(f"{96 / 124.36:.6f}")
    finally:
        store.close()


def test_ingest_missing_times_marks_failed(paths):
    store_root, incoming = paths
    cfg = DaemonConfig(store_root=store_root, incoming_dir=incoming)
    write_shot_files(AcqConfig(incoming_dir=incoming, width=8, height=8,
                               fps=10, duration_s=0.3), 5)
    (incoming / "5" / CAM.value / "times.txt").unlink()
    store = open_store(store_root, create_if_missing=True, writable=True)
    try:
        with pytest.raises(MissingTimesFile):
            ingest_shot(store, ShotMessage(5, CAM), cfg)
        assert store.get_record(5, CAM).status == "failed"
    finally:
        store.close()


def test_ingest_empty_dir_fails(paths):
    store_root, incoming = paths
    cfg = DaemonConfig(store_root=store_root, incoming_dir=incoming)
    shot_dir = incoming / "6" / CAM.value
    shot_dir.mkdir(parents=True)
    (shot_dir / "times.txt").write_text("")
    store = open_store(store_root, create_if_missing=True, writable=True)
    try:
        with pytest.raises(FrameCountMismatch):
            ingest_shot(store, ShotMessage(6, CAM), cfg)
        assert store.get_record(6, CAM).status == "failed"
    finally:
        store.close()


# --- daemon end-to-end over TCP ---

def test_produce_then_ingest_end_to_end(paths):
    store_root, incoming = paths
    d = make_daemon(paths)
    d.start()
    try:
        cfg = acq_cfg(incoming, d.port, fps=20.0, duration_s=0.5)
        manifest, ack = produce_shot(cfg, 101)
        assert ack.accepted
        assert wait_for(lambda: completed(store_root, 101))
    finally:
        d.stop()
    store = open_store(store_root)
    try:
        assert store.frame_count(101, CAM) == manifest.frame_count == 10
        for i in range(10):
            frame, _ = store.get_frame(101, CAM, i)
            assert frame == generate_frame(101, i, 16, 12)
    finally:
        store.close()


def test_fifo_completion_order(paths):
    store_root, incoming = paths
    d = make_daemon(paths)
    d.start()
    try:
        for shot in (11, 12, 13):
            produce_shot(acq_cfg(incoming, d.port, fps=10, duration_s=0.3), shot)
        assert wait_for(lambda: all(completed(store_root, s) for s in (11, 12, 13)))
    finally:
        d.stop()
    store = open_store(store_root)
    try:
        recs = {r.shot_id: r for r in store.list_shots()}
        assert recs[11].created_at <= recs[12].created_at <= recs[13].created_at
    finally:
        store.close()


def test_nak_when_queue_full(paths, monkeypatch):
    store_root, incoming = paths
    gate = threading.Event()
    real_ingest = daemon_mod.ingest_shot

    def slow_ingest(store, msg, cfg):
        gate.wait(10.0)
        return real_ingest(store, msg, cfg)

    monkeypatch.setattr(daemon_mod, "ingest_shot", slow_ingest)
    d = make_daemon(paths, queue_capacity=1)
    d.start()
    try:
        cfg = acq_cfg(incoming, d.port, fps=10, duration_s=0.2)
        _, ack_a = produce_shot(cfg, 21)  # dequeued, stalls in ingest
        assert ack_a.accepted
        assert wait_for(lambda: d.queue_status()[1] is not None)
        _, ack_b = produce_shot(cfg, 22)  # fills the queue
        assert ack_b.accepted
        _, ack_c = produce_shot(cfg, 23)  # queue full
        assert not ack_c.accepted
        pending, current = d.queue_status()
        assert pending == 1
        assert current.shot_id == 21
        gate.set()
        assert wait_for(lambda: completed(store_root, 22))
        assert not completed(store_root, 23)
    finally:
        gate.set()
        d.stop()


def test_duplicate_pending_coalesced(paths, monkeypatch):
    store_root, incoming = paths
    gate = threading.Event()
    real_ingest = daemon_mod.ingest_shot
    ingested = []

    def slow_ingest(store, msg, cfg):
        gate.wait(10.0)
        ingested.append(msg.shot_id)
        return real_ingest(store, msg, cfg)

    monkeypatch.setattr(daemon_mod, "ingest_shot", slow_ingest)
    d = make_daemon(paths, queue_capacity=4)
    d.start()
    try:
        cfg = acq_cfg(incoming, d.port, fps=10, duration_s=0.2)
        write_shot_files(cfg, 31)
        msg = ShotMessage(31, CAM)
        assert wait_for(lambda: d.queue_status() == (0, None))
        # first notify gets picked up by the ingester; block it there
        assert protocol.notify_shot("127.0.0.1", d.port, msg).accepted
        assert wait_for(lambda: d.queue_status()[1] is not None)
        # now two retries while one copy is pending: only one is queued
        assert protocol.notify_shot("127.0.0.1", d.port, msg).accepted
        assert protocol.notify_shot("127.0.0.1", d.port, msg).accepted
        assert d.queue_status()[0] == 1
        gate.set()
        assert wait_for(lambda: completed(store_root, 31))
    finally:
        gate.set()
        d.stop()
    assert ingested.count(31) == 2  # original + one coalesced retry


def test_malformed_line_keeps_daemon_serving(paths):
    store_root, incoming = paths
    d = make_daemon(paths)
    d.start()
    try:
        sock = socket.create_connection(("127.0.0.1", d.port), timeout=2)
        sock.sendall(b"GARBAGE LINE\n")
        assert protocol.read_line(sock) == b""  # closed without a reply
        sock.close()
        # abrupt disconnect mid-message
        sock = socket.create_connection(("127.0.0.1", d.port), timeout=2)
        sock.sendall(b"SHOT 1")
        sock.close()
        _, ack = produce_shot(acq_cfg(incoming, d.port, fps=10, duration_s=0.2), 41)
        assert ack.accepted
        assert wait_for(lambda: completed(store_root, 41))
    finally:
        d.stop()


def test_failed_shot_does_not_block_next(paths):
    store_root, incoming = paths
    d = make_daemon(paths)
    d.start()
    try:
        cfg = acq_cfg(incoming, d.port, fps=10, duration_s=0.3)
        write_shot_files(cfg, 51)
        (incoming / "51" / CAM.value / "times.txt").unlink()
        assert protocol.notify_shot("127.0.0.1", d.port, ShotMessage(51, CAM)).accepted
        _, ack = produce_shot(cfg, 52)
        assert ack.accepted
        assert wait_for(lambda: completed(store_root, 52))
    finally:
        d.stop()
    store = open_store(store_root)
    try:
        assert store.get_record(51, CAM).status == "failed"
        assert store.get_record(52, CAM).status == "complete"
    finally:
        store.close()


def test_notify_daemon_down(tmp_path):
    with pytest.raises(ConnectFailure):
        protocol.notify_shot("127.0.0.1", 1, ShotMessage(1, CAM), timeout=1.0)


def test_queue_status_idle(paths):
    d = make_daemon(paths)
    d.start()
    try:
        assert wait_for(lambda: d.queue_status() == (0, None))
    finally:
        d.stop()
