"""Ingest-path comparison: per-frame files + XML times vs the segmented store.

Each built-in shot profile is generated once as an incoming directory, then
consumed by both paths: the old layout writes one file per frame plus a
times.xml, the new path runs the full segmented-store ingest. Wall times
are medians over repetitions after a discarded warm-up run.
"""

from __future__ import annotations

import csv
import os
import shutil
import statistics
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import quoteattr

from shotvod.acquisition import PROFILES, AcqConfig, ShotProfile, replay_profile
from shotvod.daemon import DaemonConfig, ingest_shot
from shotvod.errors import IoFailure, UnknownProfile
from shotvod.frame_store import open_store
from shotvod.types import CameraId, ShotMessage

CSV_FIELDS = ["shot_no", "frames", "bytes", "old_s", "new_s", "ratio", "paper_old_s", "paper_new_s"]


@dataclass
class BenchResult:
    profile: ShotProfile
    old_elapsed_s: float
    new_elapsed_s: float
    ratio: float
    bytes_written: int

    def to_row(self) -> dict:
        return {
            "shot_no": self.profile.shot_no,
            "frames": self.profile.frames,
            "bytes": self.bytes_written,
            "old_s": f"{self.old_elapsed_s:.6f}",
            "new_s": f"{self.new_elapsed_s:.6f}",
            "ratio": f"{self.ratio:.4f}",
            "paper_old_s": self.profile.old_time_s,
            "paper_new_s": self.profile.new_time_s,
        }


def make_workload(profile: ShotProfile, workdir: Path) -> tuple[Path, int]:
    """Generate the profile's incoming directory once; returns (dir, bytes)."""
    cfg = AcqConfig(incoming_dir=workdir, camera_id=CameraId.WK_IR)
    manifest, _ = replay_profile(cfg, profile.shot_no, notify=False)
    shot_dir = workdir / str(profile.shot_no) / CameraId.WK_IR.value
    return shot_dir, manifest.total_bytes


def run_old_path(src_dir: Path, dest_dir: Path) -> float:
    """One file per frame plus times.xml; returns wall seconds."""
    try:
        dest_dir.mkdir(parents=True, exist_ok=True)
        t0 = time.perf_counter()
        times = [float(line) for line in (src_dir / "times.txt").read_text().split()]
        frame_paths = sorted(src_dir.glob("frame_*.pgm"))
        for i, path in enumerate(frame_paths):
            (dest_dir / f"frame_{i:06d}.pgm").write_bytes(path.read_bytes())
        parts = ["<frames>"]
        parts.extend(
            f'<frame index="{i}" t={quoteattr(f"{t:.6f}")}/>' for i, t in enumerate(times)
        )
        parts.append("</frames>")
        (dest_dir / "times.xml").write_text("\n".join(parts), encoding="ascii")
        os.sync()
        return time.perf_counter() - t0
    except OSError as exc:
        raise IoFailure(f"old path failed in {dest_dir}: {exc}") from exc


def run_new_path(
    src_root: Path,
    store_root: Path,
    shot_no: int,
    segment_size: int = 64,
    include_synth: bool = False,
) -> float:
    """Full segmented-store ingest of the generated workload; wall seconds."""
    cfg = DaemonConfig(
        store_root=store_root,
        incoming_dir=src_root,
        segment_size=segment_size,
        synth_video=include_synth,
    )
    store = open_store(store_root, create_if_missing=True, writable=True)
    try:
        t0 = time.perf_counter()
        ingest_shot(store, ShotMessage(shot_no, CameraId.WK_IR), cfg)
        os.sync()
        return time.perf_counter() - t0
    finally:
        store.close()


def run_comparison(
    shot_nos: list[int],
    repetitions: int = 3,
    out_csv: Path | None = None,
    include_synth: bool = False,
    segment_size: int = 64,
    workdir: Path | None = None,
) -> list[BenchResult]:
    """Bench every requested profile; paths run sequentially, never interleaved."""
    if not shot_nos:
        raise ValueError("no profiles requested")
    for shot_no in shot_nos:
        if shot_no not in PROFILES:
            raise UnknownProfile(f"no built-in profile for shot {shot_no}")

    own_workdir = workdir is None
    workdir = Path(tempfile.mkdtemp(prefix="vodbench-")) if own_workdir else Path(workdir)
    results = []
    try:
        for shot_no in shot_nos:
            profile = PROFILES[shot_no]
            src_root = workdir / f"src_{shot_no}"
            src_dir, payload_bytes = make_workload(profile, src_root)

            old_times, new_times = [], []
            for rep in range(repetitions + 1):  # rep 0 is the discarded warm-up
                old_dest = workdir / f"old_{shot_no}_{rep}"
                elapsed = run_old_path(src_dir, old_dest)
                shutil.rmtree(old_dest, ignore_errors=True)
                if rep > 0:
                    old_times.append(elapsed)

                new_dest = workdir / f"new_{shot_no}_{rep}"
                elapsed = run_new_path(
                    src_root, new_dest, shot_no,
                    segment_size=segment_size, include_synth=include_synth,
                )
                shutil.rmtree(new_dest, ignore_errors=True)
                if rep > 0:
                    new_times.append(elapsed)

            old_s = statistics.median(old_times)
            new_s = statistics.median(new_times)
            results.append(
                BenchResult(profile, old_s, new_s, old_s / new_s, payload_bytes)
            )
            shutil.rmtree(src_root, ignore_errors=True)
    finally:
        if own_workdir:
            shutil.rmtree(workdir, ignore_errors=True)

    if out_csv is not None:
        with open(out_csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for result in results:
                writer.writerow(result.to_row())
    return results
