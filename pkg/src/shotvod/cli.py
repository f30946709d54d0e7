"""Command line entry points: acq, vodd, vods, vodbench."""

from __future__ import annotations

import logging
import signal
import sys
from pathlib import Path

import click

from shotvod import bench as bench_mod
from shotvod.acquisition import PROFILES, AcqConfig, produce_shot, replay_profile
from shotvod.daemon import DaemonConfig, StorageDaemon
from shotvod.errors import ShotVodError
from shotvod.types import CameraId

CAMERA_CHOICES = [c.value for c in CameraId]


def _parse_endpoint(value: str, default_host: str = "127.0.0.1") -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    return host or default_host, int(port)


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
def acq():
    """Simulated acquisition: generate shot frames and notify the daemon."""


@acq.command()
@click.option("--shot", type=int, required=True, help="Shot number")
@click.option("--camera", type=click.Choice(CAMERA_CHOICES), default="WK-IR")
@click.option("--fps", type=float, default=25.0, show_default=True)
@click.option("--duration", type=float, default=1.0, show_default=True, help="Seconds")
@click.option("--width", type=int, default=320, show_default=True)
@click.option("--height", type=int, default=240, show_default=True)
@click.option("--incoming", type=click.Path(path_type=Path), required=True)
@click.option("--daemon", default="127.0.0.1:9000", show_default=True, help="HOST:PORT")
def produce(shot, camera, fps, duration, width, height, incoming, daemon):
    """Generate one synthetic shot and notify the storage daemon."""
    host, port = _parse_endpoint(daemon)
    cfg = AcqConfig(
        incoming_dir=incoming, daemon_host=host, daemon_port=port,
        width=width, height=height, fps=fps, duration_s=duration,
        camera_id=CameraId(camera),
    )
    try:
        manifest, ack = produce_shot(cfg, shot)
    except ShotVodError as exc:
        _fail(exc)
    word = "accepted" if ack.accepted else "rejected (queue full)"
    click.echo(f"shot {shot}: {manifest.frame_count} frames, "
               f"{manifest.total_bytes} bytes, {word}")


@acq.command()
@click.option("--profile", type=int, required=True,
              help=f"Built-in shot profile, one of {sorted(PROFILES)}")
@click.option("--camera", type=click.Choice(CAMERA_CHOICES), default="WK-IR")
@click.option("--incoming", type=click.Path(path_type=Path), required=True)
@click.option("--daemon", default="127.0.0.1:9000", show_default=True, help="HOST:PORT")
def replay(profile, camera, incoming, daemon):
    """Reproduce a built-in shot profile's frame count and byte volume."""
    host, port = _parse_endpoint(daemon)
    cfg = AcqConfig(
        incoming_dir=incoming, daemon_host=host, daemon_port=port,
        camera_id=CameraId(camera),
    )
    try:
        manifest, ack = replay_profile(cfg, profile)
    except ShotVodError as exc:
        _fail(exc)
    word = "accepted" if ack and ack.accepted else "rejected (queue full)"
    click.echo(f"shot {profile}: {manifest.frame_count} frames, "
               f"{manifest.total_bytes} bytes, {word}")


@click.group()
def vodd():
    """Storage daemon."""


@vodd.command()
@click.option("--store", type=click.Path(path_type=Path), required=True)
@click.option("--incoming", type=click.Path(path_type=Path), required=True)
@click.option("--listen", default=":9000", show_default=True, help="[HOST]:PORT")
@click.option("--segment-size", type=int, default=64, show_default=True)
@click.option("--queue-cap", type=int, default=128, show_default=True)
@click.option("--no-video", is_flag=True, help="Skip AVI synthesis")
@click.option("--delete-incoming", is_flag=True, help="Remove incoming files after ingest")
@click.option("--overwrite", is_flag=True, help="Re-ingest shots already complete")
@click.option("--post-encode", default=None,
              help="External encoder command; {in} and {out} are substituted")
def run(store, incoming, listen, segment_size, queue_cap, no_video,
        delete_incoming, overwrite, post_encode):
    """Run the listener + ingest pipeline until SIGINT/SIGTERM."""
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stdout)
    host, port = _parse_endpoint(listen, default_host="0.0.0.0")
    cfg = DaemonConfig(
        store_root=store, incoming_dir=incoming, host=host, port=port,
        segment_size=segment_size, queue_capacity=queue_cap,
        synth_video=not no_video, delete_incoming=delete_incoming,
        overwrite=overwrite, post_encode=post_encode,
    )
    daemon = StorageDaemon(cfg)
    signal.signal(signal.SIGTERM, lambda *_: daemon.request_shutdown())
    try:
        daemon.run_forever()
    except ShotVodError as exc:
        _fail(exc)


@click.group()
def vods():
    """VOD HTTP API."""


@vods.command()
@click.option("--store", type=click.Path(path_type=Path), required=True)
@click.option("--listen", default=":8080", show_default=True, help="[HOST]:PORT")
@click.option("--cors-origin", default=None, help="Allowed browser origin URL")
def serve(store, listen, cors_origin):
    """Serve shot listings, frames and videos from the store."""
    import uvicorn

    from shotvod.server import create_app

    host, port = _parse_endpoint(listen, default_host="0.0.0.0")
    uvicorn.run(create_app(store, cors_origin=cors_origin), host=host, port=port)


@click.command()
@click.option("--profiles", default="all", show_default=True,
              help="'all' or comma-separated shot numbers")
@click.option("--reps", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=Path("results.csv"),
              show_default=True)
@click.option("--include-synth", is_flag=True, help="Include AVI synthesis in the new path")
@click.option("--segment-size", type=int, default=64, show_default=True)
def vodbench(profiles, reps, out, include_synth, segment_size):
    """Compare per-frame-file storage against the segmented store."""
    if profiles == "all":
        shot_nos = sorted(PROFILES)
    else:
        try:
            shot_nos = [int(p) for p in profiles.split(",") if p]
        except ValueError:
            _fail(ValueError(f"bad --profiles value {profiles!r}"))
    try:
        results = bench_mod.run_comparison(
            shot_nos, repetitions=reps, out_csv=out,
            include_synth=include_synth, segment_size=segment_size,
        )
    except ShotVodError as exc:
        _fail(exc)
    click.echo(f"{'shot':>6} {'frames':>7} {'old_s':>9} {'new_s':>9} {'ratio':>7}")
    for r in results:
        click.echo(f"{r.profile.shot_no:>6} {r.profile.frames:>7} "
                   f"{r.old_elapsed_s:>9.4f} {r.new_elapsed_s:>9.4f} {r.ratio:>7.2f}")
    click.echo(f"wrote {out}")
