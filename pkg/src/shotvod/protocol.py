"""Line protocol for shot notifications between acquisition and storage.

Request: "SHOT <shot_id> CAM <camera>\n", reply "ACK <shot_id>\n" or
"NAK <shot_id>\n". One message per connection.
"""

from __future__ import annotations

import re
import socket

from shotvod.errors import ConnectFailure, MalformedAck, MalformedMessage, NotifyTimeout
from shotvod.types import AckMessage, CameraId, ShotMessage

DEFAULT_PORT = 9000
MAX_LINE = 256

_SHOT_RE = re.compile(rb"\ASHOT (0|[1-9][0-9]*) CAM ([A-Z-]+)\n\Z")
_ACK_RE = re.compile(rb"\A(ACK|NAK) (0|[1-9][0-9]*)\n\Z")


def encode_shot_msg(msg: ShotMessage) -> bytes:
    return f"SHOT {msg.shot_id} CAM {msg.camera_id.value}\n".encode("ascii")


def decode_shot_msg(line: bytes) -> ShotMessage:
    m = _SHOT_RE.match(line)
    if not m:
        raise MalformedMessage(f"bad shot line: {line[:80]!r}")
    shot_id = int(m.group(1))
    if shot_id < 1:
        raise MalformedMessage(f"shot_id must be >= 1: {line!r}")
    try:
        camera = CameraId(m.group(2).decode("ascii"))
    except ValueError:
        raise MalformedMessage(f"unknown camera in {line!r}") from None
    return ShotMessage(shot_id, camera)


def encode_ack(ack: AckMessage) -> bytes:
    word = "ACK" if ack.accepted else "NAK"
    return f"{word} {ack.shot_id}\n".encode("ascii")


def decode_ack(line: bytes) -> AckMessage:
    m = _ACK_RE.match(line)
    if not m:
        raise MalformedAck(f"bad ack line: {line[:80]!r}")
    return AckMessage(int(m.group(2)), m.group(1) == b"ACK")


def read_line(sock: socket.socket, limit: int = MAX_LINE) -> bytes:
    """Read up to and including one newline; returns b'' on EOF before any data."""
    buf = bytearray()
    while len(buf) < limit:
        chunk = sock.recv(1)
        if not chunk:
            break
        buf += chunk
        if chunk == b"\n":
            break
    return bytes(buf)


def notify_shot(host: str, port: int, msg: ShotMessage, timeout: float = 5.0) -> AckMessage:
    """Send one shot notification and wait for the daemon's ack."""
    try:
        sock = socket.create_connection((host, port), timeout=timeout)
    except socket.timeout as exc:
        raise NotifyTimeout(f"connect to {host}:{port} timed out") from exc
    except OSError as exc:
        raise ConnectFailure(f"cannot connect to {host}:{port}: {exc}") from exc
    try:
        sock.sendall(encode_shot_msg(msg))
        try:
            line = read_line(sock)
        except socket.timeout as exc:
            raise NotifyTimeout(f"no ack from {host}:{port}") from exc
        ack = decode_ack(line)
    finally:
        sock.close()
    if ack.shot_id != msg.shot_id:
        raise MalformedAck(f"ack for shot {ack.shot_id}, expected {msg.shot_id}")
    return ack
