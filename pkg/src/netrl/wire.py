"""Binary message format for all env<->agent and unit<->unit traffic.

Every message travels as one fixed-layout frame; the same bytes are used
in-process, over UDP, and inside trace files, so cross-host runs are
bit-reproducible.

Frame layout (all multi-byte integers little-endian):

  offset  size  field
  0       4     magic  b"RLNK"
  4       1     version (currently 1)
  5       1     kind    (0=Reset, 1=Observation, 2=Action, 3=EpisodeEnd)
  6       4     seq     u32, per-channel, starts at 0
  10      8     send_ts u64 microseconds since session epoch
  18      4     payload_len u32
  22      ...   payload

Payload bodies by kind:

  Reset        u64 seed                                        (8 bytes)
  Observation  u32 count + count * f64   -- vector observation (4 + 8n)
               or exactly 147 raw bytes  -- 7x7x3 grid, row-major
  Action       u8 discrete action id                           (1 byte)
  EpisodeEnd   f64 return + u32 steps + u8 success flag        (13 bytes)

A vector payload always has length 4 + 8n and a grid payload exactly 147;
the two never collide (147 is not 4 mod 8), so the observation subtype is
recovered from payload_len alone.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

MAGIC = b"RLNK"
VERSION = 1
HEADER_LEN = 22
MAX_PAYLOAD = 64 * 1024
GRID_PAYLOAD_LEN = 7 * 7 * 3

SEQ_MAX = 2**32 - 1
TS_MAX = 2**64 - 1

_HEADER = struct.Struct("<4sBBIQI")


class EncodeError(Exception):
    """Message body violates the wire format (bad range, oversized payload)."""


class DecodeError(Exception):
    """Base class for every frame decoding failure."""


class BadMagicError(DecodeError):
    pass


class BadVersionError(DecodeError):
    pass


class TruncatedFrameError(DecodeError):
    pass


class LengthMismatchError(DecodeError):
    pass


class UnknownKindError(DecodeError):
    pass


class MessageKind(IntEnum):
    RESET = 0
    OBSERVATION = 1
    ACTION = 2
    EPISODE_END = 3


@dataclass(frozen=True)
class Reset:
    seed: int


@dataclass(frozen=True)
class VectorObs:
    values: tuple[float, ...]


@dataclass(frozen=True)
class GridObs:
    cells: bytes  # row-major 7x7x3, exactly 147 bytes


@dataclass(frozen=True)
class Action:
    action_id: int


@dataclass(frozen=True)
class EpisodeEnd:
    episode_return: float
    steps: int
    success: bool


Body = Reset | VectorObs | GridObs | Action | EpisodeEnd

_KIND_OF_BODY = {
    Reset: MessageKind.RESET,
    VectorObs: MessageKind.OBSERVATION,
    GridObs: MessageKind.OBSERVATION,
    Action: MessageKind.ACTION,
    EpisodeEnd: MessageKind.EPISODE_END,
}


@dataclass(frozen=True)
class Message:
    """One timestamped, sequence-numbered unit crossing a channel."""

    seq: int
    send_ts: int
    body: Body

    @property
    def kind(self) -> MessageKind:
        return _KIND_OF_BODY[type(self.body)]


def is_stale(incoming: int, last_delivered: int) -> bool:
    """True iff `incoming` is not newer than the last delivered seq.

    Duplicates count as stale; delivering through this filter yields a
    strictly increasing seq sequence at the receiver.
    """
    return incoming <= last_delivered


def _encode_body(body: Body) -> bytes:
    if isinstance(body, Reset):
        if not 0 <= body.seed <= TS_MAX:
            raise EncodeError(f"reset seed out of u64 range: {body.seed}")
        return struct.pack("<Q", body.seed)
    if isinstance(body, VectorObs):
        return struct.pack("<I", len(body.values)) + struct.pack(
            f"<{len(body.values)}d", *body.values
        )
    if isinstance(body, GridObs):
        if len(body.cells) != GRID_PAYLOAD_LEN:
            raise EncodeError(
                f"grid payload must be {GRID_PAYLOAD_LEN} bytes, got {len(body.cells)}"
            )
        return bytes(body.cells)
    if isinstance(body, Action):
        if not 0 <= body.action_id <= 255:
            raise EncodeError(f"action id out of u8 range: {body.action_id}")
        return struct.pack("<B", body.action_id)
    if isinstance(body, EpisodeEnd):
        if not 0 <= body.steps <= SEQ_MAX:
            raise EncodeError(f"step count out of u32 range: {body.steps}")
        return struct.pack("<dIB", body.episode_return, body.steps, 1 if body.success else 0)
    raise EncodeError(f"unsupported body type: {type(body).__name__}")


def encode_message(msg: Message) -> bytes:
    """Serialize a message into one wire frame. Deterministic."""
    if not 0 <= msg.seq <= SEQ_MAX:
        raise EncodeError(f"seq out of u32 range: {msg.seq}")
    if not 0 <= msg.send_ts <= TS_MAX:
        raise EncodeError(f"send_ts out of u64 range: {msg.send_ts}")
    payload = _encode_body(msg.body)
    if len(payload) > MAX_PAYLOAD:
        raise EncodeError(f"payload exceeds {MAX_PAYLOAD} bytes: {len(payload)}")
    header = _HEADER.pack(MAGIC, VERSION, int(msg.kind), msg.seq, msg.send_ts, len(payload))
    return header + payload


def _decode_body(kind: MessageKind, payload: bytes) -> Body:
    n = len(payload)
    if kind == MessageKind.RESET:
        if n != 8:
            raise LengthMismatchError(f"reset payload must be 8 bytes, got {n}")
        return Reset(struct.unpack("<Q", payload)[0])
    if kind == MessageKind.OBSERVATION:
        if n == GRID_PAYLOAD_LEN:
            return GridObs(payload)
        if n < 4:
            raise LengthMismatchError(f"observation payload too short: {n}")
        count = struct.unpack_from("<I", payload)[0]
        if n != 4 + 8 * count:
            raise LengthMismatchError(
                f"observation count {count} does not match payload length {n}"
            )
        return VectorObs(struct.unpack_from(f"<{count}d", payload, 4))
    if kind == MessageKind.ACTION:
        if n != 1:
            raise LengthMismatchError(f"action payload must be 1 byte, got {n}")
        return Action(payload[0])
    if kind == MessageKind.EPISODE_END:
        if n != 13:
            raise LengthMismatchError(f"episode-end payload must be 13 bytes, got {n}")
        ret, steps, flag = struct.unpack("<dIB", payload)
        return EpisodeEnd(ret, steps, flag != 0)
    raise UnknownKindError(f"unknown kind: {kind}")


def decode_message(data: bytes) -> tuple[Message, int]:
    """Decode one frame from the front of `data`.

    Returns the message and the number of bytes consumed, so callers can
    frame a byte stream by repeated calls.
    """
    if len(data) < HEADER_LEN:
        raise TruncatedFrameError(f"need {HEADER_LEN} header bytes, have {len(data)}")
    magic, version, kind_byte, seq, send_ts, payload_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersionError(f"unsupported version {version}")
    try:
        kind = MessageKind(kind_byte)
    except ValueError:
        raise UnknownKindError(f"unknown kind byte {kind_byte}") from None
    end = HEADER_LEN + payload_len
    if len(data) < end:
        raise TruncatedFrameError(f"frame needs {end} bytes, have {len(data)}")
    body = _decode_body(kind, bytes(data[HEADER_LEN:end]))
    return Message(seq=seq, send_ts=send_ts, body=body), end
