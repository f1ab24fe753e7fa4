"""Binary point-cloud frame encoding for the streaming channel.

Layout (little-endian throughout):

    magic   4 bytes  "SLPC"
    version u16      (currently 1)
    frame   u64      frame index
    count   u32      point count
    flags   u32      bit 0 = per-point class overlay present
    payload count * 20 bytes (overlay) or count * 16 (no overlay):
        x, y, z  f32 meters
        r, g, b, a   u8
        cr, cg, cb, ca  u8 (only when flags bit 0 is set)

decode(encode(x)) reproduces positions bit-exactly at 32-bit and colors
exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import WireFormatError
from ..geometry import PointCloud

MAGIC = b"SLPC"
VERSION = 1
FLAG_CLASS_OVERLAY = 0x1

_HEADER = struct.Struct("<4sHQII")
HEADER_SIZE = _HEADER.size  # 22 bytes
POINT_SIZE_PLAIN = 16
POINT_SIZE_OVERLAY = 20


@dataclass
class DecodedFrame:
    frame_index: int
    flags: int
    positions: np.ndarray  # (N, 3) float32
    rgb: np.ndarray        # (N, 4) uint8
    class_rgb: np.ndarray  # (N, 4) uint8, zeros when overlay flag unset

    @property
    def point_count(self) -> int:
        return self.positions.shape[0]

    @property
    def has_overlay(self) -> bool:
        return bool(self.flags & FLAG_CLASS_OVERLAY)


def encode_wireframe(cloud: PointCloud, frame_index: int,
                     include_class: bool | None = None) -> bytes:
    """Serialize a cloud; by default the overlay travels when the cloud has one."""
    n = len(cloud)
    if include_class is None:
        include_class = cloud.class_rgb is not None
    if include_class and cloud.class_rgb is None:
        raise ValueError("cloud has no class colors to include")
    flags = FLAG_CLASS_OVERLAY if include_class else 0
    header = _HEADER.pack(MAGIC, VERSION, frame_index, n, flags)
    if n == 0:
        return header
    point_size = POINT_SIZE_OVERLAY if include_class else POINT_SIZE_PLAIN
    payload = np.zeros((n, point_size), dtype=np.uint8)
    payload[:, :12] = cloud.positions.astype("<f4").view(np.uint8).reshape(n, 12)
    if cloud.rgb is not None:
        payload[:, 12:16] = cloud.rgb
    else:
        payload[:, 15] = 255
    if include_class:
        payload[:, 16:20] = cloud.class_rgb
    return header + payload.tobytes()


def decode_wireframe(data: bytes) -> DecodedFrame:
    """Parse a streamed frame; raises WireFormatError on any framing defect."""
    if len(data) < HEADER_SIZE:
        raise WireFormatError(f"frame shorter than the {HEADER_SIZE}-byte header")
    magic, version, frame_index, count, flags = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise WireFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise WireFormatError(f"unsupported version {version}")
    overlay = bool(flags & FLAG_CLASS_OVERLAY)
    point_size = POINT_SIZE_OVERLAY if overlay else POINT_SIZE_PLAIN
    expected = HEADER_SIZE + count * point_size
    if len(data) != expected:
        raise WireFormatError(
            f"payload length {len(data) - HEADER_SIZE} != {count} x {point_size}"
        )
    payload = np.frombuffer(data, dtype=np.uint8,
                            offset=HEADER_SIZE).reshape(count, point_size)
    positions = payload[:, :12].copy().view("<f4").reshape(count, 3)
    rgb = payload[:, 12:16].copy()
    if overlay:
        class_rgb = payload[:, 16:20].copy()
    else:
        class_rgb = np.zeros((count, 4), dtype=np.uint8)
    return DecodedFrame(frame_index=frame_index, flags=flags,
                        positions=positions, rgb=rgb, class_rgb=class_rgb)
