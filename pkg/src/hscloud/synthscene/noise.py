"""Injectable LiDAR-style depth noise, reproducible per frame in isolation.

All randomness flows from one seed through counter-based Philox streams keyed
by (seed, stream, frame_index), so regenerating any single frame gives the
same bytes without replaying its predecessors.

Stages apply in a fixed order: per-pixel Gaussian noise, per-frame jitter
offset (the slow temporal "wave"), flying points (pulled toward the camera),
the sweeping interference line, and finally dropout.
"""

from __future__ import annotations

import numpy as np

from ..depthproc import DepthFrame
from .scene import NoiseSpec

_STREAM_HS = 1
_STREAM_GAUSS = 2
_STREAM_JITTER = 3
_STREAM_FLYING = 4
_STREAM_DROPOUT = 5


def frame_rng(seed: int, frame_index: int, stream: int) -> np.random.Generator:
    """Counter-based generator for one (frame, purpose) pair."""
    return np.random.Generator(
        np.random.Philox(counter=[0, 0, stream, frame_index], key=[seed, 0])
    )


def hs_noise_rng(seed: int, frame_index: int) -> np.random.Generator:
    return frame_rng(seed, frame_index, _STREAM_HS)


def apply_depth_noise(clean: DepthFrame, noise: NoiseSpec, frame_index: int,
                      seed: int) -> DepthFrame:
    """Corrupt a clean depth frame per the noise spec (deterministic)."""
    values = clean.values.astype(np.int64)
    valid = values > 0
    h, w = values.shape

    if noise.depth_gaussian_sigma_mm > 0:
        rng = frame_rng(seed, frame_index, _STREAM_GAUSS)
        delta = rng.normal(0.0, noise.depth_gaussian_sigma_mm, values.shape)
        noisy = np.floor(values + delta + 0.5).astype(np.int64)
        values = np.where(valid, np.clip(noisy, 1, 65535), values)

    if noise.temporal_jitter_sigma_mm > 0:
        rng = frame_rng(seed, frame_index, _STREAM_JITTER)
        offset = int(np.floor(rng.normal(0.0, noise.temporal_jitter_sigma_mm) + 0.5))
        values = np.where(valid, np.clip(values + offset, 1, 65535), values)

    if noise.flying_point_rate > 0:
        rng = frame_rng(seed, frame_index, _STREAM_FLYING)
        flying = (rng.random(values.shape) < noise.flying_point_rate) & valid
        values = np.where(flying,
                          np.maximum(values - noise.flying_offset_mm, 1),
                          values)

    if noise.interference_period_frames > 0:
        period = noise.interference_period_frames
        row0 = int(np.floor(h * (frame_index % period) / period))
        values[row0: row0 + noise.interference_thickness_px, :] = 0

    if noise.dropout_rate > 0:
        rng = frame_rng(seed, frame_index, _STREAM_DROPOUT)
        drop = rng.random(values.shape) < noise.dropout_rate
        values = np.where(drop, 0, values)

    return DepthFrame(values.astype(np.uint16))
