"""Wire format: hand-assembled byte vectors and the encode/decode bijection."""

import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hscloud.errors import WireFormatError
from hscloud.geometry import PointCloud
from hscloud.server.wire import (
    HEADER_SIZE,
    decode_wireframe,
    encode_wireframe,
)


def cloud_of(positions, rgb=None, class_rgb=None):
    n = len(positions)
    if rgb is None:
        rgb = np.zeros((n, 4), dtype=np.uint8)
        rgb[:, 3] = 255
    return PointCloud(positions=np.asarray(positions, dtype=np.float64),
                      rgb=np.asarray(rgb, dtype=np.uint8),
                      class_rgb=class_rgb)


class TestByteLayout:
    def test_empty_cloud_header_only(self):
        blob = encode_wireframe(cloud_of(np.empty((0, 3))), frame_index=9)
        assert len(blob) == HEADER_SIZE
        assert blob[:4] == b"SLPC"
        magic, version, frame, count, flags = struct.unpack("<4sHQII", blob)
        assert (version, frame, count, flags) == (1, 9, 0, 0)

    def test_hand_assembled_single_point_no_overlay(self):
        cloud = cloud_of([[1.0, 2.0, 3.0]], rgb=[[255, 0, 0, 255]])
        blob = encode_wireframe(cloud, frame_index=7)
        expected = (
            b"SLPC"
            + struct.pack("<H", 1)
            + struct.pack("<Q", 7)
            + struct.pack("<I", 1)
            + struct.pack("<I", 0)
            + struct.pack("<fff", 1.0, 2.0, 3.0)
            + bytes([255, 0, 0, 255])
        )
        assert blob == expected

    def test_hand_assembled_single_point_with_overlay(self):
        cloud = cloud_of([[1.0, 2.0, 3.0]], rgb=[[10, 20, 30, 255]],
                         class_rgb=np.array([[255, 0, 0, 255]], dtype=np.uint8))
        blob = encode_wireframe(cloud, frame_index=0)
        expected = (
            b"SLPC"
            + struct.pack("<H", 1)
            + struct.pack("<Q", 0)
            + struct.pack("<I", 1)
            + struct.pack("<I", 1)
            + struct.pack("<fff", 1.0, 2.0, 3.0)
            + bytes([10, 20, 30, 255])
            + bytes([255, 0, 0, 255])
        )
        assert blob == expected

    def test_payload_length_rule(self):
        rng = np.random.default_rng(0)
        plain = cloud_of(rng.normal(size=(11, 3)))
        assert len(encode_wireframe(plain, 0)) == HEADER_SIZE + 11 * 16
        overlay = cloud_of(rng.normal(size=(11, 3)),
                           class_rgb=rng.integers(0, 255, (11, 4)).astype(np.uint8))
        assert len(encode_wireframe(overlay, 0)) == HEADER_SIZE + 11 * 20


class TestDecode:
    def test_bijection_plain(self):
        rng = np.random.default_rng(1)
        cloud = cloud_of(rng.normal(size=(100, 3)),
                         rgb=rng.integers(0, 256, (100, 4)).astype(np.uint8))
        dec = decode_wireframe(encode_wireframe(cloud, 42))
        assert dec.frame_index == 42
        assert not dec.has_overlay
        assert np.array_equal(dec.positions,
                              cloud.positions.astype(np.float32))
        assert np.array_equal(dec.rgb, cloud.rgb)
        assert np.all(dec.class_rgb == 0)

    def test_bijection_overlay(self):
        rng = np.random.default_rng(2)
        cloud = cloud_of(rng.normal(size=(64, 3)),
                         rgb=rng.integers(0, 256, (64, 4)).astype(np.uint8),
                         class_rgb=rng.integers(0, 256, (64, 4)).astype(np.uint8))
        dec = decode_wireframe(encode_wireframe(cloud, 1))
        assert dec.has_overlay
        assert np.array_equal(dec.class_rgb, cloud.class_rgb)

    @given(st.integers(0, 10 ** 6), st.integers(0, 40), st.booleans())
    @settings(max_examples=50, deadline=None)
    def test_bijection_property(self, seed, n, overlay):
        rng = np.random.default_rng(seed)
        class_rgb = (rng.integers(0, 256, (n, 4)).astype(np.uint8)
                     if overlay else None)
        cloud = cloud_of(rng.normal(0, 10, size=(n, 3)),
                         rgb=rng.integers(0, 256, (n, 4)).astype(np.uint8),
                         class_rgb=class_rgb)
        blob = encode_wireframe(cloud, seed)
        dec = decode_wireframe(blob)
        assert dec.point_count == n
        assert np.array_equal(dec.positions, cloud.positions.astype(np.float32))
        assert np.array_equal(dec.rgb, cloud.rgb)
        # re-encode is byte-identical (bijection)
        cloud2 = cloud_of(dec.positions.astype(np.float64), rgb=dec.rgb,
                          class_rgb=dec.class_rgb if overlay else None)
        assert encode_wireframe(cloud2, seed) == blob

    def test_bad_magic(self):
        blob = bytearray(encode_wireframe(cloud_of(np.zeros((1, 3))), 0))
        blob[0] = ord(b"X")
        with pytest.raises(WireFormatError):
            decode_wireframe(bytes(blob))

    def test_bad_version(self):
        blob = bytearray(encode_wireframe(cloud_of(np.zeros((1, 3))), 0))
        blob[4] = 99
        with pytest.raises(WireFormatError):
            decode_wireframe(bytes(blob))

    def test_truncated_payload(self):
        blob = encode_wireframe(cloud_of(np.zeros((2, 3))), 0)
        with pytest.raises(WireFormatError):
            decode_wireframe(blob[:-1])

    def test_short_header(self):
        with pytest.raises(WireFormatError):
            decode_wireframe(b"SLPC\x01\x00")

    def test_length_mismatch_on_padded(self):
        blob = encode_wireframe(cloud_of(np.zeros((2, 3))), 0)
        with pytest.raises(WireFormatError):
            decode_wireframe(blob + b"\x00" * 3)
