"""PLY point-cloud export/import: x y z float32 + red green blue alpha uchar."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DataError
from .geometry import PointCloud

_PROPERTIES = ["x", "y", "z", "red", "green", "blue", "alpha"]


def _point_colors(cloud: PointCloud, overlay: bool) -> np.ndarray:
    n = len(cloud)
    rgba = np.zeros((n, 4), dtype=np.uint8)
    rgba[:, 3] = 255
    if cloud.rgb is not None:
        rgba = cloud.rgb.copy()
    if overlay and cloud.class_rgb is not None:
        has_class = cloud.class_rgb[:, 3] > 0
        rgba[has_class] = cloud.class_rgb[has_class]
    return rgba


def write_ply(cloud: PointCloud, path: str | Path, binary: bool = True,
              overlay: bool = False) -> None:
    """Write the cloud; overlay substitutes class colors where present."""
    path = Path(path)
    n = len(cloud)
    fmt = "binary_little_endian" if binary else "ascii"
    header = [
        "ply",
        f"format {fmt} 1.0",
        f"element vertex {n}",
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "property uchar alpha",
        "end_header",
    ]
    positions = cloud.positions.astype("<f4")
    colors = _point_colors(cloud, overlay)
    if binary:
        record = np.zeros(n, dtype=[("xyz", "<f4", 3), ("rgba", "u1", 4)])
        record["xyz"] = positions
        record["rgba"] = colors
        with open(path, "wb") as fh:
            fh.write(("\n".join(header) + "\n").encode("ascii"))
            fh.write(record.tobytes())
    else:
        lines = header[:]
        for i in range(n):
            x, y, z = positions[i]
            r, g, b, a = colors[i]
            lines.append(f"{x:.9g} {y:.9g} {z:.9g} {r} {g} {b} {a}")
        path.write_text("\n".join(lines) + "\n")


def read_ply(path: str | Path) -> PointCloud:
    """Read a PLY written by :func:`write_ply` (both formats)."""
    path = Path(path)
    blob = path.read_bytes()
    end = blob.find(b"end_header\n")
    if end < 0:
        raise DataError(f"{path}: not a PLY file")
    header_lines = blob[:end].decode("ascii").splitlines()
    if not header_lines or header_lines[0] != "ply":
        raise DataError(f"{path}: not a PLY file")
    fmt = None
    n = None
    props = []
    for line in header_lines[1:]:
        parts = line.split()
        if parts[0] == "format":
            fmt = parts[1]
        elif parts[:2] == ["element", "vertex"]:
            n = int(parts[2])
        elif parts[0] == "property":
            props.append(parts[2])
    if props != _PROPERTIES:
        raise DataError(f"{path}: unsupported property layout {props}")
    if n is None or fmt not in ("binary_little_endian", "ascii"):
        raise DataError(f"{path}: malformed header")
    body = blob[end + len(b"end_header\n"):]
    if fmt == "binary_little_endian":
        record = np.frombuffer(body, dtype=[("xyz", "<f4", 3), ("rgba", "u1", 4)],
                               count=n)
        positions = record["xyz"].astype(np.float64)
        colors = record["rgba"].copy()
    else:
        rows = body.decode("ascii").split()
        values = np.array(rows, dtype=np.float64).reshape(n, 7)
        positions = values[:, :3]
        colors = values[:, 3:].astype(np.uint8)
    return PointCloud(positions=positions, rgb=colors)
