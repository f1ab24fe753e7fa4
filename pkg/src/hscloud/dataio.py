"""On-disk formats: raw mosaics with sidecars, 16-bit depth PNGs, CSV, cameras JSON.

Raw binary images are 16-bit little-endian row-major with a JSON sidecar
describing geometry (``foo.raw`` + ``foo.json``).  Depth frames travel either
that way or as 16-bit grayscale PNG (millimeters).  The correction matrix is
a 32x32 CSV of decimal values.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError
from .geometry import CameraModel
from .hypercube import CorrectionMatrix, RawMosaicFrame

try:
    from .depthproc import DepthFrame
except ImportError:  # pragma: no cover
    DepthFrame = None


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def write_raw_mosaic(path: str | Path, frame: RawMosaicFrame) -> None:
    path = Path(path)
    path.write_bytes(frame.values.astype("<u2").tobytes())
    descriptor = {
        "width": frame.width,
        "height": frame.height,
        "pattern_size": frame.pattern_size,
        "band_map": frame.band_map.tolist(),
        "dtype": "uint16",
        "byte_order": "little",
    }
    _sidecar(path).write_text(json.dumps(descriptor, indent=1))


def read_raw_mosaic(path: str | Path) -> RawMosaicFrame:
    path = Path(path)
    side = _sidecar(path)
    if not path.exists() or not side.exists():
        raise DataError(f"missing raw mosaic or sidecar at {path}")
    desc = json.loads(side.read_text())
    data = np.frombuffer(path.read_bytes(), dtype="<u2")
    w, h = desc["width"], desc["height"]
    if data.size != w * h:
        raise DataError(f"{path}: payload is {data.size} samples, expected {w * h}")
    return RawMosaicFrame(
        values=data.reshape(h, w).copy(),
        pattern_size=desc["pattern_size"],
        band_map=np.array(desc["band_map"], dtype=np.int64),
    )


def write_depth_png(path: str | Path, depth) -> None:
    Image.fromarray(depth.values).save(Path(path), format="PNG")  # mode I;16


def read_depth_png(path: str | Path):
    from .depthproc import DepthFrame
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing depth frame {path}")
    arr = np.array(Image.open(path))
    if arr.dtype == np.int32:  # PIL reads I;16 as I on some paths
        arr = arr.astype(np.uint16)
    return DepthFrame(arr.astype(np.uint16))


def write_depth_raw(path: str | Path, depth) -> None:
    path = Path(path)
    path.write_bytes(depth.values.astype("<u2").tobytes())
    _sidecar(path).write_text(json.dumps({
        "width": depth.width, "height": depth.height,
        "dtype": "uint16", "byte_order": "little", "units": "mm",
    }, indent=1))


def read_depth_raw(path: str | Path):
    from .depthproc import DepthFrame
    path = Path(path)
    desc = json.loads(_sidecar(path).read_text())
    data = np.frombuffer(path.read_bytes(), dtype="<u2")
    return DepthFrame(data.reshape(desc["height"], desc["width"]).copy())


def write_rgb_png(path: str | Path, rgb: np.ndarray) -> None:
    Image.fromarray(rgb, mode="RGB").save(Path(path), format="PNG")


def read_rgb_png(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing image {path}")
    return np.array(Image.open(path).convert("RGB"))


def write_gray_png(path: str | Path, gray: np.ndarray) -> None:
    Image.fromarray(gray.astype(np.uint8), mode="L").save(Path(path), format="PNG")


def read_gray_png(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing image {path}")
    return np.array(Image.open(path).convert("L"))


def write_correction_csv(path: str | Path, matrix: CorrectionMatrix) -> None:
    lines = [",".join(repr(float(v)) for v in row) for row in matrix.values]
    Path(path).write_text("\n".join(lines) + "\n")


def read_correction_csv(path: str | Path,
                        bands_active: int = 25) -> CorrectionMatrix:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing correction matrix {path}")
    rows = [
        [float(v) for v in line.split(",")]
        for line in path.read_text().strip().splitlines()
    ]
    return CorrectionMatrix(np.array(rows, dtype=np.float64), bands_active)


def write_cameras_json(path: str | Path, cameras: dict[str, CameraModel]) -> None:
    doc = {
        name: {
            "K": [float(v) for v in cam.K.ravel()],
            "R": [float(v) for v in cam.R.ravel()],
            "t": [float(v) for v in cam.t],
            "resolution": list(cam.resolution),
            "depth_scale": cam.depth_scale,
        }
        for name, cam in cameras.items()
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def read_cameras_json(path: str | Path) -> dict[str, CameraModel]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing camera calibration {path}")
    doc = json.loads(path.read_text())
    return {
        name: CameraModel(
            K=np.array(spec["K"], dtype=np.float64).reshape(3, 3),
            R=np.array(spec["R"], dtype=np.float64).reshape(3, 3),
            t=np.array(spec["t"], dtype=np.float64),
            resolution=tuple(spec["resolution"]),
            depth_scale=float(spec["depth_scale"]),
        )
        for name, spec in doc.items()
    }
