"""Dataset directory generation and loading.

Layout:

    manifest.json                 spec echo, frame count, file map
    cameras.json                  named camera models
    correction.csv                32x32 spectral correction matrix
    model.json                    toy SVM trained on frame 0 (written by generate)
    refs/dark.raw(.json)          dark reference mosaic
    refs/white.raw(.json)         white reference mosaic
    frames/NNNN/mosaic.raw(.json) raw HS capture
    frames/NNNN/rgb_<cam>.png     RGB render per RGB-bearing camera
    frames/NNNN/depth_clean.png   ground-truth depth (16-bit, mm)
    frames/NNNN/depth_noisy.png   depth after injected noise
    frames/NNNN/labels.png        class index per HS-grid pixel (255 = none)

Regeneration with the same (spec, seed) is byte-identical.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import dataio
from ..classify import SvmTrainConfig, save_model, svm_train_toy
from ..classify.maps import UNLABELED, ClassSpec, DEFAULT_CLASSES
from ..depthproc import DepthFrame
from ..errors import DataError
from ..geometry import CameraModel
from ..hypercube import (
    CorrectionMatrix,
    CubePreprocessor,
    RawMosaicFrame,
    ReferencePair,
)
from .noise import apply_depth_noise, hs_noise_rng
from .render import (
    reference_frames,
    render_depth,
    render_labels,
    render_mosaic,
    render_rgb,
)
from .scene import SceneSpec, build_rig, spec_from_dict, spec_to_dict

logger = logging.getLogger(__name__)


def default_correction_matrix() -> CorrectionMatrix:
    """A mild band-coupling matrix (rows sum to 1) so the correction stage matters."""
    block = np.zeros((25, 25))
    for i in range(25):
        block[i, i] = 0.96
        left, right = max(0, i - 1), min(24, i + 1)
        spill = 0.04 / ((left != i) + (right != i))
        if left != i:
            block[i, left] += spill
        if right != i:
            block[i, right] += spill
    return CorrectionMatrix.from_active_block(block.T)


def generate_dataset(spec: SceneSpec, out_dir: str | Path, frames: int = 1,
                     train_model: bool = True) -> Path:
    """Render and write a complete dataset; returns the dataset directory."""
    spec.validate()
    out = Path(out_dir)
    (out / "refs").mkdir(parents=True, exist_ok=True)
    cams = build_rig(spec.grid)

    dataio.write_cameras_json(out / "cameras.json", cams)
    correction = default_correction_matrix()
    dataio.write_correction_csv(out / "correction.csv", correction)
    dark, white = reference_frames(spec)
    dataio.write_raw_mosaic(out / "refs" / "dark.raw", dark)
    dataio.write_raw_mosaic(out / "refs" / "white.raw", white)

    rgb_cams = ["rgb"] + [n for n in cams if n.startswith("grid_")]
    for index in range(frames):
        frame_dir = out / "frames" / f"{index:04d}"
        frame_dir.mkdir(parents=True, exist_ok=True)
        rng = hs_noise_rng(spec.seed, index) if spec.hs_noise_sigma_counts > 0 else None
        mosaic = render_mosaic(spec, cams["hs"], rng)
        dataio.write_raw_mosaic(frame_dir / "mosaic.raw", mosaic)
        for cam_name in rgb_cams:
            dataio.write_rgb_png(frame_dir / f"rgb_{cam_name}.png",
                                 render_rgb(spec, cams[cam_name]))
        clean = render_depth(spec, cams["depth"])
        noisy = apply_depth_noise(clean, spec.noise, index, spec.seed)
        dataio.write_depth_png(frame_dir / "depth_clean.png", clean)
        dataio.write_depth_png(frame_dir / "depth_noisy.png", noisy)
        dataio.write_gray_png(frame_dir / "labels.png",
                              render_labels(spec, cams["hs"]))
        logger.info("wrote frame %d/%d", index + 1, frames)

    manifest = {
        "format": "hscloud-dataset-v1",
        "frame_count": frames,
        "cameras": sorted(cams),
        "rgb_cameras": rgb_cams,
        "model": "model.json" if train_model else None,
        "spec": spec_to_dict(spec),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1))
    if train_model:
        train_dataset_model(out)
    return out


def class_specs_for(spec: SceneSpec) -> list[ClassSpec]:
    """ClassSpecs (name + palette color) for the scene's class indices."""
    by_index: dict[int, str] = {}
    for mat in spec.material_table():
        by_index.setdefault(mat.class_index, mat.name)
    specs = []
    for i, index in enumerate(sorted(by_index)):
        base = DEFAULT_CLASSES[i % len(DEFAULT_CLASSES)]
        specs.append(ClassSpec(by_index[index], base.color))
    return specs


def train_dataset_model(dataset_dir: str | Path, samples_per_class: int = 60,
                        seed: int = 0, frame: int = 0) -> Path:
    """Train the toy SVM on one frame's preprocessed pixels; writes model.json."""
    ds = load_dataset(dataset_dir)
    X, y = ds.training_pixels(frame)
    rng = np.random.default_rng(seed)
    keep = []
    for c in np.unique(y):
        idx = np.nonzero(y == c)[0]
        take = min(samples_per_class, idx.size)
        keep.append(rng.choice(idx, size=take, replace=False))
    keep = np.concatenate(keep)
    keep.sort()
    model = svm_train_toy(X[keep], y[keep], SvmTrainConfig(seed=seed),
                          class_specs=class_specs_for(ds.spec))
    path = Path(dataset_dir) / "model.json"
    save_model(model, path)
    return path


@dataclass
class FrameFiles:
    directory: Path

    def __post_init__(self):
        if not self.directory.is_dir():
            raise DataError(f"missing frame directory {self.directory}")


class SyntheticDataset:
    """Random access over a generated dataset directory."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "manifest.json"
        if not manifest_path.exists():
            raise DataError(f"{self.root} has no manifest.json")
        self.manifest = json.loads(manifest_path.read_text())
        if self.manifest.get("format") != "hscloud-dataset-v1":
            raise DataError("unrecognized dataset format")
        self.spec = spec_from_dict(self.manifest["spec"])
        self.cameras: dict[str, CameraModel] = dataio.read_cameras_json(
            self.root / "cameras.json")
        self.correction = dataio.read_correction_csv(self.root / "correction.csv")
        self.references = ReferencePair(
            dark=dataio.read_raw_mosaic(self.root / "refs" / "dark.raw"),
            white=dataio.read_raw_mosaic(self.root / "refs" / "white.raw"),
        )

    @property
    def frame_count(self) -> int:
        return int(self.manifest["frame_count"])

    @property
    def model_path(self) -> Path | None:
        name = self.manifest.get("model")
        if name and (self.root / name).exists():
            return self.root / name
        return None

    def _frame_dir(self, index: int) -> Path:
        if not 0 <= index < self.frame_count:
            raise DataError(f"frame {index} outside 0..{self.frame_count - 1}")
        return self.root / "frames" / f"{index:04d}"

    def mosaic(self, index: int) -> RawMosaicFrame:
        return dataio.read_raw_mosaic(self._frame_dir(index) / "mosaic.raw")

    def rgb(self, index: int, cam: str = "rgb") -> np.ndarray:
        return dataio.read_rgb_png(self._frame_dir(index) / f"rgb_{cam}.png")

    def depth_noisy(self, index: int) -> DepthFrame:
        return dataio.read_depth_png(self._frame_dir(index) / "depth_noisy.png")

    def depth_clean(self, index: int) -> DepthFrame:
        return dataio.read_depth_png(self._frame_dir(index) / "depth_clean.png")

    def labels(self, index: int) -> np.ndarray:
        return dataio.read_gray_png(self._frame_dir(index) / "labels.png")

    def preprocessor(self, precision: str = "float16") -> CubePreprocessor:
        return CubePreprocessor(references=self.references,
                                correction=self.correction,
                                precision=precision).fit()

    def training_pixels(self, index: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Preprocessed spectra and class labels for every labeled HS pixel."""
        cube = self.preprocessor().transform(self.mosaic(index))
        labels = self.labels(index)
        X = cube.values.reshape(cube.bands_active, -1).T.astype(np.float64)
        y = labels.ravel()
        mask = y != UNLABELED
        return X[mask], y[mask].astype(np.int64)


def load_dataset(root: str | Path) -> SyntheticDataset:
    return SyntheticDataset(root)
