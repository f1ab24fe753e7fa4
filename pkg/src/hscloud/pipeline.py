"""End-to-end per-frame orchestration, stage timing, and the frame handoff.

Per frame the HS chain (demosaic .. classify .. colorize) and the depth chain
(outlier filters, temporal, inpaint) run concurrently and join at
registration.  Replay is strictly ordered and lossless (a slow consumer
stalls the producer); live serving drops to latest-frame-wins.  Timing
follows the average-of-N-executions-per-stage methodology (default 200).
"""

from __future__ import annotations

import csv
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .classify import (
    SvmModel,
    colorize,
    kmeans_cluster,
    load_model,
    majority_vote,
    svm_predict,
)
from .depthproc import (
    DepthConfig,
    DepthFrame,
    InpaintConfig,
    fill_color_holes,
    inpaint,
    radius_outlier_filter,
    statistical_outlier_filter,
    temporal_filter,
)
from .errors import ConfigError, DataError
from .geometry import PointCloud, align_rgb_to_depth, register_frame
from .hypercube import (
    calibrate,
    demosaic,
    normalize_rms,
    spectral_correct,
    to_band_sequential,
)
from .ply import write_ply
from .synthscene.dataset import SyntheticDataset, load_dataset

logger = logging.getLogger(__name__)

TOGGLE_STAGES = ("statistical", "radius", "temporal", "inpaint", "overlay")


@dataclass
class KMeansConfig:
    k: int = 16
    max_iter: int = 8
    tol: float = 1e-6


@dataclass
class PipelineConfig:
    dataset: str | Path = ""
    model: str | Path | None = None  # default: <dataset>/model.json
    precision: str = "float16"
    toggles: dict = field(default_factory=lambda: {s: True for s in TOGGLE_STAGES})
    depth: DepthConfig = field(default_factory=DepthConfig)
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    seed: int = 0
    pace_ms: int = 0
    timing_executions: int = 200

    def __post_init__(self):
        for name in self.toggles:
            if name not in TOGGLE_STAGES:
                raise ConfigError(f"unknown stage toggle {name!r}")
        for name in TOGGLE_STAGES:
            self.toggles.setdefault(name, True)
        if self.precision not in ("float16", "float32"):
            raise ConfigError(f"precision must be float16|float32, got {self.precision}")

    def model_path(self) -> Path:
        return Path(self.model) if self.model else Path(self.dataset) / "model.json"

    def validate(self) -> "PipelineConfig":
        if not Path(self.dataset).is_dir():
            raise ConfigError(f"dataset directory {self.dataset} does not exist")
        if not self.model_path().exists():
            raise ConfigError(f"model file {self.model_path()} does not exist")
        return self

    @classmethod
    def from_json(cls, path: str | Path) -> "PipelineConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        depth_doc = doc.get("depth", {})
        inpaint_doc = depth_doc.pop("inpaint", {})
        try:
            return cls(
                dataset=doc.get("dataset", ""),
                model=doc.get("model"),
                precision=doc.get("precision", "float16"),
                toggles=doc.get("toggles", {}),
                depth=DepthConfig(**depth_doc, inpaint=InpaintConfig(**inpaint_doc)),
                kmeans=KMeansConfig(**doc.get("kmeans", {})),
                seed=int(doc.get("seed", 0)),
                pace_ms=int(doc.get("pace_ms", 0)),
                timing_executions=int(doc.get("timing_executions", 200)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc


@dataclass
class FrameResult:
    index: int
    cloud: PointCloud
    class_image: np.ndarray        # (H, W, 3) uint8 on the HS grid
    refined_depth: DepthFrame
    timings_ms: dict[str, float]


@dataclass
class StageTiming:
    stage: str
    mean_ms: float
    std_ms: float
    n: int


@dataclass
class StageTimingsReport:
    stages: list[StageTiming]
    samples: dict[str, list[float]]

    def end_to_end(self) -> StageTiming:
        for st in self.stages:
            if st.stage == "end_to_end":
                return st
        raise KeyError("no end_to_end row")

    def write_summary_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "mean_ms", "std_ms", "n"])
            for st in self.stages:
                writer.writerow([st.stage, repr(st.mean_ms), repr(st.std_ms), st.n])

    def write_samples_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "execution", "ms"])
            for stage, values in self.samples.items():
                for i, ms in enumerate(values):
                    writer.writerow([stage, i, repr(ms)])


class PipelineSession:
    """Loaded dataset + model + cached per-run state for frame processing."""

    def __init__(self, config: PipelineConfig):
        self.config = config.validate()
        self.dataset: SyntheticDataset = load_dataset(config.dataset)
        self.cameras = self.dataset.cameras
        self.model: SvmModel = load_model(config.model_path())
        self.preprocessor = self.dataset.preprocessor(precision=config.precision)
        self._prev_depth: DepthFrame | None = None

    def hs_chain(self, mosaic, timings: dict[str, float]) -> np.ndarray:
        """Mosaic -> colorized classification image (HS grid)."""
        cfg = self.config
        t = _StageClock(timings)
        cube = t.run("demosaic", demosaic, mosaic)
        cube = t.run("calibrate", calibrate, cube, self.dataset.references,
                     self.preprocessor.dtype_)
        cube = t.run("spectral_correct", spectral_correct, cube,
                     self.dataset.correction)
        cube = t.run("normalize", normalize_rms, cube)
        cube = t.run("to_bsq", to_band_sequential, cube)
        probs = t.run("svm_predict", svm_predict, cube, self.model)
        clusters = t.run("kmeans", kmeans_cluster, cube, cfg.kmeans.k,
                         cfg.seed, cfg.kmeans.max_iter, cfg.kmeans.tol)
        voted = t.run("majority_vote", majority_vote, probs, clusters)
        return t.run("colorize", colorize, voted, self.model.classes)

    def depth_chain(self, depth: DepthFrame, rgb: np.ndarray,
                    timings: dict[str, float]) -> DepthFrame:
        cfg = self.config
        toggles = cfg.toggles
        t = _StageClock(timings)
        out = depth
        if toggles["statistical"]:
            out = t.run("statistical_filter", statistical_outlier_filter,
                        out, self.cameras["depth"], cfg.depth)
        if toggles["radius"]:
            out = t.run("radius_filter", radius_outlier_filter,
                        out, self.cameras["depth"], cfg.depth)
        if toggles["temporal"]:
            prev = self._prev_depth
            current = out  # next frame averages against this capture, not the EMA
            out = t.run("temporal", temporal_filter, out, prev,
                        cfg.depth.temporal_threshold_mm)
            self._prev_depth = current
        if toggles["inpaint"]:
            def _align_and_fill():
                aligned, mask = align_rgb_to_depth(
                    rgb, self.cameras["rgb"], out, self.cameras["depth"])
                return fill_color_holes(aligned, mask)
            guide = t.run("align_rgb", _align_and_fill)
            out = t.run("inpaint", inpaint, out, guide, cfg.depth.inpaint)
        return out

    def process_frame(self, index: int) -> FrameResult:
        timings: dict[str, float] = {}
        start = time.perf_counter()
        mosaic = self.dataset.mosaic(index)
        depth = self.dataset.depth_noisy(index)
        rgb = self.dataset.rgb(index)
        with ThreadPoolExecutor(max_workers=2) as pool:
            hs_future = pool.submit(self.hs_chain, mosaic, timings)
            depth_future = pool.submit(self.depth_chain, depth, rgb, timings)
            class_image = hs_future.result()
            refined = depth_future.result()
        overlay = class_image if self.config.toggles["overlay"] else None
        clock = _StageClock(timings)
        cloud = clock.run("register", register_frame, refined, rgb, overlay,
                          self.cameras)
        timings["end_to_end"] = (time.perf_counter() - start) * 1000.0
        return FrameResult(index=index, cloud=cloud, class_image=class_image,
                           refined_depth=refined, timings_ms=timings)


class _StageClock:
    def __init__(self, sink: dict[str, float]):
        self.sink = sink

    def run(self, name: str, fn: Callable, *args):
        start = time.perf_counter()
        result = fn(*args)
        self.sink[name] = (time.perf_counter() - start) * 1000.0
        return result


def run(config: PipelineConfig) -> Iterator[FrameResult]:
    """Process every dataset frame in order; corrupt frames are skipped."""
    session = PipelineSession(config)
    for index in range(session.dataset.frame_count):
        if config.pace_ms > 0:
            time.sleep(config.pace_ms / 1000.0)
        try:
            yield session.process_frame(index)
        except DataError:
            logger.exception("frame %d unreadable, skipping", index)


def build_stage_callables(session: PipelineSession,
                          frame: int = 0) -> dict[str, Callable[[], object]]:
    """Named zero-argument stage thunks over one representative frame.

    Each thunk re-runs its stage on fixed inputs precomputed from the previous
    stage, which is what the per-stage timing methodology requires.
    """
    cfg = session.config
    mosaic = session.dataset.mosaic(frame)
    depth = session.dataset.depth_noisy(frame)
    rgb = session.dataset.rgb(frame)
    cams = session.cameras

    cube_bip = demosaic(mosaic)
    calibrated = calibrate(cube_bip, session.dataset.references,
                           session.preprocessor.dtype_)
    corrected = spectral_correct(calibrated, session.dataset.correction)
    normalized = normalize_rms(corrected)
    cube = to_band_sequential(normalized)
    probs = svm_predict(cube, session.model)
    clusters = kmeans_cluster(cube, cfg.kmeans.k, cfg.seed,
                              cfg.kmeans.max_iter, cfg.kmeans.tol)
    voted = majority_vote(probs, clusters)
    class_image = colorize(voted, session.model.classes)

    filtered = statistical_outlier_filter(depth, cams["depth"], cfg.depth)
    filtered = radius_outlier_filter(filtered, cams["depth"], cfg.depth)
    aligned, mask = align_rgb_to_depth(rgb, cams["rgb"], filtered, cams["depth"])
    guide = fill_color_holes(aligned, mask)
    refined = inpaint(filtered, guide, cfg.depth.inpaint)

    return {
        "demosaic": lambda: demosaic(mosaic),
        "calibrate": lambda: calibrate(cube_bip, session.dataset.references,
                                       session.preprocessor.dtype_),
        "spectral_correct": lambda: spectral_correct(calibrated,
                                                     session.dataset.correction),
        "normalize": lambda: normalize_rms(corrected),
        "to_bsq": lambda: to_band_sequential(normalized),
        "svm_predict": lambda: svm_predict(cube, session.model),
        "kmeans": lambda: kmeans_cluster(cube, cfg.kmeans.k, cfg.seed,
                                         cfg.kmeans.max_iter, cfg.kmeans.tol),
        "majority_vote": lambda: majority_vote(probs, clusters),
        "colorize": lambda: colorize(voted, session.model.classes),
        "statistical_filter": lambda: statistical_outlier_filter(
            depth, cams["depth"], cfg.depth),
        "radius_filter": lambda: radius_outlier_filter(
            filtered, cams["depth"], cfg.depth),
        "temporal": lambda: temporal_filter(filtered, depth,
                                            cfg.depth.temporal_threshold_mm),
        "align_rgb": lambda: align_rgb_to_depth(rgb, cams["rgb"], filtered,
                                                cams["depth"]),
        "inpaint": lambda: inpaint(filtered, guide, cfg.depth.inpaint),
        "register": lambda: register_frame(refined, rgb, class_image, cams),
    }


def time_callables(stages: dict[str, Callable[[], object]], executions: int,
                   warmup: int = 1) -> StageTimingsReport:
    """Average-of-N timing for each named callable (plus raw samples)."""
    samples: dict[str, list[float]] = {}
    rows: list[StageTiming] = []
    for name, fn in stages.items():
        for _ in range(warmup):
            fn()
        times = []
        for _ in range(executions):
            start = time.perf_counter()
            fn()
            times.append((time.perf_counter() - start) * 1000.0)
        samples[name] = times
        arr = np.asarray(times)
        rows.append(StageTiming(name, float(arr.mean()), float(arr.std()),
                                executions))
    return StageTimingsReport(stages=rows, samples=samples)


def measure_stages(config: PipelineConfig, executions: int | None = None,
                   e2e_executions: int = 10, frame: int = 0) -> StageTimingsReport:
    """Per-stage timing on a representative frame + an end-to-end row.

    The end-to-end row uses its own (smaller) execution count; the invariant
    end_to_end >= max(single stage) still holds since it runs the full chain.
    """
    executions = executions or config.timing_executions
    session = PipelineSession(config)
    stages = build_stage_callables(session, frame)
    report = time_callables(stages, executions)

    e2e_times = []
    for _ in range(e2e_executions):
        session_run = PipelineSession(config)
        start = time.perf_counter()
        session_run.process_frame(frame)
        e2e_times.append((time.perf_counter() - start) * 1000.0)
    arr = np.asarray(e2e_times)
    report.stages.append(StageTiming("end_to_end", float(arr.mean()),
                                     float(arr.std()), e2e_executions))
    report.samples["end_to_end"] = e2e_times
    return report


def export_ply(result: FrameResult, path: str | Path,
               overlay: bool = False) -> None:
    """Write one frame's registered cloud as binary little-endian PLY."""
    if len(result.cloud) == 0:
        raise ValueError("cannot export an empty point cloud")
    write_ply(result.cloud, path, binary=True, overlay=overlay)


class FrameExchange:
    """Two-slot producer/consumer handoff.

    replay mode: put() blocks while the pending slot is full, so a slow
    consumer stalls the producer and no frame is ever dropped.  live mode:
    put() replaces the pending frame (latest wins).  Either way the consumer
    only ever sees whole frames, and the producer never touches a frame the
    consumer has taken.
    """

    def __init__(self, mode: str = "replay"):
        if mode not in ("replay", "live"):
            raise ValueError(f"unknown exchange mode {mode!r}")
        self.mode = mode
        self._cond = threading.Condition()
        self._slot = None
        self._has_frame = False
        self._closed = False

    def put(self, frame) -> bool:
        with self._cond:
            if self.mode == "replay":
                while self._has_frame and not self._closed:
                    self._cond.wait()
            if self._closed:
                return False
            self._slot = frame
            self._has_frame = True
            self._cond.notify_all()
            return True

    def get(self, timeout: float | None = None):
        with self._cond:
            if not self._cond.wait_for(lambda: self._has_frame or self._closed,
                                       timeout):
                raise TimeoutError("no frame within timeout")
            if not self._has_frame:
                return None  # closed and drained
            frame = self._slot
            self._slot = None
            self._has_frame = False
            self._cond.notify_all()
            return frame

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()


def replace_toggles(config: PipelineConfig, **flags: bool) -> PipelineConfig:
    toggles = dict(config.toggles)
    toggles.update(flags)
    return replace(config, toggles=toggles)
