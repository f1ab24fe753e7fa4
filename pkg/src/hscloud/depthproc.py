"""Depth-frame refinement: outlier removal, temporal smoothing, guided inpainting.

Depth frames are uint16 millimeters with 0 marking a missing sample (the
sensor's failure mode).  The outlier filters evaluate each pixel against the
3D back-projection of its square window; both read the input frame only
(non-cascading within a pass), so output order is well defined and a naive
reference can check them exactly.  The pixel loops are numba-compiled; the
math is plain IEEE float64.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_odd_window, check_positive, check_same_grid
from .geometry import CameraModel

logger = logging.getLogger(__name__)

OPERATING_RANGE_MM = (250, 1000)


@dataclass
class DepthFrame:
    """16-bit depth image in millimeters; value 0 = missing sample."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.dtype != np.uint16:
            raise TypeError("depth values must be uint16 millimeters")
        if self.values.ndim != 2:
            raise ValueError("depth values must be 2-D")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def valid_mask(self) -> np.ndarray:
        return self.values > 0

    def check_operating_range(self) -> int:
        """Soft range check: log + return the count of valid samples out of range."""
        lo, hi = OPERATING_RANGE_MM
        valid = self.values[self.values > 0]
        n_out = int(np.count_nonzero((valid < lo) | (valid > hi)))
        if n_out:
            logger.warning("%d valid depth samples outside [%d, %d] mm", n_out, lo, hi)
        return n_out


@dataclass
class InpaintConfig:
    sigma_spatial_px: float = 2.0
    sigma_range_color: float = 12.0
    max_passes: int = 32

    def __post_init__(self):
        check_positive(self.sigma_spatial_px, "sigma_spatial_px")
        check_positive(self.sigma_range_color, "sigma_range_color")
        if self.max_passes < 1:
            raise ValueError("max_passes must be >= 1")


@dataclass
class DepthConfig:
    """Tunables for the depth chain; window is shared by both outlier filters."""

    window: int = 7
    n_std: float = 2.0
    radius_m: float = 0.05
    temporal_threshold_mm: int = 50
    inpaint: InpaintConfig = field(default_factory=InpaintConfig)

    def __post_init__(self):
        self.window = check_odd_window(self.window)
        check_positive(self.n_std, "n_std")
        check_positive(self.radius_m, "radius_m")
        check_positive(self.temporal_threshold_mm, "temporal_threshold_mm")


def _camera_points(depth: DepthFrame, cam: CameraModel) -> np.ndarray:
    """Back-project every pixel to camera-frame 3D (garbage where missing)."""
    h, w = depth.values.shape
    z = depth.values.astype(np.float64) * cam.depth_scale
    u = np.arange(w, dtype=np.float64)[None, :]
    v = np.arange(h, dtype=np.float64)[:, None]
    pts = np.empty((h, w, 3), dtype=np.float64)
    pts[:, :, 0] = (u - cam.cx) / cam.fx * z
    pts[:, :, 1] = (v - cam.cy) / cam.fy * z
    pts[:, :, 2] = z
    return pts


@njit(cache=True, parallel=True)
def _statistical_outlier_mask(points, valid, radius, n_std):  # pragma: no cover
    h, w = valid.shape
    remove = np.zeros((h, w), dtype=np.bool_)
    side = 2 * radius + 1
    for y in prange(radius, h - radius):
        dist_buf = np.empty(side * side)
        for x in range(radius, w - radius):
            if not valid[y, x]:
                continue
            sx = 0.0
            sy = 0.0
            sz = 0.0
            n = 0
            for dy in range(-radius, radius + 1):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-radius, radius + 1):
                    xx = x + dx
                    if xx < 0 or xx >= w or not valid[yy, xx]:
                        continue
                    sx += points[yy, xx, 0]
                    sy += points[yy, xx, 1]
                    sz += points[yy, xx, 2]
                    n += 1
            cx = sx / n
            cy = sy / n
            cz = sz / n
            # distances of every neighbor to the neighborhood centroid
            sd = 0.0
            k = 0
            d_center = 0.0
            for dy in range(-radius, radius + 1):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-radius, radius + 1):
                    xx = x + dx
                    if xx < 0 or xx >= w or not valid[yy, xx]:
                        continue
                    ddx = points[yy, xx, 0] - cx
                    ddy = points[yy, xx, 1] - cy
                    ddz = points[yy, xx, 2] - cz
                    d = np.sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
                    dist_buf[k] = d
                    k += 1
                    sd += d
                    if dy == 0 and dx == 0:
                        d_center = d
            mu = sd / n
            sv = 0.0
            for i in range(k):
                sv += (dist_buf[i] - mu) * (dist_buf[i] - mu)
            sigma = np.sqrt(sv / n)
            if d_center > mu + n_std * sigma:
                remove[y, x] = True
    return remove


@njit(cache=True)
def _radius_outlier_mask(points, valid, radius, radius_m):  # pragma: no cover
    h, w = valid.shape
    remove = np.zeros((h, w), dtype=np.bool_)
    r2 = radius_m * radius_m
    for y in range(h):
        for x in range(w):
            if not valid[y, x]:
                continue
            px = points[y, x, 0]
            py = points[y, x, 1]
            pz = points[y, x, 2]
            has_neighbor = False
            for dy in range(-radius, radius + 1):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-radius, radius + 1):
                    if dy == 0 and dx == 0:
                        continue
                    xx = x + dx
                    if xx < 0 or xx >= w or not valid[yy, xx]:
                        continue
                    ddx = points[yy, xx, 0] - px
                    ddy = points[yy, xx, 1] - py
                    ddz = points[yy, xx, 2] - pz
                    if ddx * ddx + ddy * ddy + ddz * ddz <= r2:
                        has_neighbor = True
                        break
                if has_neighbor:
                    break
            if not has_neighbor:
                remove[y, x] = True
    return remove


@njit(cache=True, parallel=True)
def _inpaint_pass(depth, valid, rgb, radius, sigma_s, sigma_r,
                  min_weight):  # pragma: no cover
    """One Jacobi fill pass; returns (new depth, new valid, fill count).

    A missing pixel fills only when its bilateral weight mass exceeds
    ``min_weight``; with min_weight 0 any valid neighbor suffices (spatial
    fallback when every range weight underflows).
    """
    h, w = valid.shape
    out = depth.copy()
    out_valid = valid.copy()
    inv_2ss = 1.0 / (2.0 * sigma_s * sigma_s)
    inv_2sr = 1.0 / (2.0 * sigma_r * sigma_r)
    filled = 0
    for y in prange(h):
        for x in range(w):
            if valid[y, x]:
                continue
            acc = 0.0
            wsum = 0.0
            acc_sp = 0.0
            wsum_sp = 0.0
            for dy in range(-radius, radius + 1):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-radius, radius + 1):
                    xx = x + dx
                    if xx < 0 or xx >= w or not valid[yy, xx]:
                        continue
                    w_s = np.exp(-(dx * dx + dy * dy) * inv_2ss)
                    dr = rgb[y, x, 0] - rgb[yy, xx, 0]
                    dg = rgb[y, x, 1] - rgb[yy, xx, 1]
                    db = rgb[y, x, 2] - rgb[yy, xx, 2]
                    w_r = np.exp(-(dr * dr + dg * dg + db * db) * inv_2sr)
                    acc += w_s * w_r * depth[yy, xx]
                    wsum += w_s * w_r
                    acc_sp += w_s * depth[yy, xx]
                    wsum_sp += w_s
            if wsum > min_weight and wsum > 0.0:
                out[y, x] = acc / wsum
                out_valid[y, x] = True
                filled += 1
            elif min_weight <= 0.0 and wsum_sp > 0.0:
                # range weights underflowed (e.g. invalid guide); spatial only
                out[y, x] = acc_sp / wsum_sp
                out_valid[y, x] = True
                filled += 1
    return out, out_valid, filled


def statistical_outlier_filter(depth: DepthFrame, cam: CameraModel,
                               cfg: DepthConfig) -> DepthFrame:
    """Drop pixels far from their windowed 3D neighborhood centroid.

    A valid pixel is removed when its distance to the centroid of the valid
    window neighborhood (center included) exceeds mean + n_std * std of the
    neighborhood's centroid distances.  Pixels whose window extends past the
    frame border pass through unfiltered (a clipped window would bias the
    centroid against them).  Decisions read the input frame only.
    """
    points = _camera_points(depth, cam)
    remove = _statistical_outlier_mask(points, depth.valid_mask,
                                       cfg.window // 2, float(cfg.n_std))
    out = depth.values.copy()
    out[remove] = 0
    return DepthFrame(out)


def radius_outlier_filter(depth: DepthFrame, cam: CameraModel,
                          cfg: DepthConfig) -> DepthFrame:
    """Drop pixels with no other valid window neighbor within radius_m meters."""
    points = _camera_points(depth, cam)
    remove = _radius_outlier_mask(points, depth.valid_mask,
                                  cfg.window // 2, float(cfg.radius_m))
    out = depth.values.copy()
    out[remove] = 0
    return DepthFrame(out)


def temporal_filter(current: DepthFrame, previous: DepthFrame | None,
                    threshold_mm: int = 50) -> DepthFrame:
    """Average with the previous frame where both are valid and close.

    out = round((cur + prev) / 2) (half up) where |cur - prev| < threshold_mm
    and both samples are valid; otherwise the current sample passes through.
    With no previous frame this is the identity.
    """
    if previous is None:
        return DepthFrame(current.values.copy())
    check_same_grid(current.values.shape, previous.values.shape, "depth frames")
    cur = current.values.astype(np.int32)
    prev = previous.values.astype(np.int32)
    close = (cur > 0) & (prev > 0) & (np.abs(cur - prev) < int(threshold_mm))
    averaged = (cur + prev + 1) // 2
    out = np.where(close, averaged, cur).astype(np.uint16)
    return DepthFrame(out)


# bilateral mass below this defers a fill to a later pass: a same-color
# neighbor at the window edge still clears it easily, a neighbor across a
# strong color edge (range weight ~e^-100) does not
_MIN_FILL_WEIGHT = 1e-12


def inpaint(depth: DepthFrame, rgb_aligned: np.ndarray,
            cfg: InpaintConfig | None = None) -> DepthFrame:
    """Fill missing depth by iterative joint-bilateral propagation.

    Each pass fills every missing pixel whose valid window neighbors carry
    non-negligible bilateral weight (spatial Gaussian x Gaussian on the RGB
    guide difference) with the weight-normalized neighbor depth.  Pixels
    whose only neighbors sit across a strong color edge are deferred so the
    same-color fill frontier can reach them first; once the strict passes
    converge, remaining reachable pixels are filled with whatever weights
    exist (spatial-only if the range weights underflow completely).  Newly
    filled pixels join the valid set for the next pass.  Originally valid
    pixels are never modified; the pass budget is ``max_passes`` in total.
    """
    cfg = cfg or InpaintConfig()
    check_same_grid(depth.values.shape, rgb_aligned.shape[:2],
                    "depth and aligned RGB")
    valid = depth.valid_mask
    if not valid.any():
        logger.warning("inpaint: frame has no valid depth, returning unchanged")
        return DepthFrame(depth.values.copy())
    if valid.all():
        return DepthFrame(depth.values.copy())
    radius = max(1, int(np.ceil(2.0 * cfg.sigma_spatial_px)))
    d = depth.values.astype(np.float64)
    rgb = rgb_aligned.astype(np.float64)
    min_weight = _MIN_FILL_WEIGHT
    for _ in range(cfg.max_passes):
        d, valid, filled = _inpaint_pass(d, valid, rgb, radius,
                                         float(cfg.sigma_spatial_px),
                                         float(cfg.sigma_range_color),
                                         min_weight)
        if filled == 0:
            if min_weight == 0.0 or valid.all():
                break
            min_weight = 0.0  # strict passes converged; relax for leftovers
    out = np.clip(np.floor(d + 0.5), 0, 65535).astype(np.uint16)
    # a fill must not round down into the missing sentinel
    out[valid & (out == 0)] = 1
    out[~valid] = 0
    out[depth.valid_mask] = depth.values[depth.valid_mask]
    return DepthFrame(out)


@njit(cache=True, parallel=True)
def _color_fill_pass(rgb, valid):  # pragma: no cover
    h, w = valid.shape
    out = rgb.copy()
    out_valid = valid.copy()
    filled = 0
    for y in prange(h):
        for x in range(w):
            if valid[y, x]:
                continue
            sr = 0.0
            sg = 0.0
            sb = 0.0
            n = 0
            for dy in range(-1, 2):
                yy = y + dy
                if yy < 0 or yy >= h:
                    continue
                for dx in range(-1, 2):
                    xx = x + dx
                    if xx < 0 or xx >= w or not valid[yy, xx]:
                        continue
                    sr += rgb[yy, xx, 0]
                    sg += rgb[yy, xx, 1]
                    sb += rgb[yy, xx, 2]
                    n += 1
            if n > 0:
                out[y, x, 0] = sr / n
                out[y, x, 1] = sg / n
                out[y, x, 2] = sb / n
                out_valid[y, x] = True
                filled += 1
    return out, out_valid, filled


def fill_color_holes(rgb: np.ndarray, valid: np.ndarray,
                     max_passes: int = 256) -> np.ndarray:
    """Grow colors into invalid guide pixels by neighbor averaging (plumbing).

    Used before inpainting when the aligned RGB guide has holes exactly where
    the depth does (alignment cannot color pixels without depth).
    """
    out = rgb.astype(np.float64).copy()
    filled = valid.copy()
    if not filled.any():
        return rgb.copy()
    for _ in range(max_passes):
        out, filled, n = _color_fill_pass(out, filled)
        if n == 0:
            break
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


class OutlierFilter(BaseEstimator, TransformerMixin):
    """Estimator wrapper over the two outlier filters (kind: statistical | radius)."""

    def __init__(self, camera=None, config=None, kind="statistical"):
        self.camera = camera
        self.config = config
        self.kind = kind

    def fit(self, X=None, y=None):
        if self.camera is None:
            raise ValueError("OutlierFilter needs a CameraModel")
        if self.kind not in ("statistical", "radius"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        self.config_ = self.config or DepthConfig()
        return self

    def transform(self, X: DepthFrame) -> DepthFrame:
        if not hasattr(self, "config_"):
            self.fit()
        fn = (statistical_outlier_filter if self.kind == "statistical"
              else radius_outlier_filter)
        return fn(X, self.camera, self.config_)
