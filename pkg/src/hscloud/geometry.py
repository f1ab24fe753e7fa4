"""Pinhole camera math: back-projection, projection, view alignment, registration.

Conventions: world-to-camera is p_cam = R @ P_w + t, projection is
s * (u, v, 1) = K @ p_cam with s the camera-frame depth.  Back-projection is
the standard inverse P_w = R^T (z * K^-1 (u, v, 1) - t).  Pixel (u, v) means
column u, row v, with integer coordinates at pixel centers.  The world frame
is by convention anchored at the depth camera (R = I, t = 0) but nothing here
depends on that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import CameraError

_EDGE_EPS = 1e-6  # tolerate round-trip float error at image borders

if TYPE_CHECKING:
    from .depthproc import DepthFrame


@dataclass(frozen=True)
class CameraModel:
    """Intrinsics K (zero skew), extrinsics (R, t) in meters, and resolution."""

    K: np.ndarray
    R: np.ndarray
    t: np.ndarray
    resolution: tuple[int, int]  # (width, height)
    depth_scale: float = 0.001   # meters per stored depth unit

    def __post_init__(self):
        K = np.asarray(self.K, dtype=np.float64).reshape(3, 3)
        R = np.asarray(self.R, dtype=np.float64).reshape(3, 3)
        t = np.asarray(self.t, dtype=np.float64).reshape(3)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "resolution",
                           (int(self.resolution[0]), int(self.resolution[1])))
        if K[0, 0] <= 0 or K[1, 1] <= 0:
            raise CameraError("focal lengths must be positive")
        if abs(np.linalg.det(K)) < 1e-12:
            raise CameraError("intrinsic matrix is singular")
        w, h = self.resolution
        if not (0 <= K[0, 2] < w and 0 <= K[1, 2] < h):
            raise CameraError("principal point must lie inside the image")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-6):
            raise CameraError("R must be orthonormal")
        if abs(np.linalg.det(R) - 1.0) > 1e-6:
            raise CameraError("R must be a proper rotation (det = +1)")

    @property
    def fx(self) -> float:
        return float(self.K[0, 0])

    @property
    def fy(self) -> float:
        return float(self.K[1, 1])

    @property
    def cx(self) -> float:
        return float(self.K[0, 2])

    @property
    def cy(self) -> float:
        return float(self.K[1, 2])

    @property
    def center(self) -> np.ndarray:
        """Camera center in world coordinates."""
        return -self.R.T @ self.t

    def world_to_camera(self, points: np.ndarray) -> np.ndarray:
        return points @ self.R.T + self.t

    def camera_to_world(self, points: np.ndarray) -> np.ndarray:
        return (points - self.t) @ self.R


@dataclass
class PointCloud:
    """Registered 3D points with color, optional class overlay, and source pixels.

    ``class_rgb`` alpha 0 marks a point with no classification color.
    """

    positions: np.ndarray                 # (N, 3) float64, world frame
    rgb: np.ndarray | None = None         # (N, 4) uint8
    class_rgb: np.ndarray | None = None   # (N, 4) uint8, alpha 0 = absent
    source_pixel: np.ndarray | None = None  # (N, 2) int32, (u, v)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("point positions must be finite")

    def __len__(self) -> int:
        return self.positions.shape[0]


@dataclass
class ProjectionResult:
    """Per-point image coordinates plus the z-buffered index image.

    ``index_image[v, u]`` holds the index of the nearest in-view point whose
    rounded pixel is (u, v), or -1.
    """

    u: np.ndarray
    v: np.ndarray
    depth: np.ndarray
    in_view: np.ndarray
    index_image: np.ndarray | None

    def pixel_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Rounded (u, v) pixel bins, valid only where in_view."""
        return (np.rint(self.u).astype(np.int64), np.rint(self.v).astype(np.int64))


def backproject(depth: "DepthFrame", cam: CameraModel) -> PointCloud:
    """Lift every valid depth pixel to a world-frame 3D point.

    The ray through pixel (u, v) is scaled so its camera-frame z equals the
    stored depth (in meters); missing (zero) pixels produce no point.
    """
    values = depth.values
    if (values.shape[1], values.shape[0]) != cam.resolution:
        raise CameraError(
            f"depth {values.shape[1]}x{values.shape[0]} does not match camera "
            f"resolution {cam.resolution}"
        )
    v_idx, u_idx = np.nonzero(values)
    z = values[v_idx, u_idx].astype(np.float64) * cam.depth_scale
    x = (u_idx - cam.cx) / cam.fx * z
    y = (v_idx - cam.cy) / cam.fy * z
    p_cam = np.stack([x, y, z], axis=1)
    positions = cam.camera_to_world(p_cam)
    source = np.stack([u_idx, v_idx], axis=1).astype(np.int32)
    return PointCloud(positions=positions, source_pixel=source)


def project(cloud: PointCloud, cam: CameraModel,
            build_index: bool = True) -> ProjectionResult:
    """Project points into a camera, flagging cheirality/bounds and z-buffering.

    A point is in view when its camera-frame depth s > 0 and its rounded pixel
    lies inside the resolution.  The index image keeps, per target pixel, the
    point with minimal s (ties to the lowest point index); pass
    ``build_index=False`` to skip it when only per-point coordinates matter.
    """
    w, h = cam.resolution
    n = len(cloud)
    if n == 0:
        return ProjectionResult(
            u=np.empty(0), v=np.empty(0), depth=np.empty(0),
            in_view=np.empty(0, dtype=bool),
            index_image=np.full((h, w), -1, dtype=np.int64),
        )
    p_cam = cam.world_to_camera(cloud.positions)
    s = p_cam[:, 2]
    front = s > 0
    u = np.full(n, -1.0)
    v = np.full(n, -1.0)
    u[front] = cam.fx * p_cam[front, 0] / s[front] + cam.cx
    v[front] = cam.fy * p_cam[front, 1] / s[front] + cam.cy
    u_px = np.rint(u).astype(np.int64)
    v_px = np.rint(v).astype(np.int64)
    in_view = front & (u_px >= 0) & (u_px < w) & (v_px >= 0) & (v_px < h)

    index_image = None
    if build_index:
        index_image = np.full(h * w, -1, dtype=np.int64)
        idx = np.nonzero(in_view)[0]
        if idx.size:
            flat = v_px[idx] * w + u_px[idx]
            order = np.lexsort((idx, s[idx], flat))
            flat_sorted = flat[order]
            first = np.ones(flat_sorted.size, dtype=bool)
            first[1:] = flat_sorted[1:] != flat_sorted[:-1]
            index_image[flat_sorted[first]] = idx[order][first]
        index_image = index_image.reshape(h, w)
    return ProjectionResult(u=u, v=v, depth=s, in_view=in_view,
                            index_image=index_image)


def sample_bilinear(image: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Bilinearly sample an (H, W, C) image at real-valued pixel coords (float result)."""
    h, w = image.shape[:2]
    u = np.clip(u, 0.0, w - 1.0)
    v = np.clip(v, 0.0, h - 1.0)
    u0 = np.floor(u).astype(np.int64)
    v0 = np.floor(v).astype(np.int64)
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    fu = (u - u0)[:, None]
    fv = (v - v0)[:, None]
    # gather the four corners first; cheaper than promoting the whole image
    c00 = image[v0, u0].astype(np.float64)
    c01 = image[v0, u1].astype(np.float64)
    c10 = image[v1, u0].astype(np.float64)
    c11 = image[v1, u1].astype(np.float64)
    top = c00 * (1 - fu) + c01 * fu
    bot = c10 * (1 - fu) + c11 * fu
    return top * (1 - fv) + bot * fv


def align_rgb_to_depth(rgb: np.ndarray, rgb_cam: CameraModel,
                       depth: "DepthFrame", depth_cam: CameraModel
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Rewarp an RGB image into the depth camera's view using the depth map.

    Returns (aligned H x W x 3 uint8, validity mask).  Pixels with missing
    depth or that land outside the RGB frame are black with mask False.
    """
    h, w = depth.values.shape
    aligned = np.zeros((h, w, 3), dtype=np.uint8)
    mask = np.zeros((h, w), dtype=bool)
    cloud = backproject(depth, depth_cam)
    if len(cloud) == 0:
        return aligned, mask
    proj = project(cloud, rgb_cam, build_index=False)
    rw, rh = rgb_cam.resolution
    ok = (proj.depth > 0) & (proj.u >= -_EDGE_EPS) & (proj.u <= rw - 1 + _EDGE_EPS) \
        & (proj.v >= -_EDGE_EPS) & (proj.v <= rh - 1 + _EDGE_EPS)
    if np.any(ok):
        colors = sample_bilinear(rgb, proj.u[ok], proj.v[ok])
        src = cloud.source_pixel[ok]
        aligned[src[:, 1], src[:, 0]] = np.clip(
            np.floor(colors + 0.5), 0, 255).astype(np.uint8)
        mask[src[:, 1], src[:, 0]] = True
    return aligned, mask


def register_frame(depth: "DepthFrame", rgb: np.ndarray, class_rgb: np.ndarray | None,
                   cams: dict[str, CameraModel]) -> PointCloud:
    """Build the colored point cloud: depth -> 3D, RGB colors, class overlay.

    Every point is colored by projecting into the RGB camera and sampling
    bilinearly (black where out of view).  If ``class_rgb`` (an image on the
    HS cube grid) is given, points projecting inside the HS field of view get
    a nearest-neighbor class color; all other points carry class alpha 0.
    """
    cloud = backproject(depth, cams["depth"])
    n = len(cloud)
    rgb_out = np.zeros((n, 4), dtype=np.uint8)
    rgb_out[:, 3] = 255
    if n:
        proj = project(cloud, cams["rgb"], build_index=False)
        rw, rh = cams["rgb"].resolution
        ok = (proj.depth > 0) & (proj.u >= -_EDGE_EPS) \
            & (proj.u <= rw - 1 + _EDGE_EPS) & (proj.v >= -_EDGE_EPS) \
            & (proj.v <= rh - 1 + _EDGE_EPS)
        if np.any(ok):
            colors = sample_bilinear(rgb, proj.u[ok], proj.v[ok])
            rgb_out[ok, :3] = np.clip(np.floor(colors + 0.5), 0, 255).astype(np.uint8)
    cloud.rgb = rgb_out

    if class_rgb is not None and n:
        class_out = np.zeros((n, 4), dtype=np.uint8)
        proj_hs = project(cloud, cams["hs"], build_index=False)
        u_px, v_px = proj_hs.pixel_indices()
        ok = proj_hs.in_view
        class_out[ok, :3] = class_rgb[v_px[ok], u_px[ok]]
        class_out[ok, 3] = 255
        cloud.class_rgb = class_out
    return cloud
