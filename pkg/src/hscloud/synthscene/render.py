"""Analytic ray rendering of scene specs: RGB, depth, labels, HS mosaics.

Rays are cast per pixel with camera-frame direction (x, y, 1) so the ray
parameter equals the camera z-depth directly.  Everything is closed-form
(ray-plane / ray-sphere), so any view's ground truth is exact.
"""

from __future__ import annotations

import numpy as np

from ..classify.maps import UNLABELED
from ..depthproc import DepthFrame
from ..geometry import CameraModel
from ..hypercube import RawMosaicFrame, identity_band_map
from .scene import (
    SENSOR_MAX_COUNT,
    SENSOR_RESOLUTION,
    MaterialSpec,
    PlaneObject,
    SceneSpec,
    SphereObject,
    hs_sensor_camera,
)

_EPS = 1e-9


def _ray_grid(cam: CameraModel) -> tuple[np.ndarray, np.ndarray]:
    """World-frame ray origins (3,) and directions (H, W, 3) with cam z = 1."""
    w, h = cam.resolution
    u = np.arange(w, dtype=np.float64)[None, :]
    v = np.arange(h, dtype=np.float64)[:, None]
    d_cam = np.empty((h, w, 3), dtype=np.float64)
    d_cam[:, :, 0] = (u - cam.cx) / cam.fx
    d_cam[:, :, 1] = (v - cam.cy) / cam.fy
    d_cam[:, :, 2] = 1.0
    d_world = d_cam @ cam.R  # R^T applied per-pixel
    return cam.center, d_world


def _intersect_plane(obj: PlaneObject, origin, dirs):
    rot = obj.rotation_matrix()
    center = np.asarray(obj.center, dtype=np.float64)
    o_l = (origin - center) @ rot
    d_l = dirs @ rot
    dz = d_l[:, :, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(np.abs(dz) > _EPS, -o_l[2] / dz, np.inf)
        hit_x = o_l[0] + s * d_l[:, :, 0]
        hit_y = o_l[1] + s * d_l[:, :, 1]
        sx, sy = obj.size
        inside = (np.abs(hit_x) <= sx / 2) & (np.abs(hit_y) <= sy / 2) & (s > _EPS)
        s = np.where(inside, s, np.inf)
        uv = np.stack([np.where(inside, hit_x, 0.0),
                       np.where(inside, hit_y, 0.0)], axis=-1)
    return s, uv


def _intersect_sphere(obj: SphereObject, origin, dirs):
    center = np.asarray(obj.center, dtype=np.float64)
    oc = origin - center
    a = np.sum(dirs * dirs, axis=2)
    b = 2.0 * (dirs @ oc)
    c = float(oc @ oc) - obj.radius ** 2
    with np.errstate(invalid="ignore"):
        disc = b * b - 4.0 * a * c
        hit = disc >= 0
        sq = np.sqrt(np.where(hit, disc, 0.0))
        s_near = (-b - sq) / (2.0 * a)
        s_far = (-b + sq) / (2.0 * a)
        s = np.where(s_near > _EPS, s_near, s_far)
        s = np.where(hit & (s > _EPS), s, np.inf)
        # local surface coordinates for texture: offset from center, x/y
        px = origin[0] + s * dirs[:, :, 0] - center[0]
        py = origin[1] + s * dirs[:, :, 1] - center[1]
        uv = np.stack([np.where(np.isfinite(s), px, 0.0),
                       np.where(np.isfinite(s), py, 0.0)], axis=-1)
    return s, uv


def trace_scene(spec: SceneSpec, cam: CameraModel):
    """Cast one ray per pixel.

    Returns (depth_m with 0 where nothing is hit, material index or -1 on the
    stable sorted-material table, local (u, v) surface coordinates).
    """
    spec.validate()
    origin, dirs = _ray_grid(cam)
    h, w = dirs.shape[:2]
    best_s = np.full((h, w), np.inf)
    material = np.full((h, w), -1, dtype=np.int32)
    local_uv = np.zeros((h, w, 2), dtype=np.float64)
    table = {m.name: i for i, m in enumerate(spec.material_table())}
    for obj in spec.objects:
        if isinstance(obj, PlaneObject):
            s, uv = _intersect_plane(obj, origin, dirs)
        else:
            s, uv = _intersect_sphere(obj, origin, dirs)
        closer = s < best_s
        best_s = np.where(closer, s, best_s)
        material[closer] = table[obj.material]
        local_uv[closer] = uv[closer]
    depth_m = np.where(np.isfinite(best_s), best_s, 0.0)
    return depth_m, material, local_uv


def _texture(mat: MaterialSpec, local_uv: np.ndarray) -> np.ndarray:
    if mat.texture_amplitude == 0.0:
        return np.ones(local_uv.shape[:2])
    phase_u = 2.0 * np.pi * local_uv[:, :, 0] / mat.texture_scale_m
    phase_v = 2.0 * np.pi * local_uv[:, :, 1] / mat.texture_scale_m
    return 1.0 + mat.texture_amplitude * np.sin(phase_u) * np.sin(phase_v)


def render_rgb(spec: SceneSpec, cam: CameraModel) -> np.ndarray:
    """Flat-shaded albedo render with procedural texture; background black."""
    _, material, local_uv = trace_scene(spec, cam)
    h, w = material.shape
    out = np.zeros((h, w, 3), dtype=np.float64)
    for idx, mat in enumerate(spec.material_table()):
        mask = material == idx
        if not mask.any():
            continue
        brightness = _texture(mat, local_uv)[mask]
        out[mask] = np.asarray(mat.albedo) * brightness[:, None] * 255.0
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def render_depth(spec: SceneSpec, cam: CameraModel) -> DepthFrame:
    """Clean ground-truth depth in millimeters (0 where no surface)."""
    depth_m, _, _ = trace_scene(spec, cam)
    mm = np.floor(depth_m / cam.depth_scale + 0.5)
    return DepthFrame(np.clip(mm, 0, 65535).astype(np.uint16))


def render_labels(spec: SceneSpec, cam: CameraModel) -> np.ndarray:
    """Per-pixel class index on this camera's grid; UNLABELED where no surface."""
    _, material, _ = trace_scene(spec, cam)
    table = spec.material_table()
    out = np.full(material.shape, UNLABELED, dtype=np.uint8)
    for idx, mat in enumerate(table):
        out[material == idx] = mat.class_index
    return out


def reflectance_cube(spec: SceneSpec, cam: CameraModel) -> np.ndarray:
    """Analytic per-pixel 25-band reflectance on the given camera grid."""
    _, material, _ = trace_scene(spec, cam)
    signatures = np.stack([m.signature() for m in spec.material_table()])
    out = np.zeros(material.shape + (signatures.shape[1],), dtype=np.float64)
    hit = material >= 0
    out[hit] = signatures[material[hit]]
    return out


def render_mosaic(spec: SceneSpec, hs_cube_cam: CameraModel,
                  rng: np.random.Generator | None = None) -> RawMosaicFrame:
    """Raw 5x5-mosaic sensor capture of the scene.

    Each sensor pixel samples its mosaic cell's band of the material
    signature, scaled between the dark and white reference levels and
    quantized to 10-bit counts; optional Gaussian sensor noise in counts.
    """
    sensor_cam = hs_sensor_camera(hs_cube_cam)
    _, material, _ = trace_scene(spec, sensor_cam)
    h, w = material.shape
    band_map = identity_band_map()
    bands = band_map[np.arange(h)[:, None] % 5, np.arange(w)[None, :] % 5]
    signatures = np.stack([m.signature() for m in spec.material_table()])
    reflectance = np.zeros((h, w), dtype=np.float64)
    hit = material >= 0
    reflectance[hit] = signatures[material[hit], bands[hit]]
    counts = spec.dark_level + reflectance * (spec.white_level - spec.dark_level)
    if rng is not None and spec.hs_noise_sigma_counts > 0:
        counts = counts + rng.normal(0.0, spec.hs_noise_sigma_counts, counts.shape)
    counts = np.clip(np.floor(counts + 0.5), 0, SENSOR_MAX_COUNT)
    return RawMosaicFrame(counts.astype(np.uint16), pattern_size=5,
                          band_map=band_map)


def reference_frames(spec: SceneSpec) -> tuple[RawMosaicFrame, RawMosaicFrame]:
    """Constant dark and white calibration captures at sensor resolution."""
    w, h = SENSOR_RESOLUTION
    band_map = identity_band_map()
    dark = RawMosaicFrame(np.full((h, w), spec.dark_level, dtype=np.uint16),
                          band_map=band_map)
    white = RawMosaicFrame(np.full((h, w), spec.white_level, dtype=np.uint16),
                           band_map=band_map)
    return dark, white
