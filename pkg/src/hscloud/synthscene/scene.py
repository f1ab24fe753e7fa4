"""Scene description: analytic objects, spectral materials, camera rig, noise.

Materials carry a 25-band spectral signature built from Gaussian bumps over
the 665-960 nm band centers plus an RGB albedo and a class label.  Signatures
are separated enough that an ideal classifier is perfect, so classification
tests isolate pipeline bugs from model capacity.  Procedural texture
modulates the RGB albedo only; spectral reflectance stays the pure signature
(per-pixel RMS normalization is scale-invariant, so a brightness factor
would cancel anyway).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..geometry import CameraModel

BAND_COUNT = 25
BAND_RANGE_NM = (665.0, 960.0)
BAND_CENTERS_NM = np.linspace(*BAND_RANGE_NM, BAND_COUNT)

SENSOR_RESOLUTION = (2045, 1085)
DEPTH_RESOLUTION = (1024, 768)
HS_CUBE_RESOLUTION = (409, 217)
GRID_SPACING_M = 0.01
SENSOR_MAX_COUNT = 1023  # 10-bit sensor


@dataclass
class MaterialSpec:
    name: str
    class_index: int
    albedo: tuple[float, float, float]
    bumps: list[tuple[float, float, float]]  # (center_nm, sigma_nm, amplitude)
    base_reflectance: float = 0.05
    texture_amplitude: float = 0.25
    texture_scale_m: float = 0.03

    def signature(self) -> np.ndarray:
        """Reflectance at each band center, clipped to [0, 1]."""
        s = np.full(BAND_COUNT, self.base_reflectance, dtype=np.float64)
        for center, sigma, amp in self.bumps:
            s += amp * np.exp(-((BAND_CENTERS_NM - center) ** 2) / (2.0 * sigma ** 2))
        return np.clip(s, 0.0, 1.0)


@dataclass
class PlaneObject:
    """Finite rectangle; local +z is the normal, local x/y span the size."""

    center: tuple[float, float, float]
    size: tuple[float, float]
    material: str
    rotation: list | None = None  # row-major 3x3; None = identity

    def rotation_matrix(self) -> np.ndarray:
        if self.rotation is None:
            return np.eye(3)
        return np.array(self.rotation, dtype=np.float64).reshape(3, 3)


@dataclass
class SphereObject:
    center: tuple[float, float, float]
    radius: float
    material: str


@dataclass
class NoiseSpec:
    """Depth-sensor failure model applied in the depth image domain."""

    dropout_rate: float = 0.0
    flying_point_rate: float = 0.0
    flying_offset_mm: int = 300
    temporal_jitter_sigma_mm: float = 0.0
    depth_gaussian_sigma_mm: float = 0.0
    interference_period_frames: int = 0  # 0 disables the sweeping line
    interference_thickness_px: int = 8

    def __post_init__(self):
        for rate in (self.dropout_rate, self.flying_point_rate):
            if not 0.0 <= rate <= 1.0:
                raise ConfigError("noise rates must be within [0, 1]")
        for sigma in (self.temporal_jitter_sigma_mm, self.depth_gaussian_sigma_mm):
            if sigma < 0:
                raise ConfigError("noise sigmas must be >= 0")


@dataclass
class SceneSpec:
    """Everything needed to regenerate a dataset byte-identically."""

    name: str = "scene"
    objects: list = field(default_factory=list)
    materials: dict = field(default_factory=dict)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    seed: int = 0
    grid: bool = False  # include the 5x5 multiview camera array
    hs_noise_sigma_counts: float = 0.0
    dark_level: int = 64
    white_level: int = 1000

    def __post_init__(self):
        if self.white_level <= self.dark_level:
            raise ConfigError("white_level must exceed dark_level")

    def validate(self) -> None:
        if not self.objects:
            raise ConfigError("a scene needs at least one object")
        for obj in self.objects:
            if obj.material not in self.materials:
                raise ConfigError(f"object references unknown material {obj.material!r}")

    def material_table(self) -> list[MaterialSpec]:
        """Materials in a stable order (by name) for integer indexing."""
        return [self.materials[k] for k in sorted(self.materials)]


def build_rig(grid: bool = False) -> dict[str, CameraModel]:
    """The default three-camera rig (world = depth camera frame) + optional grid.

    The depth and RGB cameras sit 14 mm apart; the HS camera sits between
    them with a narrower field of view.  Grid cameras reuse the depth
    intrinsics at 5x5 positions spaced 1 cm, centered on the depth camera.
    """
    w, h = DEPTH_RESOLUTION
    k_depth = np.array([[700.0, 0, w / 2], [0, 700.0, h / 2], [0, 0, 1]])
    hw, hh = HS_CUBE_RESOLUTION
    k_hs = np.array([[520.0, 0, hw / 2], [0, 520.0, hh / 2], [0, 0, 1]])
    eye = np.eye(3)
    cams = {
        "depth": CameraModel(K=k_depth, R=eye, t=np.zeros(3),
                             resolution=DEPTH_RESOLUTION),
        "rgb": CameraModel(K=k_depth, R=eye, t=np.array([-0.014, 0.0, 0.0]),
                           resolution=DEPTH_RESOLUTION),
        "hs": CameraModel(K=k_hs, R=eye, t=np.array([-0.007, 0.0, 0.0]),
                          resolution=HS_CUBE_RESOLUTION),
    }
    if grid:
        for r in range(5):
            for c in range(5):
                pos = np.array([(c - 2) * GRID_SPACING_M,
                                (r - 2) * GRID_SPACING_M, 0.0])
                cams[f"grid_{r}_{c}"] = CameraModel(
                    K=k_depth, R=eye, t=-pos, resolution=DEPTH_RESOLUTION)
    return cams


def hs_sensor_camera(hs_cube_cam: CameraModel, pattern: int = 5) -> CameraModel:
    """The mosaic sensor camera: same optics as the cube grid at n x spatial res.

    Block (x, y) covers sensor pixels n*x .. n*x+n-1 whose center is
    n*u + (n-1)/2, hence the focal/principal scaling below.
    """
    off = (pattern - 1) / 2
    K = np.array([
        [hs_cube_cam.fx * pattern, 0, hs_cube_cam.cx * pattern + off],
        [0, hs_cube_cam.fy * pattern, hs_cube_cam.cy * pattern + off],
        [0, 0, 1],
    ])
    w, h = hs_cube_cam.resolution
    return CameraModel(K=K, R=hs_cube_cam.R, t=hs_cube_cam.t,
                       resolution=(w * pattern, h * pattern),
                       depth_scale=hs_cube_cam.depth_scale)


def default_materials() -> dict[str, MaterialSpec]:
    return {
        "tumor": MaterialSpec("tumor", 0, (0.80, 0.25, 0.25),
                              [(700.0, 20.0, 0.85)]),
        "healthy": MaterialSpec("healthy", 1, (0.80, 0.65, 0.55),
                                [(790.0, 20.0, 0.80)]),
        "blood": MaterialSpec("blood", 2, (0.55, 0.10, 0.12),
                              [(870.0, 18.0, 0.80)]),
        "dura_mater": MaterialSpec("dura_mater", 3, (0.90, 0.60, 0.75),
                                   [(935.0, 18.0, 0.75)]),
    }


def default_scene(seed: int = 0, noise: NoiseSpec | None = None,
                  grid: bool = False,
                  hs_noise_sigma_counts: float = 0.0) -> SceneSpec:
    """A four-class desk scene: backdrop, two spheres, one raised plaque.

    Everything sits within the 0.3-1.0 m operating range and the HS field of
    view covers all four materials.
    """
    spec = SceneSpec(
        name="default",
        objects=[
            PlaneObject(center=(0.0, 0.0, 0.95), size=(2.0, 1.5),
                        material="healthy"),
            PlaneObject(center=(0.0, -0.055, 0.75), size=(0.34, 0.10),
                        material="dura_mater"),
            SphereObject(center=(-0.06, 0.0, 0.55), radius=0.05,
                         material="tumor"),
            SphereObject(center=(0.07, 0.03, 0.60), radius=0.04,
                         material="blood"),
        ],
        materials=default_materials(),
        noise=noise or NoiseSpec(),
        seed=seed,
        grid=grid,
        hs_noise_sigma_counts=hs_noise_sigma_counts,
    )
    spec.validate()
    return spec


def spec_to_dict(spec: SceneSpec) -> dict:
    doc = {
        "name": spec.name,
        "seed": spec.seed,
        "grid": spec.grid,
        "hs_noise_sigma_counts": spec.hs_noise_sigma_counts,
        "dark_level": spec.dark_level,
        "white_level": spec.white_level,
        "noise": asdict(spec.noise),
        "materials": {k: asdict(m) for k, m in spec.materials.items()},
        "objects": [
            {"kind": "plane", **asdict(o)} if isinstance(o, PlaneObject)
            else {"kind": "sphere", **asdict(o)}
            for o in spec.objects
        ],
    }
    return doc


def spec_from_dict(doc: dict) -> SceneSpec:
    objects = []
    for o in doc.get("objects", []):
        o = dict(o)
        kind = o.pop("kind", "plane")
        if kind == "plane":
            o["center"] = tuple(o["center"])
            o["size"] = tuple(o["size"])
            objects.append(PlaneObject(**o))
        elif kind == "sphere":
            o["center"] = tuple(o["center"])
            objects.append(SphereObject(**o))
        else:
            raise ConfigError(f"unknown object kind {kind!r}")
    materials = {}
    for name, m in doc.get("materials", {}).items():
        m = dict(m)
        m["albedo"] = tuple(m["albedo"])
        m["bumps"] = [tuple(b) for b in m["bumps"]]
        materials[name] = MaterialSpec(**m)
    spec = SceneSpec(
        name=doc.get("name", "scene"),
        objects=objects,
        materials=materials,
        noise=NoiseSpec(**doc.get("noise", {})),
        seed=int(doc.get("seed", 0)),
        grid=bool(doc.get("grid", False)),
        hs_noise_sigma_counts=float(doc.get("hs_noise_sigma_counts", 0.0)),
        dark_level=int(doc.get("dark_level", 64)),
        white_level=int(doc.get("white_level", 1000)),
    )
    spec.validate()
    return spec


def load_scene_spec(path: str | Path) -> SceneSpec:
    try:
        return spec_from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load scene spec {path}: {exc}") from exc


def save_scene_spec(spec: SceneSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=1))
