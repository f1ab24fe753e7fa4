"""Deterministic synthetic capture datasets with analytic ground truth."""

from .dataset import (
    SyntheticDataset,
    default_correction_matrix,
    generate_dataset,
    load_dataset,
    train_dataset_model,
)
from .noise import apply_depth_noise, frame_rng
from .render import (
    reference_frames,
    reflectance_cube,
    render_depth,
    render_labels,
    render_mosaic,
    render_rgb,
    trace_scene,
)
from .scene import (
    BAND_CENTERS_NM,
    MaterialSpec,
    NoiseSpec,
    PlaneObject,
    SceneSpec,
    SphereObject,
    build_rig,
    default_materials,
    default_scene,
    hs_sensor_camera,
    load_scene_spec,
    save_scene_spec,
    spec_from_dict,
    spec_to_dict,
)

__all__ = [
    "SyntheticDataset", "default_correction_matrix", "generate_dataset",
    "load_dataset", "train_dataset_model",
    "apply_depth_noise", "frame_rng",
    "reference_frames", "reflectance_cube", "render_depth", "render_labels",
    "render_mosaic", "render_rgb", "trace_scene",
    "BAND_CENTERS_NM", "MaterialSpec", "NoiseSpec", "PlaneObject", "SceneSpec",
    "SphereObject", "build_rig", "default_materials", "default_scene", "hs_sensor_camera",
    "load_scene_spec", "save_scene_spec", "spec_from_dict", "spec_to_dict",
]
