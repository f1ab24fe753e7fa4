"""Snapshot-mosaic preprocessing: demosaic, calibrate, correct, normalize, re-layout.

A raw mosaic frame carries a repeating n x n per-pixel band filter; one
exposure yields every band at 1/n of the spatial resolution.  The chain here
turns such frames into calibrated reflectance cubes:

    demosaic -> calibrate -> spectral_correct -> normalize_rms -> to_band_sequential

Cubes exist in two layouts: pixel-interleaved ("bip", shape H x W x bands_stored,
zero-padded to a round band count) and band-sequential ("bsq", shape
bands_active x H x W, no padding).  All chain accumulations run at float32 or
better; float16 is a storage format only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DimensionError, GeometryMismatchError, LayoutError

logger = logging.getLogger(__name__)

LAYOUT_BIP = "bip"
LAYOUT_BSQ = "bsq"

DEFAULT_PATTERN = 5
DEFAULT_BANDS_ACTIVE = 25
DEFAULT_BANDS_STORED = 32


def identity_band_map(pattern_size: int = DEFAULT_PATTERN) -> np.ndarray:
    """Row-major cell->band mapping: cell (r, c) holds band r*n + c."""
    n = pattern_size
    return np.arange(n * n, dtype=np.int64).reshape(n, n)


@dataclass
class RawMosaicFrame:
    """A raw 16-bit sensor capture with an n x n spectral mosaic in front.

    ``band_map[r, c]`` gives the band index sampled at sensor cell
    (row mod n, col mod n) == (r, c); it must be a bijection onto 0..n*n-1.
    """

    values: np.ndarray
    pattern_size: int = DEFAULT_PATTERN
    band_map: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.uint16)
        if self.values.ndim != 2:
            raise ValueError("mosaic values must be a 2-D array")
        n = int(self.pattern_size)
        if n < 1:
            raise ValueError("pattern_size must be >= 1")
        if self.height < n or self.width < n:
            raise DimensionError(
                f"mosaic {self.width}x{self.height} smaller than one {n}x{n} block"
            )
        if self.band_map is None:
            self.band_map = identity_band_map(n)
        self.band_map = np.asarray(self.band_map, dtype=np.int64)
        if self.band_map.shape != (n, n):
            raise ValueError(f"band_map must be {n}x{n}")
        if sorted(self.band_map.ravel().tolist()) != list(range(n * n)):
            raise ValueError("band_map must be a bijection onto band indices 0..n*n-1")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass
class ReferencePair:
    """Dark and white calibration captures, same geometry as the frames they fix."""

    dark: RawMosaicFrame
    white: RawMosaicFrame
    _cubes: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if (self.dark.values.shape != self.white.values.shape
                or self.dark.pattern_size != self.white.pattern_size):
            raise GeometryMismatchError("dark and white references must match")

    def as_cubes(self) -> tuple["HyperCube", "HyperCube"]:
        """Demosaic both references once and cache the cubes."""
        if self._cubes is None:
            self._cubes = (demosaic(self.dark), demosaic(self.white))
        return self._cubes


@dataclass
class CorrectionMatrix:
    """Manufacturer spectral correction: active block embedded in an identity-padded square.

    Rows/columns past ``bands_active`` are identity so padded and unpadded math
    agree exactly.
    """

    values: np.ndarray
    bands_active: int = DEFAULT_BANDS_ACTIVE

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        n = self.values.shape[0]
        if self.values.shape != (n, n):
            raise ValueError("correction matrix must be square")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("correction matrix entries must be finite")
        a = self.bands_active
        if n < a:
            raise ValueError("matrix smaller than the active band count")
        pad = self.values[a:, a:]
        if (not np.array_equal(pad, np.eye(n - a))
                or np.any(self.values[:a, a:] != 0.0)
                or np.any(self.values[a:, :a] != 0.0)):
            raise ValueError("padding rows/cols must be identity")

    @classmethod
    def identity(cls, bands_stored: int = DEFAULT_BANDS_STORED,
                 bands_active: int = DEFAULT_BANDS_ACTIVE) -> "CorrectionMatrix":
        return cls(np.eye(bands_stored), bands_active)

    @classmethod
    def from_active_block(cls, block: np.ndarray,
                          bands_stored: int = DEFAULT_BANDS_STORED) -> "CorrectionMatrix":
        block = np.asarray(block, dtype=np.float64)
        a = block.shape[0]
        m = np.eye(bands_stored)
        m[:a, :a] = block
        return cls(m, a)


@dataclass
class HyperCube:
    """A W x H x B spectral image in one of two explicit layouts.

    bip: ``values`` has shape (height, width, bands_stored), bands past
    ``bands_active`` are zero padding.  bsq: shape (bands_active, height,
    width), no padding.
    """

    values: np.ndarray
    layout: str
    bands_active: int = DEFAULT_BANDS_ACTIVE

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 3:
            raise ValueError("cube values must be 3-D")
        if self.layout not in (LAYOUT_BIP, LAYOUT_BSQ):
            raise LayoutError(f"unknown layout {self.layout!r}")
        if self.layout == LAYOUT_BIP and self.values.shape[2] < self.bands_active:
            raise ValueError("bands_stored must be >= bands_active")
        if self.layout == LAYOUT_BSQ and self.values.shape[0] != self.bands_active:
            raise ValueError("bsq cubes store exactly the active bands")

    @property
    def width(self) -> int:
        return self.values.shape[2 if self.layout == LAYOUT_BSQ else 1]

    @property
    def height(self) -> int:
        return self.values.shape[1 if self.layout == LAYOUT_BSQ else 0]

    @property
    def bands_stored(self) -> int:
        return self.bands_active if self.layout == LAYOUT_BSQ else self.values.shape[2]

    def active_view(self) -> np.ndarray:
        """Active-band samples, laid out per the cube's own layout."""
        if self.layout == LAYOUT_BSQ:
            return self.values
        return self.values[:, :, : self.bands_active]


def demosaic(raw: RawMosaicFrame, bands_stored: int = DEFAULT_BANDS_STORED) -> HyperCube:
    """Bin each n x n mosaic block into one multi-band pixel (pure relabeling).

    Output is pixel-interleaved, float32 (uint16 counts are exact in float32),
    floor(width/n) x floor(height/n); trailing rows/cols that do not complete a
    block are dropped.  Padding bands are zero.
    """
    n = raw.pattern_size
    if raw.width < n or raw.height < n:
        raise DimensionError("mosaic smaller than one block")
    bands = n * n
    if bands_stored < bands:
        raise ValueError("bands_stored must hold every mosaic band")
    out_h = raw.height // n
    out_w = raw.width // n
    cropped = raw.values[: out_h * n, : out_w * n]
    # (H, n, W, n) -> (H, W, n, n) -> (H, W, n*n) cell-major
    blocks = cropped.reshape(out_h, n, out_w, n).transpose(0, 2, 1, 3)
    cells = blocks.reshape(out_h, out_w, bands)
    out = np.zeros((out_h, out_w, bands_stored), dtype=np.float32)
    out[:, :, raw.band_map.ravel()] = cells
    return HyperCube(out, LAYOUT_BIP, bands_active=bands)


def calibrate(cube: HyperCube, refs: ReferencePair,
              dtype: np.dtype = np.float16) -> HyperCube:
    """Remap every active sample between its dark and white reference values.

    out = clamp((in - dark) / (white - dark), 0, 1).  Cells where
    white <= dark get denominator 1 (reference repair); the per-frame repair
    count is logged.  Padding bands stay zero.
    """
    if cube.layout != LAYOUT_BIP:
        raise LayoutError("calibrate expects a pixel-interleaved cube")
    dark_cube, white_cube = refs.as_cubes()
    if (dark_cube.height, dark_cube.width) != (cube.height, cube.width):
        raise GeometryMismatchError(
            f"references are {dark_cube.width}x{dark_cube.height}, "
            f"cube is {cube.width}x{cube.height}"
        )
    a = cube.bands_active
    dark = dark_cube.values[:, :, :a].astype(np.float32)
    white = white_cube.values[:, :, :a].astype(np.float32)
    denom = white - dark
    bad = denom <= 0
    n_bad = int(np.count_nonzero(bad))
    if n_bad:
        logger.warning("reference repair: %d cells with white <= dark", n_bad)
        denom = np.where(bad, np.float32(1.0), denom)
    active = cube.values[:, :, :a].astype(np.float32)
    scaled = np.clip((active - dark) / denom, 0.0, 1.0)
    out = np.zeros((cube.height, cube.width, cube.bands_stored), dtype=dtype)
    out[:, :, :a] = scaled.astype(dtype)
    return HyperCube(out, LAYOUT_BIP, bands_active=a)


def spectral_correct(cube: HyperCube, matrix: CorrectionMatrix) -> HyperCube:
    """Replace each pixel's stored-band vector v by v @ M (float32 accumulate)."""
    if cube.layout != LAYOUT_BIP:
        raise LayoutError("spectral_correct expects a pixel-interleaved cube")
    if matrix.values.shape[0] != cube.bands_stored:
        raise ValueError(
            f"matrix is {matrix.values.shape[0]}x{matrix.values.shape[0]}, "
            f"cube stores {cube.bands_stored} bands"
        )
    m32 = matrix.values.astype(np.float32)
    corrected = cube.values.astype(np.float32) @ m32
    return HyperCube(corrected.astype(cube.values.dtype), LAYOUT_BIP,
                     bands_active=cube.bands_active)


def normalize_rms(cube: HyperCube) -> HyperCube:
    """Divide each pixel by the RMS of its active bands; all-zero pixels pass through."""
    active = cube.active_view().astype(np.float32)
    axis = 0 if cube.layout == LAYOUT_BSQ else 2
    rms = np.sqrt(np.mean(np.square(active), axis=axis, keepdims=True))
    rms = np.where(rms == 0, np.float32(1.0), rms)
    normalized = (active / rms).astype(cube.values.dtype)
    if cube.layout == LAYOUT_BSQ:
        return HyperCube(normalized, LAYOUT_BSQ, bands_active=cube.bands_active)
    out = np.zeros_like(cube.values)
    out[:, :, : cube.bands_active] = normalized
    return HyperCube(out, LAYOUT_BIP, bands_active=cube.bands_active)


def to_band_sequential(cube: HyperCube) -> HyperCube:
    """Transpose to band-sequential order and drop padding; active samples bit-exact."""
    if cube.layout != LAYOUT_BIP:
        raise LayoutError("cube is already band-sequential")
    planes = np.ascontiguousarray(cube.values[:, :, : cube.bands_active].transpose(2, 0, 1))
    return HyperCube(planes, LAYOUT_BSQ, bands_active=cube.bands_active)


def to_pixel_interleaved(cube: HyperCube,
                         bands_stored: int = DEFAULT_BANDS_STORED) -> HyperCube:
    """Inverse re-layout of :func:`to_band_sequential`, restoring zero padding."""
    if cube.layout != LAYOUT_BSQ:
        raise LayoutError("cube is already pixel-interleaved")
    a = cube.bands_active
    if bands_stored < a:
        raise ValueError("bands_stored must be >= bands_active")
    out = np.zeros((cube.height, cube.width, bands_stored), dtype=cube.values.dtype)
    out[:, :, :a] = cube.values.transpose(1, 2, 0)
    return HyperCube(out, LAYOUT_BIP, bands_active=a)


class CubePreprocessor(BaseEstimator, TransformerMixin):
    """Full mosaic-to-cube chain as a transformer.

    fit() demosaics and caches the calibration references; transform() maps a
    RawMosaicFrame to a normalized band-sequential HyperCube.  ``precision``
    selects the cube storage dtype ("float16" or "float32"); intermediate
    accumulation is always at least float32.
    """

    def __init__(self, references=None, correction=None, precision="float16",
                 normalize=True):
        self.references = references
        self.correction = correction
        self.precision = precision
        self.normalize = normalize

    def fit(self, X=None, y=None):
        if self.references is None:
            raise ValueError("CubePreprocessor needs a ReferencePair")
        self.references.as_cubes()
        self.correction_ = (self.correction if self.correction is not None
                            else CorrectionMatrix.identity())
        self.dtype_ = {"float16": np.float16, "float32": np.float32}[self.precision]
        return self

    def transform(self, X: RawMosaicFrame) -> HyperCube:
        if not hasattr(self, "dtype_"):
            self.fit()
        cube = demosaic(X)
        cube = calibrate(cube, self.references, dtype=self.dtype_)
        cube = spectral_correct(cube, self.correction_)
        if self.normalize:
            cube = normalize_rms(cube)
        return to_band_sequential(cube)
