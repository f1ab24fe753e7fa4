"""hscloud: hyperspectral tissue classification fused with refined depth
into navigable colored point clouds, plus the synthetic data and evaluation
tooling that makes the whole chain testable on a desk.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    classify,
    dataio,
    depthproc,
    geometry,
    hypercube,
    pipeline,
    ply,
    syntheval,
    synthscene,
)
