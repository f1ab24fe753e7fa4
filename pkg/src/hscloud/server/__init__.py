"""Point-cloud streaming service and its binary wire format."""

from .service import PipelineServer, SharedState, serve_forever
from .wire import (
    FLAG_CLASS_OVERLAY,
    HEADER_SIZE,
    MAGIC,
    POINT_SIZE_OVERLAY,
    POINT_SIZE_PLAIN,
    VERSION,
    DecodedFrame,
    decode_wireframe,
    encode_wireframe,
)

__all__ = [
    "PipelineServer", "SharedState", "serve_forever",
    "FLAG_CLASS_OVERLAY", "HEADER_SIZE", "MAGIC", "POINT_SIZE_OVERLAY",
    "POINT_SIZE_PLAIN", "VERSION", "DecodedFrame", "decode_wireframe",
    "encode_wireframe",
]
