"""Crisp key-block kernel: orientations, pyramids, modes, volumes, tunnel sweep."""
from .mechanics import (
    CLASS_INFINITE,
    CLASS_REMOVABLE,
    CLASS_TAPERED,
    ModeInconsistencyError,
    SlidingMode,
    classify_block,
    joint_pyramid,
    safety_factor,
    sliding_mode,
)
from .orientation import JointPlane, Orientation, downdip_vector, normal_from_orientation
from .pyramid import (
    HalfSpaceSystem,
    PyramidResult,
    PyramidSolveError,
    cone_nonempty,
    pyramid_nonempty,
)
from .tunnel import (
    BlockRecord,
    Facet,
    TunnelSection,
    all_codes,
    enumerate_tunnel_blocks,
)
from .volume import (
    UnboundedBlockError,
    bbox_halfspaces,
    block_vertices,
    block_volume,
    monte_carlo_volume,
)

__all__ = [
    "BlockRecord",
    "CLASS_INFINITE",
    "CLASS_REMOVABLE",
    "CLASS_TAPERED",
    "Facet",
    "HalfSpaceSystem",
    "JointPlane",
    "ModeInconsistencyError",
    "Orientation",
    "PyramidResult",
    "PyramidSolveError",
    "SlidingMode",
    "TunnelSection",
    "UnboundedBlockError",
    "all_codes",
    "bbox_halfspaces",
    "block_vertices",
    "block_volume",
    "classify_block",
    "cone_nonempty",
    "downdip_vector",
    "enumerate_tunnel_blocks",
    "joint_pyramid",
    "monte_carlo_volume",
    "normal_from_orientation",
    "pyramid_nonempty",
    "safety_factor",
    "sliding_mode",
]
