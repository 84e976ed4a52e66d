"""Run-based black & white connected component labeling and analysis.

One raster scan labels foreground and background components, accumulates
their features, and builds the inclusion (adjacency) tree; holes are then
filled, and components filtered, purely in label space.
"""

from .analysis import (
    AdjacencyTree,
    ComponentRecord,
    adjacency_tree,
    components,
    euler_number,
    filter_components,
    holes,
    to_binary,
)
from .estimator import BWLabeler, ComponentFilter, HoleFiller, check_binary_image
from .imagegen import GeneratorSpec, generate
from .lsl import label_image
from .model import (
    BinaryImage,
    Connectivity,
    FeatureAccumulator,
    LabelingConfig,
    LabelingResult,
    merge_features,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyTree",
    "BWLabeler",
    "BinaryImage",
    "ComponentFilter",
    "ComponentRecord",
    "Connectivity",
    "FeatureAccumulator",
    "GeneratorSpec",
    "HoleFiller",
    "LabelingConfig",
    "LabelingResult",
    "adjacency_tree",
    "check_binary_image",
    "components",
    "euler_number",
    "filter_components",
    "generate",
    "holes",
    "label_image",
    "merge_features",
    "to_binary",
]
