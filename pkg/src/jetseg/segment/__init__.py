"""Classical segmentation methods producing zone label masks."""

from .chanvese import (
    DEFAULT_ZONE_PARAMS,
    ChanVeseParams,
    ChanVeseResult,
    ZoneRun,
    chanvese_binary,
    chanvese_segment,
)
from .cluster import ClusterModel, gmm_segment, kmeans_segment
from .threshold import (
    DEFAULT_BANDS,
    AutoBandsResult,
    ThresholdBands,
    auto_bands,
    median_filter,
    threshold_segment,
)

__all__ = [
    "AutoBandsResult",
    "ChanVeseParams",
    "ChanVeseResult",
    "ClusterModel",
    "DEFAULT_BANDS",
    "DEFAULT_ZONE_PARAMS",
    "ThresholdBands",
    "ZoneRun",
    "auto_bands",
    "chanvese_binary",
    "chanvese_segment",
    "gmm_segment",
    "kmeans_segment",
    "median_filter",
    "threshold_segment",
]
