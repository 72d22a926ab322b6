"""Infrared jet-flame segmentation, geometry extraction and evaluation toolkit."""

from .errors import (
    BoundsError,
    ConfigError,
    DegenerateError,
    DivisionError,
    EmptyDatasetError,
    EmptySetError,
    FormatError,
    JetsegError,
    LabelError,
    MathError,
    NoFlameError,
    RangeError,
    ShapeError,
)
from .geometry import (
    FlameGeometry,
    contour,
    extract_features,
    flame_region,
    largest_component,
    polygon_area,
)
from .ingest import (
    Calibration,
    DatasetSplit,
    ExperimentMeta,
    LabelMask,
    TemperatureField,
    load_config,
    load_label_mask_pgm,
    load_temperature_csv,
    parse_calibration,
    parse_experiment_meta,
    save_config,
    save_label_mask_pgm,
    save_temperature_csv,
    split_dataset,
)
from .metrics import (
    ConfusionCounts,
    ErrorSeries,
    ImageMetrics,
    OverlapMetrics,
    PixelErrors,
    aggregate_metrics,
    confusion,
    hausdorff,
    image_metrics,
    info_metric,
    mape,
    mape_matched,
    multiclass_hausdorff,
    overlap_metrics,
    pixel_error_metrics,
    rmspe,
    rmspe_matched,
)
from .preprocess import (
    ClassWeights,
    augment,
    compute_class_weights,
    normalize_dataset,
    to_intensity,
)
from .segment import (
    AutoBandsResult,
    ChanVeseParams,
    ChanVeseResult,
    ClusterModel,
    ThresholdBands,
    auto_bands,
    chanvese_binary,
    chanvese_segment,
    gmm_segment,
    kmeans_segment,
    median_filter,
    threshold_segment,
)
from .stats import (
    PairedSample,
    TestResult,
    normal_quantile,
    pearson_correlation,
    qq_points,
    wilcoxon_signed_rank,
)
from .synth import FlameSpec, SynthResult, generate_flame

__version__ = "0.1.0"
