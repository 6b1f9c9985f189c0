"""cdrloc: localize mobile users from Call Detail Records.

The toolkit detects load-sharing artifacts, weights candidate cells by
load-share counts, inverse transmit power and appearance days, validates
the resulting home/work anchors with O-D matrices and chi-squared tests,
and ships a synthetic mobility simulator as its ground-truth oracle.
"""

from .core import (
    CdrRecord,
    CellTower,
    Rect,
    RegionGrid,
    TimeWindow,
    TIME_WINDOWS,
    UserSegment,
    haversine_km,
    planar_km,
    region_of,
    window_of,
)
from .entropy import (
    EntropyFilter,
    LocationDistribution,
    filter_by_entropy,
    location_distribution,
    shannon_entropy,
)
from .exceptions import CdrlocError, DataError, UsageError
from .ingest import (
    StreamSet,
    TowerRegistry,
    UserStream,
    canonicalize_streams,
    load_dataset,
    study_area_filter,
)
from .loadshare import (
    SpeedTable,
    SpeedTableCalibrator,
    THRESHOLD_GRID,
    calibrate_speed_table,
    detect_adaptive,
    detect_fixed,
    detection_metrics,
    label_ground_truth,
    pairwise_speed,
)
from .localize import (
    AnchorLocalizer,
    ClusterWeightParams,
    calldays_anchor,
    cell_weights,
    dbscan_stay_clusters,
    fit_segment_params,
    infer_anchor,
    minmax_scale,
    weighted_kmeanspp,
)
from .odmatrix import (
    OdMatrix,
    build_od_matrix,
    chi_squared_p,
    chi_squared_statistic,
    error_percentiles,
)
from .profiling import (
    SegmentClassifier,
    classification_report,
    extract_features,
    extract_features_all,
)
from .synth import WorldConfig, generate_world, simulate_traces, write_world

__version__ = "0.1.0"
