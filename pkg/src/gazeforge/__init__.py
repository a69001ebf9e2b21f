"""gazeforge: author, correct, retarget, and evaluate visual-saliency
conditioning maps for attention-guided generation pipelines."""

import os as _os

# Desk-scale workloads here are elementwise numpy plus many small LAPACK
# calls; BLAS/OpenMP thread pools only add spin-wait contention (40x
# slowdowns observed on 2-vCPU hosts). Defaults only - explicit settings win.
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    _os.environ.setdefault(_var, "1")
_os.environ.setdefault("OMP_WAIT_POLICY", "PASSIVE")

from .errors import (
    BackendError,
    BackendUnreachableError,
    DegenerateMapError,
    EmptyDatasetError,
    EmptyFixationsError,
    EmptySequenceError,
    FormatError,
    GazeForgeError,
    IndexMismatchError,
    IngestError,
    InvalidArgumentsError,
    InvalidCovarianceError,
    MalformedResponseError,
    ShapeMismatchError,
    UndefinedMetricError,
)
from .maps import (
    FixationSet,
    SaliencyMap,
    empirical_saliency,
    max_normalize,
    normalize_to_distribution,
    resample_map,
)
from .mixture import (
    Gaussian2D,
    GaussianMixtureSpec,
    mixture_from_dict,
    mixture_to_dict,
    render_mixture,
)
from .transform import Transform2D, transform_mixture
from .metrics import (
    MetricReport,
    auc_judd,
    cc,
    evaluate_pair,
    kl_divergence,
    nss,
    sim,
)
from .embedding import HashedBigramEmbedder, RemoteEmbedder, TextEmbedder, default_embedder
from .index import GuidanceIndex, GuidanceRecord, ingest, load_index, scan
from .correction import (
    CorrectionOptions,
    CorrectionResult,
    author_suppression,
    correct,
    correct_to_reference,
    objective,
    retrieve_reference,
)
from .display import (
    DISPLAY_PRESETS,
    DisplayConfig,
    EccentricityProfile,
    eccentricity_map,
    fit_mixture_to_map,
    retarget,
)
from .video import (
    SaliencySequence,
    evaluate_sequence,
    read_sseq,
    smooth_temporal,
    write_sseq,
)
from .gateway import (
    BackendConfig,
    GenerationClient,
    GenerationRequest,
    GenerationResponse,
    MockBackend,
    SaliencyPredictorClient,
    StubSaliencyPredictor,
    stub_predict,
)

__version__ = "0.1.0"
