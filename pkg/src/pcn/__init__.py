"""Procedure call networks: extraction from C sources and Google matrix analysis."""

__version__ = "0.1.0"

from .correlation import (
    CorrelationReport,
    CriticalSet,
    JointHistogram,
    correlator,
    critical_set,
    joint_histogram,
    product_histogram,
)
from .extractor import (
    CallRecord,
    CorpusNotFoundError,
    EmptyCorpusError,
    ExtractionReport,
    ExtractorConfig,
    ProcedureDef,
    Token,
    TokenKind,
    build_pcn,
    extract_calls,
    extract_definitions,
    tokenize,
)
from .graph import (
    CallGraph,
    DegreeHistogram,
    FitError,
    PowerLawFit,
    degree_sequence,
    fit_power_law,
    log_binned_histogram,
)
from .io import GraphFormatError, load_edge_list, load_graph, save_graph
from .rank import (
    GoogleParams,
    RankVector,
    StochasticOperator,
    build_stochastic,
    influence_pagerank,
    pagerank,
    rank_decay_fit,
)
from .spectrum import (
    DenseLimitError,
    SpectrumResult,
    densify_google,
    eigenvalues_arnoldi,
    eigenvalues_dense,
    google_spectrum,
    spectral_fraction,
)
