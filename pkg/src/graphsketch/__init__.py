"""Real-time seed expansion and community detection on large graphs.

Neighbourhood sets are compressed into fixed-length minhash signatures,
indexed with banded locality-sensitive hashing, and queried interactively:
seeds expand into a ranked set of similar accounts, which can then be
embedded in a weighted similarity graph and partitioned into communities.
"""

from .community import (
    CommunityMap,
    WeightedSubgraph,
    build_weighted_subgraph,
    modularity,
    walktrap,
)
from .errors import (
    EdgeListParseError,
    EmptyDatasetError,
    GraphSketchError,
    IncompatibleSignatureError,
    InvalidParameterError,
    InvalidPartitionError,
    SizeLimitError,
)
from .evaluate import (
    AccountGraph,
    PprParams,
    auc,
    cohesiveness,
    conductance,
    conductance_ratio,
    density,
    estimator_error_experiment,
    internal_external_weights,
    observed_account_graph,
    personalized_pagerank,
    rank_correlation_experiment,
    recall_curve,
    separability,
    weighted_clustering,
)
from .expansion import (
    ExpansionResult,
    SeedSet,
    StopKind,
    StopReason,
    StoppingRule,
    expand_ac,
    expand_ms,
    make_stopping_rule,
)
from .ingest import (
    Dataset,
    GroundTruth,
    NeighborSet,
    exact_jaccard,
    generate_planted_partition,
    load_dataset,
    load_edge_list,
    save_dataset,
)
from .lsh import BandingConfig, CandidateSet, LshIndex, build_index, query_candidates
from .service import Engine, create_app
from .sketch import (
    HashFamily,
    JaccardEstimate,
    Signature,
    SignatureMatrix,
    build_signatures,
    coverage_trace,
    estimate_jaccard,
    estimator_variance,
    load_signatures,
    save_signatures,
    union_cardinality,
    union_signature,
)

__version__ = "0.1.0"
