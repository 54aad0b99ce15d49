"""ccnet: yearly transaction-graph analytics for mutual-credit community currencies."""

from .ledger import (
    BinaryDigraph,
    FlowStats,
    ParseError,
    Transaction,
    TransactionSet,
    TxGraph,
    UserRecord,
    build_graph,
    flow_stats,
    parse_transactions,
    slice_by_period,
)
from .bowtie import (
    BowTieLabels,
    CondensedDag,
    SccPartition,
    bowtie_labels,
    component_proportions,
    condense,
    filter_provider_flows,
    scc_centroids,
    strongly_connected_components,
)
from .metrics import (
    CycleCapExceeded,
    CycleCensus,
    TriadCensus,
    cycle_census,
    local_clustering,
    reciprocity,
    reciprocity_by_type,
    reciprocity_strata,
    triad_census,
)
from .nullmodel import (
    AsymmetryIndices,
    KsResult,
    RewireConfig,
    asymmetry_indices,
    boxplot_summary,
    degree_preserving_rewire,
    ensemble_metric,
    ks_two_sample,
    null_condensation_report,
)
from .multilayer import LayerPartition, LayerReport, layer_report, partition_layers
from .geocluster import ZoneMatrix, sector_matrix, zone_matrix, zone_of
from .synthgen import SynthConfig, generate_ledger

__version__ = "0.1.0"
