"""Active graph embedding: GCN training with active-learning node selection.

Thin wrapper over the C++ core; see the project README for the file formats
and the experiment workflow.
"""

from age._core import (
    AgeError,
    Dataset,
    ExperimentConfig,
    ExperimentReport,
    Graph,
    SeededRng,
    TrialResult,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    harmonic_centrality,
    kmeans,
    load_dataset,
    macro_f1,
    micro_f1,
    pagerank,
    percentile,
    run_experiment,
    sample_beta_1_n,
    sample_time_weights,
)

__all__ = [
    "AgeError",
    "Dataset",
    "ExperimentConfig",
    "ExperimentReport",
    "Graph",
    "SeededRng",
    "TrialResult",
    "betweenness_centrality",
    "closeness_centrality",
    "degree_centrality",
    "harmonic_centrality",
    "kmeans",
    "load_dataset",
    "macro_f1",
    "micro_f1",
    "pagerank",
    "percentile",
    "run_experiment",
    "sample_beta_1_n",
    "sample_time_weights",
]
