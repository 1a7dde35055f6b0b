"""Topic discovery for biomedical abstracts: LDA and embedding-cluster tracks."""

from ._core import (
    Document,
    ClusterResult,
    TopicModel,
    build_query,
    read_corpus,
    write_corpus,
    curate,
    tokenize,
    prepare_tokens,
    train_lda,
    heldout_log_likelihood,
    cv_coherence,
    npmi,
    umap_reduce,
    fit_ab,
    hdbscan,
    reassign_outliers,
    outlier_ratio,
    ctfidf,
    jsd,
    validate_config,
    run_pipeline,
)

__all__ = [
    "Document",
    "ClusterResult",
    "TopicModel",
    "build_query",
    "read_corpus",
    "write_corpus",
    "curate",
    "tokenize",
    "prepare_tokens",
    "train_lda",
    "heldout_log_likelihood",
    "cv_coherence",
    "npmi",
    "umap_reduce",
    "fit_ab",
    "hdbscan",
    "reassign_outliers",
    "outlier_ratio",
    "ctfidf",
    "jsd",
    "validate_config",
    "run_pipeline",
]
