//! Higher-order network models built from observed path data.
//!
//! A [`PathCorpus`] of node sequences is turned into fixed-order
//! [`HigherOrderNetwork`] layers and a stacked [`MultiOrderModel`]. On top of
//! those the crate provides likelihood-ratio order selection, structural
//! metrics, higher-order PageRank, next-node prediction and cross-scenario
//! comparison metrics.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the
//! command-line front end live in the `honkit` crate.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod analytics;
pub mod compare;
pub mod corpus;
mod error;
pub mod graph;
pub mod hon;
pub mod prediction;
pub mod ranking;
pub mod selection;
pub mod special;
pub mod synth;

pub use analytics::{
    degree_distribution, multi_order_reports, structural_report, DegreeDirection,
    DegreeDistribution, ReportOptions, StructuralReport,
};
pub use compare::{
    comparison_report, cosine_similarity, feature_vectors, kl_divergence, CompareConfig,
    ComparisonReport, FeatureVector, Metric,
};
pub use corpus::{CorpusBuilder, NodeIndex, Path, PathCorpus, PathStats};
pub use error::{Error, Result};
pub use graph::{adj_power_stats, first_order_graph, AdjPowerStats, Graph};
pub use hon::{build_hon, build_multi_order, HigherOrderNetwork, HonEdge, MultiOrderModel};
pub use prediction::{predict_next, prediction_accuracy, AccuracyReport, Prediction};
pub use ranking::{
    aggregate_pagerank, hon_pagerank, kendall_tau, pagerank_alignment, AlignmentPoint,
    PageRankOptions, PageRankResult,
};
pub use selection::{
    degrees_of_freedom, log_likelihood, lrt, optimal_order, LrtResult, OrderSelection,
};
pub use synth::{generate_corpus, random_planted_chain, PlantedChain};
