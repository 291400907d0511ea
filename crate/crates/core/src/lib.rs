//! Network-wide gain of memory-assisted source coding.
//!
//! A single content server sits in a connected Erdős–Rényi graph and some
//! vertices act as memory units. A memory that has memorized earlier traffic
//! compresses the server-to-memory leg of later flows by a factor `g`, which
//! changes the cheapest route to each destination. This crate provides:
//!
//! - [`graph`]: connected `G(N, p)` sampling and exact hop distances.
//! - [`memnet`]: effective distances and walks, bit×hop flow, network gain,
//!   benefit sets and the closed-form threshold/gain predictions.
//! - [`memcoder`]: an empirical estimate of `g` itself, using a KT-driven
//!   order-1 universal coder with and without a memorized context, plus an
//!   arithmetic coder that realizes those code lengths losslessly.
//! - [`harness`]: seeded Monte Carlo sweeps and CSV/JSON table output.

// `!(x > 0.0)` style checks are used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod graph;
pub mod harness;
pub mod memcoder;
pub mod memnet;
pub mod seed;

pub use graph::{
    average_distance, bfs_distances, generate_er, DistanceField, Graph, GraphError,
    RandomGraphSpec, VertexId,
};
pub use harness::{
    run_coding_experiment, run_network_sweep, CodingConfig, CodingRow, ExperimentConfig,
    HarnessError, OutputFormat, SweepAggregate, SweepResult, SweepRow, TheoryRow,
};
pub use memcoder::{
    codelength_no_mem, codelength_with_mem, estimate_g, estimate_q, kt_codelength, roundtrip,
    sample_source, CodelengthReport, CoderError, ContextModel, GainEstimate, GainParams,
    MarkovSource, Symbol,
};
pub use memnet::{
    benefit_set, effective_distances, effective_walk, network_gain, predicted_radius, theory_gain,
    threshold_memories, total_flow, vertex_boundary, BenefitSet, Deployment,
    EffectiveDistanceField, FlowSummary, MemnetError, TheoryGain,
};
