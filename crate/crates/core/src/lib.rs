//! Scoring and minimum-description-length discretization for discrete
//! Bayesian networks.
//!
//! The crate covers the full loop of a small structure-learning study:
//!
//! - build or enumerate candidate DAGs and test Markov equivalence
//!   ([`graph`]);
//! - load CSV data, relabel values to ranks, count sufficient statistics,
//!   forward-sample from a specified network, and "explode" a node's values
//!   into superfluous ones with known replacement probabilities
//!   ([`dataset`], [`simulate`], [`joint`]);
//! - score networks with log-likelihood, AIC, BIC, or a two-part description
//!   length, and recover the best candidates up to Markov equivalence
//!   ([`scoring`]);
//! - search for the discretization of a node that minimizes the local
//!   description-length score, either exhaustively over all `2^(m1-1)`
//!   threshold subsets or with the `m1`-evaluation single-threshold top-down
//!   strategy, and compare the two ([`discretize`], [`sweep`]).
//!
//! Candidate scoring and policy evaluation are data-parallel via rayon under
//! the default `parallel` feature; disabling it yields a sequential build
//! with identical results.

pub mod dataset;
pub mod discretize;
mod error;
mod exec;
pub mod graph;
pub mod joint;
pub mod scoring;
pub mod simulate;
pub mod sweep;
pub mod synth;

pub use dataset::{
    counts, load_csv, parse_csv, relabel, write_csv, CountTable, DiscreteDataset, RawDataset,
    ValueMap,
};
pub use discretize::{
    apply_policy, cycle_discretize, dl_local, exhaustive_search, info_sum, penalty_curve,
    top_down_search, Policy,
};
pub use error::{Error, Result};
pub use graph::{enumerate_dags, equivalence_key, markov_equivalent, Dag};
pub use joint::{
    explode_joint, joint_table, mutual_information, DistributionSource, JointTable, ScoreSource,
};
pub use scoring::{
    dl_data, dl_net, log_likelihood, mle_theta, recover, score_network, Criterion, ScoreReport,
};
pub use simulate::{explode, sample, BnSpec, ExplosionSpec};
