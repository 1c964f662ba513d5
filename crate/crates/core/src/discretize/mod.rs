//! Discretization policies, their description-length costs, and the search
//! strategies over them.
//!
//! A policy on a node with `m1` ordered distinct values keeps a subset of
//! the `m1 - 1` gaps between consecutive ranks as thresholds; consecutive
//! runs between thresholds collapse to one value each. The local
//! description-length score trades the policy/parameter encoding costs
//! against `m` times the information the discretized node shares with its
//! neighbors; the top-down search minimizes it with `m1` evaluations instead
//! of `2^(m1-1)`.

mod penalty;
mod policy;
mod report;
mod scorer;
mod search;

pub use penalty::{penalty_coefficient, penalty_curve, PenaltyCurve};
pub use policy::{apply_policy, binary_entropy, dl_policy, dl_recover, Policy};
pub use report::{
    cycle_report, discretize_report, CycleNodeReport, CycleReport, DiscretizeReport,
    ExhaustiveAgreement, RemovalScore, ScoredPolicy,
};
pub use scorer::{dl_local, info_sum, LocalScorer};
pub use search::{
    cycle_discretize, exhaustive_search, top_down_search, top_down_search_sequential,
    CycleOutcome, ExhaustiveOutcome, PolicyView, TopDownOutcome,
};

/// Cap on `m1` for exhaustive policy search (`2^(m1-1)` evaluations).
pub const MAX_EXHAUSTIVE_VALUES: u32 = 16;
