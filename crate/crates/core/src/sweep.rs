//! Head-to-head sweep of the top-down search against the exhaustive oracle
//! over randomly generated exploded instances: evaluation counts, wall
//! times, and argmin agreement per distinct-value count.

use crate::discretize::{
    exhaustive_search, penalty_curve, top_down_search, top_down_search_sequential,
};
use crate::error::{Error, Result};
use crate::synth::random_exploded_instance;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub m1_min: u32,
    pub m1_max: u32,
    /// Instances per `m1` level.
    pub reps: u32,
    pub seed: u64,
    /// Nominal sample size for the generated distributions.
    pub m: f64,
    /// Also run the sequential re-baselining removal variant and record
    /// whether it agrees with the simultaneous rule.
    pub compare_variants: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            m1_min: 4,
            m1_max: 12,
            reps: 20,
            seed: 0,
            m: 100_000.0,
            compare_variants: false,
        }
    }
}

/// One instance's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m1: u32,
    pub rep: u32,
    /// Top-down policy equals the exhaustive argmin.
    pub agree: bool,
    /// Top-down policy equals the ground-truth aggregation.
    pub recovers_truth: bool,
    /// Sequential-variant policy equals the simultaneous one (when run).
    pub variant_agree: Option<bool>,
    /// The leading penalty terms are strictly increasing for this instance.
    pub penalty_increasing: bool,
    pub evals_top_down: u64,
    pub evals_exhaustive: u64,
    pub micros_top_down: u64,
    pub micros_exhaustive: u64,
    /// Bar notation of the top-down policy.
    pub policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    /// Fraction of instances where top-down matched the exhaustive argmin.
    pub agreement_rate: f64,
}

impl SweepReport {
    /// Per-`m1` aggregate table.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:>4}  {:>9}  {:>9}  {:>12}  {:>12}  {:>7}\n",
            "m1", "evals td", "evals ex", "mean td (us)", "mean ex (us)", "agree"
        ));
        for m1 in self.config.m1_min..=self.config.m1_max {
            let rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.m1 == m1).collect();
            if rows.is_empty() {
                continue;
            }
            let mean = |f: fn(&SweepRow) -> u64| {
                rows.iter().map(|r| f(r)).sum::<u64>() / rows.len() as u64
            };
            let agree = rows.iter().filter(|r| r.agree).count();
            out.push_str(&format!(
                "{:>4}  {:>9}  {:>9}  {:>12}  {:>12}  {:>4}/{:<2}\n",
                m1,
                rows[0].evals_top_down,
                rows[0].evals_exhaustive,
                mean(|r| r.micros_top_down),
                mean(|r| r.micros_exhaustive),
                agree,
                rows.len()
            ));
        }
        out.push_str(&format!("\nagreement rate: {:.4}\n", self.agreement_rate));
        if self.config.compare_variants {
            let agree = self
                .rows
                .iter()
                .filter(|r| r.variant_agree == Some(true))
                .count();
            out.push_str(&format!(
                "sequential removal variant agrees on {agree}/{} instances\n",
                self.rows.len()
            ));
        }
        out
    }
}

/// Runs the configured sweep. Instances are drawn from one seeded stream, so
/// the report is deterministic in the config.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    if config.m1_min < 2 || config.m1_min > config.m1_max {
        return Err(Error::Domain(format!(
            "bad m1 sweep range {}..={}",
            config.m1_min, config.m1_max
        )));
    }
    if config.reps == 0 {
        return Err(Error::Domain("reps must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut rows = Vec::new();
    for m1 in config.m1_min..=config.m1_max {
        for rep in 0..config.reps {
            let instance = random_exploded_instance(m1, config.m, &mut rng)?;
            let curve = penalty_curve(
                &instance.dag,
                0,
                &[m1, instance.child_card],
                m1,
                config.m,
            )?;

            let start = Instant::now();
            let td = top_down_search(&instance.source, &instance.dag, 0)?;
            let micros_top_down = start.elapsed().as_micros() as u64;

            let start = Instant::now();
            let ex = exhaustive_search(&instance.source, &instance.dag, 0)?;
            let micros_exhaustive = start.elapsed().as_micros() as u64;

            let variant_agree = if config.compare_variants {
                let seq = top_down_search_sequential(&instance.source, &instance.dag, 0)?;
                Some(seq.policy == td.policy)
            } else {
                None
            };

            rows.push(SweepRow {
                m1,
                rep,
                agree: td.policy == ex.policy,
                recovers_truth: td.policy == instance.truth,
                variant_agree,
                penalty_increasing: curve.is_strictly_increasing(),
                evals_top_down: td.evaluations,
                evals_exhaustive: ex.evaluations,
                micros_top_down,
                micros_exhaustive,
                policy: td.policy.bar_notation(),
            });
        }
    }
    let agreement_rate =
        rows.iter().filter(|r| r.agree).count() as f64 / rows.len() as f64;
    Ok(SweepReport {
        config: config.clone(),
        rows,
        agreement_rate,
    })
}
