//! Serializable reports for discretization runs: the single-node listing
//! (baseline, every single removal, the chosen policy) and the multi-node
//! cycling summary.

use super::policy::Policy;
use super::scorer::dl_local;
use super::search::{cycle_discretize, exhaustive_search, top_down_search};
use crate::error::Result;
use crate::graph::Dag;
use crate::joint::ScoreSource;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPolicy {
    pub policy: Policy,
    pub bars: String,
    pub dl_local: f64,
}

impl ScoredPolicy {
    fn new(policy: Policy, dl_local: f64) -> Self {
        let bars = policy.bar_notation();
        ScoredPolicy {
            policy,
            bars,
            dl_local,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalScore {
    /// The gap removed from the full discretization.
    pub gap: u32,
    pub bars: String,
    pub dl_local: f64,
    /// True if the comparison dropped this threshold.
    pub removed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustiveAgreement {
    pub result: ScoredPolicy,
    pub evaluations: u64,
    pub agrees: bool,
}

/// Full single-node report: the baseline score, every single-removal score,
/// the chosen policy with its own score, and (optionally) the exhaustive
/// argmin for comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizeReport {
    /// 1-based node index.
    pub node: usize,
    pub m1: u32,
    pub sample_size: f64,
    pub baseline: ScoredPolicy,
    pub removals: Vec<RemovalScore>,
    pub chosen: ScoredPolicy,
    pub exhaustive: Option<ExhaustiveAgreement>,
}

/// Runs the top-down search for `node` and assembles the report; with
/// `with_exhaustive` the full search runs too and its argmin is compared.
pub fn discretize_report<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
    with_exhaustive: bool,
) -> Result<DiscretizeReport> {
    let outcome = top_down_search(source, dag, node)?;
    let m1 = outcome.policy.m1();
    let full = Policy::full(node, m1);
    let removals = outcome
        .removal_scores
        .iter()
        .enumerate()
        .map(|(idx, &score)| {
            let gap = idx as u32 + 1;
            RemovalScore {
                gap,
                bars: full.without_threshold(gap).bar_notation(),
                dl_local: score,
                removed: score <= outcome.baseline,
            }
        })
        .collect();
    let chosen_score = if outcome.policy == full {
        outcome.baseline
    } else {
        dl_local(source, dag, node, &outcome.policy)?
    };
    let exhaustive = if with_exhaustive {
        let ex = exhaustive_search(source, dag, node)?;
        Some(ExhaustiveAgreement {
            agrees: ex.policy == outcome.policy,
            result: ScoredPolicy::new(ex.policy, ex.score),
            evaluations: ex.evaluations,
        })
    } else {
        None
    };
    Ok(DiscretizeReport {
        node: node + 1,
        m1,
        sample_size: source.sample_size(),
        baseline: ScoredPolicy::new(full, outcome.baseline),
        removals,
        chosen: ScoredPolicy::new(outcome.policy, chosen_score),
        exhaustive,
    })
}

impl DiscretizeReport {
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "node {}: {} distinct values, m = {}\n\n",
            self.node, self.m1, self.sample_size
        ));
        if self.m1 == 1 {
            out.push_str("single value; nothing to discretize\n");
            return out;
        }
        let width = self
            .removals
            .iter()
            .map(|r| r.bars.len())
            .chain([self.baseline.bars.len(), self.chosen.bars.len()])
            .max()
            .unwrap_or(10)
            .max(14);
        out.push_str(&format!(
            "{:<width$}  {:>14}\n",
            "discretization", "dl_local"
        ));
        out.push_str(&format!(
            "{:<width$}  {:>14.2}  (baseline)\n",
            self.baseline.bars, self.baseline.dl_local
        ));
        for r in &self.removals {
            out.push_str(&format!(
                "{:<width$}  {:>14.2}  {}\n",
                r.bars,
                r.dl_local,
                if r.removed { "removed" } else { "kept" }
            ));
        }
        out.push_str(&format!(
            "\nchosen: {}  dl_local = {:.2}\n",
            self.chosen.bars, self.chosen.dl_local
        ));
        if let Some(ex) = &self.exhaustive {
            out.push_str(&format!(
                "top-down == exhaustive: {} ({} evaluations, argmin {} at {:.2})\n",
                ex.agrees, ex.evaluations, ex.result.bars, ex.result.dl_local
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleNodeReport {
    /// 1-based node index.
    pub node: usize,
    pub policy: Policy,
    pub bars: String,
}

/// Summary of a round-robin discretization run over several nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub passes: usize,
    pub converged: bool,
    pub nodes: Vec<CycleNodeReport>,
}

pub fn cycle_report<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    nodes: &[usize],
    max_passes: usize,
) -> Result<CycleReport> {
    let outcome = cycle_discretize(source, dag, nodes, max_passes, None)?;
    Ok(CycleReport {
        passes: outcome.passes,
        converged: outcome.converged,
        nodes: nodes
            .iter()
            .zip(outcome.policies)
            .map(|(&node, policy)| {
                let bars = policy.bar_notation();
                CycleNodeReport {
                    node: node + 1,
                    policy,
                    bars,
                }
            })
            .collect(),
    })
}

impl CycleReport {
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "cycled {} node(s): {} pass(es), converged = {}\n",
            self.nodes.len(),
            self.passes,
            self.converged
        ));
        for n in &self.nodes {
            out.push_str(&format!("  node {}: {}\n", n.node, n.bars));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{explode_joint, DistributionSource, JointTable};
    use crate::simulate::ExplosionSpec;

    fn exploded_source() -> (DistributionSource, Dag) {
        let theta = [0.3, 0.4, 0.3];
        let rows = [
            [0.6, 0.3, 0.1],
            [0.2, 0.5, 0.3],
            [0.1, 0.2, 0.7],
        ];
        let mut probs = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                probs[i + 3 * j] = theta[i] * rows[i][j];
            }
        }
        let base = JointTable::new(vec![0, 1], vec![3, 3], probs).unwrap();
        let spec = ExplosionSpec::new(
            0,
            vec![
                vec![1.0 / 3.0, 2.0 / 3.0],
                vec![2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0],
                vec![1.0],
            ],
        )
        .unwrap();
        let exploded = explode_joint(&base, &spec).unwrap();
        (
            DistributionSource::new(exploded, 100_000.0).unwrap(),
            Dag::new(2, &[(0, 1)]).unwrap(),
        )
    }

    #[test]
    fn report_layout_and_round_trip() {
        let (source, dag) = exploded_source();
        let report = discretize_report(&source, &dag, 0, true).unwrap();
        assert_eq!(report.node, 1);
        assert_eq!(report.m1, 6);
        assert_eq!(report.removals.len(), 5);
        assert_eq!(report.chosen.bars, "12|345|6");
        let ex = report.exhaustive.as_ref().unwrap();
        assert!(ex.agrees);
        assert_eq!(ex.evaluations, 32);
        // The chosen policy scores below every listed alternative.
        for r in &report.removals {
            assert!(report.chosen.dl_local < r.dl_local);
        }
        let text = report.text_table();
        assert!(text.contains("12|345|6"));
        assert!(text.contains("top-down == exhaustive: true"));

        let json = serde_json::to_string(&report).unwrap();
        let round: DiscretizeReport = serde_json::from_str(&json).unwrap();
        assert_eq!(round, report);
    }

    #[test]
    fn cycle_report_round_trip() {
        let (source, dag) = exploded_source();
        let report = cycle_report(&source, &dag, &[0, 1], 5).unwrap();
        assert!(report.converged);
        assert_eq!(report.nodes.len(), 2);
        assert_eq!(report.nodes[0].bars, "12|345|6");
        let json = serde_json::to_string(&report).unwrap();
        let round: CycleReport = serde_json::from_str(&json).unwrap();
        assert_eq!(round, report);
    }
}
