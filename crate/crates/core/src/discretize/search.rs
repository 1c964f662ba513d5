use super::policy::Policy;
use super::scorer::LocalScorer;
use super::MAX_EXHAUSTIVE_VALUES;
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::Dag;
use crate::joint::{JointTable, ScoreSource};

/// Result of the single-threshold top-down search.
#[derive(Debug, Clone)]
pub struct TopDownOutcome {
    /// The thresholds retained after all single-removal comparisons.
    pub policy: Policy,
    /// Score of the full discretization (all thresholds in place).
    pub baseline: f64,
    /// `removal_scores[j - 1]` is the score with only gap `j` removed.
    pub removal_scores: Vec<f64>,
    /// Exact number of score evaluations performed (`m1`).
    pub evaluations: u64,
}

/// Compares the full discretization against every single-threshold removal
/// and drops each gap whose removal does not worsen the score. Exact ties
/// favor removal, so superfluous values aggregate. Costs exactly `m1`
/// evaluations.
pub fn top_down_search<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
) -> Result<TopDownOutcome> {
    let scorer = LocalScorer::new(source, dag, node)?;
    let m1 = scorer.m1();
    let full = Policy::full(node, m1);
    let baseline = scorer.score(&full)?;
    let removal_scores: Vec<f64> = collect_results(exec::map_range(m1 as usize - 1, |idx| {
        scorer.score(&full.without_threshold(idx as u32 + 1))
    }))?;
    let retained: Vec<u32> = removal_scores
        .iter()
        .enumerate()
        .filter(|(_, &score)| score > baseline)
        .map(|(idx, _)| idx as u32 + 1)
        .collect();
    Ok(TopDownOutcome {
        policy: Policy::new(node, m1, retained)?,
        baseline,
        removal_scores,
        evaluations: scorer.evaluations(),
    })
}

/// Sequential re-baselining variant: gaps are visited in order and each
/// accepted removal becomes the new baseline before the next comparison.
/// Same `m1` evaluation budget; exposed for head-to-head comparison runs.
pub fn top_down_search_sequential<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
) -> Result<TopDownOutcome> {
    let scorer = LocalScorer::new(source, dag, node)?;
    let m1 = scorer.m1();
    let mut current = Policy::full(node, m1);
    let mut baseline = scorer.score(&current)?;
    let first_baseline = baseline;
    let mut removal_scores = Vec::with_capacity(m1 as usize - 1);
    for j in 1..m1 {
        let candidate = current.without_threshold(j);
        let score = scorer.score(&candidate)?;
        removal_scores.push(score);
        if score <= baseline {
            current = candidate;
            baseline = score;
        }
    }
    Ok(TopDownOutcome {
        policy: current,
        baseline: first_baseline,
        removal_scores,
        evaluations: scorer.evaluations(),
    })
}

/// Result of the exhaustive policy search.
#[derive(Debug, Clone)]
pub struct ExhaustiveOutcome {
    pub policy: Policy,
    pub score: f64,
    /// Exact number of score evaluations performed (`2^(m1-1)`).
    pub evaluations: u64,
}

/// Scores every one of the `2^(m1-1)` threshold subsets and returns the
/// minimizer. Ties break toward fewer thresholds, then the lexicographically
/// smallest threshold set. Capped at `m1 <= 16`.
pub fn exhaustive_search<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
) -> Result<ExhaustiveOutcome> {
    let scorer = LocalScorer::new(source, dag, node)?;
    let m1 = scorer.m1();
    if m1 > MAX_EXHAUSTIVE_VALUES {
        return Err(Error::TooLarge {
            what: "distinct value count for exhaustive search",
            value: m1 as usize,
            max: MAX_EXHAUSTIVE_VALUES as usize,
        });
    }
    let gaps = m1 - 1;
    let total = 1usize << gaps;
    let scores: Vec<f64> = collect_results(exec::map_range(total, |mask| {
        scorer.score(&policy_from_mask(node, m1, mask as u32))
    }))?;
    let mut best = 0usize;
    for mask in 1..total {
        if better_policy(scores[mask], mask as u32, scores[best], best as u32) {
            best = mask;
        }
    }
    Ok(ExhaustiveOutcome {
        policy: policy_from_mask(node, m1, best as u32),
        score: scores[best],
        evaluations: scorer.evaluations(),
    })
}

fn policy_from_mask(node: usize, m1: u32, mask: u32) -> Policy {
    let thresholds = (0..m1 - 1)
        .filter(|&bit| mask >> bit & 1 == 1)
        .map(|bit| bit + 1)
        .collect();
    Policy::new(node, m1, thresholds).expect("mask thresholds are in range")
}

fn better_policy(score_a: f64, mask_a: u32, score_b: f64, mask_b: u32) -> bool {
    match score_a.total_cmp(&score_b) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            let (ka, kb) = (mask_a.count_ones(), mask_b.count_ones());
            if ka != kb {
                return ka < kb;
            }
            mask_thresholds(mask_a) < mask_thresholds(mask_b)
        }
    }
}

fn mask_thresholds(mask: u32) -> Vec<u32> {
    (0..32).filter(|&bit| mask >> bit & 1 == 1).collect()
}

fn collect_results(results: Vec<Result<f64>>) -> Result<Vec<f64>> {
    results.into_iter().collect()
}

/// A score source with some variables viewed through their current policies.
/// The variable under search is left at full resolution.
pub struct PolicyView<'a, S: ScoreSource + ?Sized> {
    base: &'a S,
    overrides: Vec<Option<Policy>>,
}

impl<'a, S: ScoreSource + ?Sized> PolicyView<'a, S> {
    pub fn new(base: &'a S) -> Self {
        let overrides = vec![None; base.var_count()];
        PolicyView { base, overrides }
    }

    pub fn set(&mut self, node: usize, policy: Option<Policy>) -> Result<()> {
        if node >= self.overrides.len() {
            return Err(Error::Domain(format!("node {} out of range", node + 1)));
        }
        if let Some(p) = &policy {
            if p.node() != node {
                return Err(Error::PolicyMismatch(format!(
                    "policy targets node {}, assigned to node {}",
                    p.node() + 1,
                    node + 1
                )));
            }
            if p.m1() != self.base.cardinality(node) {
                return Err(Error::PolicyMismatch(format!(
                    "policy spans {} values, node has {}",
                    p.m1(),
                    self.base.cardinality(node)
                )));
            }
        }
        self.overrides[node] = policy;
        Ok(())
    }
}

impl<S: ScoreSource + ?Sized> ScoreSource for PolicyView<'_, S> {
    fn var_count(&self) -> usize {
        self.base.var_count()
    }

    fn cardinality(&self, var: usize) -> u32 {
        match &self.overrides[var] {
            Some(p) => p.k1(),
            None => self.base.cardinality(var),
        }
    }

    fn sample_size(&self) -> f64 {
        self.base.sample_size()
    }

    fn joint(&self, vars: &[usize]) -> Result<JointTable> {
        let mut table = self.base.joint(vars)?;
        for &v in vars {
            if let Some(p) = &self.overrides[v] {
                table = table.aggregate(v, p)?;
            }
        }
        Ok(table)
    }
}

/// Result of cycling the top-down search over several nodes.
#[derive(Debug, Clone)]
pub struct CycleOutcome {
    /// Final policy per requested node, in request order.
    pub policies: Vec<Policy>,
    /// Full passes performed.
    pub passes: usize,
    /// True if the last pass changed nothing.
    pub converged: bool,
}

/// Round-robin top-down search: each node is re-searched with every other
/// node held at its current policy, until a full pass changes nothing or
/// `max_passes` is reached. `initial` (aligned with `nodes`) seeds the
/// starting policies; by default every node starts undiscretized.
pub fn cycle_discretize<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    nodes: &[usize],
    max_passes: usize,
    initial: Option<&[Policy]>,
) -> Result<CycleOutcome> {
    if nodes.is_empty() {
        return Err(Error::Domain("no nodes to discretize".into()));
    }
    if max_passes == 0 {
        return Err(Error::Domain("max_passes must be at least 1".into()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for &v in nodes {
        if v >= source.var_count() {
            return Err(Error::Domain(format!("node {} out of range", v + 1)));
        }
        if !seen.insert(v) {
            return Err(Error::Domain(format!("node {} listed twice", v + 1)));
        }
    }
    let mut current: Vec<Policy> = match initial {
        Some(policies) => {
            if policies.len() != nodes.len() {
                return Err(Error::SizeMismatch(format!(
                    "{} initial policies for {} nodes",
                    policies.len(),
                    nodes.len()
                )));
            }
            for (p, &v) in policies.iter().zip(nodes) {
                if p.node() != v || p.m1() != source.cardinality(v) {
                    return Err(Error::PolicyMismatch(format!(
                        "initial policy for node {} does not match",
                        v + 1
                    )));
                }
            }
            policies.to_vec()
        }
        None => nodes
            .iter()
            .map(|&v| Policy::full(v, source.cardinality(v)))
            .collect(),
    };
    let mut passes = 0;
    let mut converged = false;
    while passes < max_passes {
        passes += 1;
        let mut changed = false;
        for (idx, &v) in nodes.iter().enumerate() {
            let mut view = PolicyView::new(source);
            for (other_idx, &other) in nodes.iter().enumerate() {
                if other != v {
                    view.set(other, Some(current[other_idx].clone()))?;
                }
            }
            let outcome = top_down_search(&view, dag, v)?;
            if outcome.policy != current[idx] {
                current[idx] = outcome.policy;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }
    }
    Ok(CycleOutcome {
        policies: current,
        passes,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{explode_joint, DistributionSource, JointTable};
    use crate::simulate::ExplosionSpec;

    /// The exploded two-node instance: node 0 (card 3, exploded to 6) is the
    /// parent of node 1 (card 3).
    fn exploded_instance() -> (DistributionSource, Dag) {
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
        let source = DistributionSource::new(exploded, 100_000.0).unwrap();
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        (source, dag)
    }

    #[test]
    fn top_down_recovers_the_correct_discretization() {
        let (source, dag) = exploded_instance();
        let outcome = top_down_search(&source, &dag, 0).unwrap();
        assert_eq!(outcome.policy.thresholds(), &[2, 5]);
        assert_eq!(outcome.policy.bar_notation(), "12|345|6");
        assert_eq!(outcome.evaluations, 6);
        assert_eq!(outcome.removal_scores.len(), 5);
    }

    #[test]
    fn sequential_variant_agrees_on_exact_instances() {
        let (source, dag) = exploded_instance();
        let a = top_down_search(&source, &dag, 0).unwrap();
        let b = top_down_search_sequential(&source, &dag, 0).unwrap();
        assert_eq!(a.policy, b.policy);
        assert_eq!(b.evaluations, 6);
    }

    #[test]
    fn exhaustive_agrees_with_top_down() {
        let (source, dag) = exploded_instance();
        let td = top_down_search(&source, &dag, 0).unwrap();
        let ex = exhaustive_search(&source, &dag, 0).unwrap();
        assert_eq!(ex.policy, td.policy);
        assert_eq!(ex.evaluations, 32);
    }

    #[test]
    fn exhaustive_minimal_cases() {
        let table =
            JointTable::new(vec![0, 1], vec![2, 2], vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let src = DistributionSource::new(table, 10_000.0).unwrap();
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        let ex = exhaustive_search(&src, &dag, 0).unwrap();
        assert_eq!(ex.evaluations, 2);
        // The two values are genuinely distinct, so the gap stays.
        assert_eq!(ex.policy.thresholds(), &[1]);
    }

    #[test]
    fn exhaustive_cap() {
        let cells = 17 * 2;
        let table = JointTable::new(
            vec![0, 1],
            vec![17, 2],
            vec![1.0 / cells as f64; cells],
        )
        .unwrap();
        let src = DistributionSource::new(table, 100.0).unwrap();
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            exhaustive_search(&src, &dag, 0),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn single_value_node_yields_empty_policy() {
        let table = JointTable::new(vec![0, 1], vec![1, 2], vec![0.5, 0.5]).unwrap();
        let src = DistributionSource::new(table, 100.0).unwrap();
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        let outcome = top_down_search(&src, &dag, 0).unwrap();
        assert!(outcome.policy.thresholds().is_empty());
        assert_eq!(outcome.evaluations, 1);
    }

    #[test]
    fn disconnected_node_collapses_at_large_m() {
        // With no neighbors the score is pure penalty, minimized by one block.
        let table = JointTable::new(
            vec![0, 1],
            vec![4, 2],
            vec![0.1, 0.15, 0.2, 0.05, 0.1, 0.15, 0.2, 0.05],
        )
        .unwrap();
        let src = DistributionSource::new(table, 100_000.0).unwrap();
        let dag = Dag::empty(2).unwrap();
        let ex = exhaustive_search(&src, &dag, 0).unwrap();
        assert!(ex.policy.thresholds().is_empty());
    }

    #[test]
    fn cycle_single_node_matches_top_down() {
        let (source, dag) = exploded_instance();
        let cycle = cycle_discretize(&source, &dag, &[0], 5, None).unwrap();
        let td = top_down_search(&source, &dag, 0).unwrap();
        assert_eq!(cycle.policies, vec![td.policy]);
        assert!(cycle.converged);
        // Pass 1 changes the policy, pass 2 confirms the fixed point.
        assert_eq!(cycle.passes, 2);
    }

    #[test]
    fn cycle_from_fixed_point_converges_in_one_pass() {
        let (source, dag) = exploded_instance();
        let first = cycle_discretize(&source, &dag, &[0], 5, None).unwrap();
        let again =
            cycle_discretize(&source, &dag, &[0], 5, Some(&first.policies)).unwrap();
        assert_eq!(again.policies, first.policies);
        assert_eq!(again.passes, 1);
        assert!(again.converged);
    }

    #[test]
    fn tie_break_prefers_fewer_then_lexicographic() {
        // Equal scores: fewer thresholds win.
        assert!(better_policy(1.0, 0b001, 1.0, 0b011));
        assert!(!better_policy(1.0, 0b011, 1.0, 0b001));
        // Same count: lexicographically smaller threshold set wins.
        // {1, 4} = 0b1001 beats {2, 3} = 0b0110.
        assert!(better_policy(1.0, 0b1001, 1.0, 0b0110));
        assert!(!better_policy(1.0, 0b0110, 1.0, 0b1001));
        // Score dominates everything else.
        assert!(better_policy(0.5, 0b111, 1.0, 0b000));
    }

    #[test]
    fn cycle_rejects_bad_arguments() {
        let (source, dag) = exploded_instance();
        assert!(cycle_discretize(&source, &dag, &[], 5, None).is_err());
        assert!(cycle_discretize(&source, &dag, &[0, 0], 5, None).is_err());
        assert!(cycle_discretize(&source, &dag, &[0], 0, None).is_err());
    }
}
