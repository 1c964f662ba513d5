use super::policy::{dl_policy, Policy};
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::joint::{mutual_information, JointTable, ScoreSource};
use std::sync::atomic::{AtomicU64, Ordering};

/// Evaluates the local description-length score of candidate policies for
/// one node, with the data-dependent joints precomputed once.
///
/// The score of a policy with `k1` blocks is
///
/// ```text
///   (m1-1) H((k1-1)/(m1-1)) + log2 k1
/// + (log2 m)/2 [ ||Pi|| (k1-1) + sum_children ||Pi_j*|| (||X_j||-1) ]
/// - m [ I(X*, Pi) + sum_children I(X_j, Pi_j*) ]
/// ```
///
/// where starred quantities use the discretized node. The scorer counts its
/// evaluations so searches can report exact evaluation budgets.
pub struct LocalScorer {
    node: usize,
    m1: u32,
    m: f64,
    /// ||Pi|| of the node being discretized (1 when parentless).
    parent_configs: u64,
    parent_vars: Vec<usize>,
    parent_joint: Option<JointTable>,
    child_terms: Vec<ChildTerm>,
    evals: AtomicU64,
}

struct ChildTerm {
    child: usize,
    child_card: u32,
    /// Product of the child's parent cardinalities excluding the search node.
    other_configs: u64,
    parent_vars: Vec<usize>,
    joint: JointTable,
}

impl LocalScorer {
    pub fn new<S: ScoreSource + ?Sized>(source: &S, dag: &Dag, node: usize) -> Result<Self> {
        if dag.node_count() != source.var_count() {
            return Err(Error::SizeMismatch(format!(
                "graph has {} nodes, source has {} variables",
                dag.node_count(),
                source.var_count()
            )));
        }
        if node >= dag.node_count() {
            return Err(Error::Domain(format!(
                "node {} out of range for {} nodes",
                node + 1,
                dag.node_count()
            )));
        }
        let parent_vars = dag.parents(node).to_vec();
        let parent_configs = parent_vars
            .iter()
            .map(|&p| u64::from(source.cardinality(p)))
            .product();
        let parent_joint = if parent_vars.is_empty() {
            None
        } else {
            let mut vars = parent_vars.clone();
            vars.push(node);
            vars.sort_unstable();
            Some(source.joint(&vars)?)
        };
        let mut child_terms = Vec::new();
        for &child in dag.children(node) {
            let child_parents = dag.parents(child).to_vec();
            let other_configs = child_parents
                .iter()
                .filter(|&&p| p != node)
                .map(|&p| u64::from(source.cardinality(p)))
                .product();
            let mut vars = child_parents.clone();
            vars.push(child);
            vars.sort_unstable();
            child_terms.push(ChildTerm {
                child,
                child_card: source.cardinality(child),
                other_configs,
                parent_vars: child_parents,
                joint: source.joint(&vars)?,
            });
        }
        Ok(LocalScorer {
            node,
            m1: source.cardinality(node),
            m: source.sample_size(),
            parent_configs,
            parent_vars,
            parent_joint,
            child_terms,
            evals: AtomicU64::new(0),
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn sample_size(&self) -> f64 {
        self.m
    }

    /// Number of `score` calls so far.
    pub fn evaluations(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    fn check(&self, p: &Policy) -> Result<()> {
        if p.node() != self.node {
            return Err(Error::PolicyMismatch(format!(
                "policy targets node {}, scorer bound to node {}",
                p.node() + 1,
                self.node + 1
            )));
        }
        if p.m1() != self.m1 {
            return Err(Error::PolicyMismatch(format!(
                "policy spans {} values, node has {}",
                p.m1(),
                self.m1
            )));
        }
        Ok(())
    }

    /// The information the discretized node shares with its parents plus
    /// what each child shares with its (partly discretized) parent set.
    pub fn info_sum(&self, p: &Policy) -> Result<f64> {
        self.check(p)?;
        let mut info = 0.0;
        if let Some(joint) = &self.parent_joint {
            let agg = joint.aggregate(self.node, p)?;
            info += mutual_information(&agg, &[self.node], &self.parent_vars)?;
        }
        for term in &self.child_terms {
            let agg = term.joint.aggregate(self.node, p)?;
            info += mutual_information(&agg, &[term.child], &term.parent_vars)?;
        }
        Ok(info)
    }

    /// The local description-length score of `p`.
    pub fn score(&self, p: &Policy) -> Result<f64> {
        self.check(p)?;
        self.evals.fetch_add(1, Ordering::Relaxed);
        let k1 = p.k1();
        let mut bracket = self.parent_configs as f64 * f64::from(k1 - 1);
        for term in &self.child_terms {
            bracket +=
                (term.other_configs * u64::from(k1)) as f64 * f64::from(term.child_card - 1);
        }
        let info = self.info_sum(p)?;
        Ok(dl_policy(self.m1, k1)?
            + f64::from(k1).log2()
            + 0.5 * self.m.log2() * bracket
            - self.m * info)
    }
}

/// One-shot local description-length score of `p` for `node`.
pub fn dl_local<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
    p: &Policy,
) -> Result<f64> {
    LocalScorer::new(source, dag, node)?.score(p)
}

/// One-shot information sum of `p` for `node` (zero for a disconnected node).
pub fn info_sum<S: ScoreSource + ?Sized>(
    source: &S,
    dag: &Dag,
    node: usize,
    p: &Policy,
) -> Result<f64> {
    LocalScorer::new(source, dag, node)?.info_sum(p)
}
