use super::policy::dl_policy;
use crate::error::{Error, Result};
use crate::graph::Dag;

/// The policy-independent leading terms of the local score, written as a
/// function of the block count:
///
/// ```text
/// D(k1) = (m1-1) H((k1-1)/(m1-1)) + log2 k1 + (log2 m)/2 (c k1 - ||Pi||)
/// ```
///
/// When `D` is strictly increasing the leading terms act as a pure penalty,
/// so minimizing the local score reduces to maximizing information with the
/// fewest thresholds. `c` is zero exactly when the node is isolated; in that
/// case the entropy bump makes `D` non-monotone no matter the sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyCurve {
    m1: u32,
    m: f64,
    c: f64,
    parent_configs: u64,
    values: Vec<f64>,
}

impl PenaltyCurve {
    /// Samples `D(k1)` for `k1 = 1..=m1` with an explicit coefficient.
    pub fn from_coefficient(c: f64, parent_configs: u64, m1: u32, m: f64) -> Result<Self> {
        if m1 == 0 {
            return Err(Error::Domain("m1 must be at least 1".into()));
        }
        if m.is_nan() || m < 1.0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        if c < 0.0 {
            return Err(Error::Domain("penalty coefficient must be nonnegative".into()));
        }
        let half_log_m = 0.5 * m.log2();
        let values = (1..=m1)
            .map(|k1| {
                dl_policy(m1, k1).expect("k1 in range")
                    + f64::from(k1).log2()
                    + half_log_m * (c * f64::from(k1) - parent_configs as f64)
            })
            .collect();
        Ok(PenaltyCurve {
            m1,
            m,
            c,
            parent_configs,
            values,
        })
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn sample_size(&self) -> f64 {
        self.m
    }

    /// Linear coefficient of `k1` inside the bracketed parameter cost.
    pub fn coefficient(&self) -> f64 {
        self.c
    }

    /// Sampled `D(1)..=D(m1)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] > w[0])
    }
}

/// The coefficient `c` and constant `||Pi||` of the node's bracketed
/// parameter cost `c k1 - ||Pi||`.
///
/// A connected parentless node contributes its single parameter row, so `c`
/// starts at 1 there; an isolated node has no cost tied to the rest of the
/// network and gets `c = 0`.
pub fn penalty_coefficient(dag: &Dag, node: usize, cards: &[u32]) -> (f64, u64) {
    let parent_configs = dag.parent_config_count(node, cards);
    let child_sum: f64 = dag
        .children(node)
        .iter()
        .map(|&j| {
            let others: u64 = dag
                .parents(j)
                .iter()
                .filter(|&&p| p != node)
                .map(|&p| u64::from(cards[p]))
                .product();
            others as f64 * f64::from(cards[j] - 1)
        })
        .sum();
    let c = if dag.is_connected(node) {
        parent_configs as f64 + child_sum
    } else {
        0.0
    };
    (c, parent_configs)
}

/// Samples the penalty curve of `node` within `dag`, deriving `c` from the
/// structure. `cards` are the cardinalities of the *other* nodes; `m1` is
/// the discretized node's own distinct-value count.
pub fn penalty_curve(dag: &Dag, node: usize, cards: &[u32], m1: u32, m: f64) -> Result<PenaltyCurve> {
    if node >= dag.node_count() {
        return Err(Error::Domain(format!("node {} out of range", node + 1)));
    }
    if cards.len() != dag.node_count() {
        return Err(Error::SizeMismatch(format!(
            "{} cardinalities for {} nodes",
            cards.len(),
            dag.node_count()
        )));
    }
    let (c, parent_configs) = penalty_coefficient(dag, node, cards);
    PenaltyCurve::from_coefficient(c, parent_configs, m1, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolated_node_has_zero_coefficient() {
        let dag = Dag::empty(2).unwrap();
        let (c, _) = penalty_coefficient(&dag, 0, &[4, 3]);
        assert_eq!(c, 0.0);
    }

    #[test]
    fn fork_coefficient() {
        // Parentless node with two card-3 children: 1 + 2 + 2.
        let dag = Dag::new(3, &[(0, 1), (0, 2)]).unwrap();
        let (c, parent_configs) = penalty_coefficient(&dag, 0, &[6, 3, 3]);
        assert_eq!(c, 5.0);
        assert_eq!(parent_configs, 1);
    }

    #[test]
    fn coefficient_with_parents_and_coparents() {
        // node 2 has parents {0, 1}; node 0 also feeds node 3 jointly with 1.
        let dag = Dag::new(4, &[(0, 2), (1, 2), (0, 3), (1, 3)]).unwrap();
        let cards = [5, 4, 3, 2];
        let (c, parent_configs) = penalty_coefficient(&dag, 0, &cards);
        // ||Pi_0|| is empty => 1; children 2 and 3 contribute
        // (3-1)*4 and (2-1)*4.
        assert_eq!(parent_configs, 1);
        assert_eq!(c, 1.0 + 8.0 + 4.0);
        let (c2, pc2) = penalty_coefficient(&dag, 2, &cards);
        assert_eq!(pc2, 20);
        assert_eq!(c2, 20.0);
    }

    #[test]
    fn curve_increases_for_connected_nodes_at_large_m() {
        let curve = PenaltyCurve::from_coefficient(1.0, 1, 64, 1e5).unwrap();
        assert!(curve.is_strictly_increasing());
    }

    #[test]
    fn curve_dips_when_isolated() {
        // The entropy bump beats log2(k1) near k1 = m1 once c = 0.
        let curve = PenaltyCurve::from_coefficient(0.0, 1, 64, 1e5).unwrap();
        assert!(!curve.is_strictly_increasing());
    }

    #[test]
    fn curve_from_graph() {
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        let curve = penalty_curve(&dag, 0, &[6, 3], 6, 1e5).unwrap();
        assert_eq!(curve.coefficient(), 3.0);
        assert!(curve.is_strictly_increasing());
        assert_eq!(curve.values().len(), 6);
    }
}
