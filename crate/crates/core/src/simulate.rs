//! Forward sampling from a fully specified network and the "explosion"
//! construction that splits one node's values into superfluous ones with
//! known replacement probabilities.
//!
//! All randomness comes from a ChaCha8 stream seeded with a caller-provided
//! `u64`, one stream per run. `sample` draws one uniform per node per row,
//! rows outermost, nodes in the lexicographically smallest topological
//! order. `explode` draws one uniform per row. This makes outputs
//! byte-identical across platforms for a fixed seed.

use crate::dataset::{parent_config_index, DiscreteDataset};
use crate::error::{Error, Result};
use crate::graph::Dag;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A Bayesian network with full conditional probability tables, ready to
/// sample from.
#[derive(Debug, Clone)]
pub struct BnSpec {
    dag: Dag,
    names: Vec<String>,
    cards: Vec<u32>,
    /// cpt[i][j] is the distribution of node i under parent configuration j
    /// (mixed-radix order, lowest-indexed parent fastest).
    cpt: Vec<Vec<Vec<f64>>>,
}

impl BnSpec {
    pub fn new(
        dag: Dag,
        names: Vec<String>,
        cards: Vec<u32>,
        cpt: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = dag.node_count();
        if names.len() != n || cards.len() != n || cpt.len() != n {
            return Err(Error::SizeMismatch(format!(
                "expected {n} names, cardinalities and CPT blocks"
            )));
        }
        for (i, node_cpt) in cpt.iter().enumerate() {
            let expect_rows = dag.parent_config_count(i, &cards) as usize;
            if node_cpt.len() != expect_rows {
                return Err(Error::InvalidSpec(format!(
                    "node {} needs {} CPT rows, found {}",
                    i + 1,
                    expect_rows,
                    node_cpt.len()
                )));
            }
            for (j, row) in node_cpt.iter().enumerate() {
                if row.len() != cards[i] as usize {
                    return Err(Error::InvalidSpec(format!(
                        "node {} config {} needs {} probabilities",
                        i + 1,
                        j + 1,
                        cards[i]
                    )));
                }
                if row.iter().any(|&p| !(0.0..=1.0 + ROW_SUM_TOLERANCE).contains(&p)) {
                    return Err(Error::InvalidSpec(format!(
                        "node {} config {} has a probability outside [0, 1]",
                        i + 1,
                        j + 1
                    )));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::InvalidSpec(format!(
                        "node {} config {} sums to {total}, expected 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(BnSpec {
            dag,
            names,
            cards,
            cpt,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cards
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BnSpecFile = serde_json::from_str(text)?;
        let names: Vec<String> = file.nodes.iter().map(|d| d.name.clone()).collect();
        let cards: Vec<u32> = file.nodes.iter().map(|d| d.card).collect();
        let mut edges = Vec::with_capacity(file.edges.len());
        for &(p, c) in &file.edges {
            if p == 0 || c == 0 {
                return Err(Error::InvalidSpec(
                    "edge endpoints are numbered from 1".into(),
                ));
            }
            edges.push((p - 1, c - 1));
        }
        let dag = Dag::new(names.len(), &edges)?;
        BnSpec::new(dag, names, cards, file.cpt)
    }

    pub fn to_json(&self) -> String {
        let file = BnSpecFile {
            nodes: self
                .names
                .iter()
                .zip(&self.cards)
                .map(|(name, &card)| NodeDecl {
                    name: name.clone(),
                    card,
                })
                .collect(),
            edges: self
                .dag
                .edges()
                .into_iter()
                .map(|(p, c)| (p + 1, c + 1))
                .collect(),
            cpt: self.cpt.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }
}

/// On-disk JSON form of [`BnSpec`]: nodes in order, edges as 1-based
/// `[parent, child]` pairs, and per-node CPT rows in parent-configuration
/// order (lowest-indexed parent fastest-varying).
#[derive(Debug, Serialize, Deserialize)]
struct BnSpecFile {
    nodes: Vec<NodeDecl>,
    edges: Vec<(usize, usize)>,
    cpt: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeDecl {
    name: String,
    card: u32,
}

/// Draws `m` rows from `spec` by forward sampling. Deterministic in
/// `(spec, m, seed)`.
pub fn sample(spec: &BnSpec, m: usize, seed: u64) -> Result<DiscreteDataset> {
    if m == 0 {
        return Err(Error::EmptyData);
    }
    let order = spec
        .dag
        .topological_order()
        .expect("validated DAG has a topological order");
    let n = spec.dag.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut columns = vec![vec![0u32; m]; n];
    #[allow(clippy::needless_range_loop)] // rows stride across several columns
    for row in 0..m {
        for &i in &order {
            let j = parent_config_index(spec.dag.parents(i), &spec.cards, |p| columns[p][row]);
            let u: f64 = rng.gen();
            columns[i][row] = pick(&spec.cpt[i][j], u);
        }
    }
    DiscreteDataset::new(spec.cards.clone(), columns)
}

/// Inverse-CDF draw over one probability row.
fn pick(row: &[f64], u: f64) -> u32 {
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k as u32;
        }
    }
    (row.len() - 1) as u32
}

/// Replacement plan for one node: original value `v` (0-based position)
/// becomes one of `groups[v].len()` consecutive new values, drawn with the
/// listed probabilities. Replacement ranges are laid out in order, so the
/// new cardinality is the total group length.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplosionSpec {
    node: usize,
    groups: Vec<Vec<f64>>,
}

impl ExplosionSpec {
    pub fn new(node: usize, groups: Vec<Vec<f64>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::SpecMismatch("no groups".into()));
        }
        for (v, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::SpecMismatch(format!("value {} has no group", v + 1)));
            }
            if group.iter().any(|&q| q < 0.0) {
                return Err(Error::SpecMismatch(format!(
                    "value {} has a negative probability",
                    v + 1
                )));
            }
            let total: f64 = group.iter().sum();
            if (total - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::SpecMismatch(format!(
                    "value {} group sums to {total}, expected 1",
                    v + 1
                )));
            }
        }
        Ok(ExplosionSpec { node, groups })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn group_sizes(&self) -> Vec<u32> {
        self.groups.iter().map(|g| g.len() as u32).collect()
    }

    /// Cardinality before the explosion.
    pub fn original_cardinality(&self) -> u32 {
        self.groups.len() as u32
    }

    /// Cardinality after the explosion.
    pub fn exploded_cardinality(&self) -> u32 {
        self.groups.iter().map(|g| g.len() as u32).sum()
    }

    /// First exploded value (0-based) of each group.
    pub fn offsets(&self) -> Vec<u32> {
        let mut offsets = Vec::with_capacity(self.groups.len());
        let mut acc = 0u32;
        for g in &self.groups {
            offsets.push(acc);
            acc += g.len() as u32;
        }
        offsets
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ExplosionFile = serde_json::from_str(text)?;
        if file.node == 0 {
            return Err(Error::InvalidSpec("nodes are numbered from 1".into()));
        }
        ExplosionSpec::new(file.node - 1, file.groups)
    }

    pub fn to_json(&self) -> String {
        let file = ExplosionFile {
            node: self.node + 1,
            groups: self.groups.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spec serializes")
    }
}

/// On-disk JSON form of [`ExplosionSpec`]; `node` is 1-based.
#[derive(Debug, Serialize, Deserialize)]
struct ExplosionFile {
    node: usize,
    groups: Vec<Vec<f64>>,
}

/// Replaces each instance of the target node's values independently per
/// `spec`, leaving other columns untouched. One uniform is drawn per row in
/// row order; deterministic in `(data, spec, seed)`.
pub fn explode(data: &DiscreteDataset, spec: &ExplosionSpec, seed: u64) -> Result<DiscreteDataset> {
    if spec.node >= data.n_cols() {
        return Err(Error::SpecMismatch(format!(
            "node {} out of range for {} columns",
            spec.node + 1,
            data.n_cols()
        )));
    }
    if spec.original_cardinality() != data.cardinality(spec.node) {
        return Err(Error::SpecMismatch(format!(
            "spec covers {} values, column has cardinality {}",
            spec.original_cardinality(),
            data.cardinality(spec.node)
        )));
    }
    let offsets = spec.offsets();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let column = data
        .column(spec.node)
        .iter()
        .map(|&v| {
            let u: f64 = rng.gen();
            offsets[v as usize] + pick(&spec.groups[v as usize], u)
        })
        .collect();
    Ok(data.with_column(spec.node, spec.exploded_cardinality(), column))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_hot_spec() -> BnSpec {
        let dag = Dag::new(2, &[(0, 1)]).unwrap();
        BnSpec::new(
            dag,
            vec!["a".into(), "b".into()],
            vec![2, 2],
            vec![
                vec![vec![0.0, 1.0]],
                vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            ],
        )
        .unwrap()
    }

    #[test]
    fn deterministic_cpts_force_rows() {
        let data = sample(&one_hot_spec(), 50, 3).unwrap();
        for row in 0..50 {
            assert_eq!(data.value(row, 0), 1);
            assert_eq!(data.value(row, 1), 1);
        }
    }

    #[test]
    fn same_seed_same_sample() {
        let dag = Dag::empty(1).unwrap();
        let spec = BnSpec::new(
            dag,
            vec!["x".into()],
            vec![2],
            vec![vec![vec![0.5, 0.5]]],
        )
        .unwrap();
        let a = sample(&spec, 100, 42).unwrap();
        let b = sample(&spec, 100, 42).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, 100, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn marginal_frequency_concentrates() {
        let dag = Dag::empty(1).unwrap();
        let spec = BnSpec::new(
            dag,
            vec!["x".into()],
            vec![2],
            vec![vec![vec![0.3, 0.7]]],
        )
        .unwrap();
        let data = sample(&spec, 100_000, 7).unwrap();
        let ones = data.column(0).iter().filter(|&&v| v == 0).count();
        let freq = ones as f64 / 100_000.0;
        assert!((freq - 0.3).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn invalid_cpt_rejected() {
        let dag = Dag::empty(1).unwrap();
        assert!(matches!(
            BnSpec::new(dag.clone(), vec!["x".into()], vec![2], vec![vec![vec![0.6, 0.6]]]),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            BnSpec::new(dag, vec!["x".into()], vec![2], vec![vec![vec![1.0]]]),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn bnspec_json_round_trip() {
        let spec = one_hot_spec();
        let round = BnSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(round.names(), spec.names());
        assert_eq!(round.cardinalities(), spec.cardinalities());
        assert_eq!(round.dag().edges(), spec.dag().edges());
    }

    fn paper_explosion() -> ExplosionSpec {
        ExplosionSpec::new(
            0,
            vec![
                vec![1.0 / 3.0, 2.0 / 3.0],
                vec![2.0 / 7.0, 4.0 / 7.0, 1.0 / 7.0],
                vec![1.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn explosion_extends_cardinality() {
        let spec = paper_explosion();
        assert_eq!(spec.exploded_cardinality(), 6);
        assert_eq!(spec.offsets(), vec![0, 2, 5]);
        let data =
            DiscreteDataset::from_rows(vec![3], &[vec![1], vec![2], vec![3], vec![2]]).unwrap();
        let out = explode(&data, &spec, 11).unwrap();
        assert_eq!(out.cardinality(0), 6);
        // Original value 3 maps deterministically to exploded value 6.
        assert_eq!(out.value(2, 0), 5);
        // Values stay within their groups.
        assert!(out.value(0, 0) <= 1);
        assert!((2..=4).contains(&out.value(1, 0)));
    }

    #[test]
    fn singleton_groups_are_identity() {
        let data = DiscreteDataset::from_rows(vec![3], &[vec![1], vec![3], vec![2]]).unwrap();
        let spec = ExplosionSpec::new(0, vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let out = explode(&data, &spec, 5).unwrap();
        assert_eq!(out, data);
    }

    #[test]
    fn explosion_replacement_frequencies() {
        // P(exploded = 4) / P(original = 2) should approach q(2, 2) = 4/7.
        let dag = Dag::empty(1).unwrap();
        let spec = BnSpec::new(
            dag,
            vec!["x".into()],
            vec![3],
            vec![vec![vec![0.3, 0.4, 0.3]]],
        )
        .unwrap();
        let data = sample(&spec, 100_000, 9).unwrap();
        let originals_2 = data.column(0).iter().filter(|&&v| v == 1).count();
        let out = explode(&data, &paper_explosion(), 10).unwrap();
        let exploded_4 = out.column(0).iter().filter(|&&v| v == 3).count();
        let ratio = exploded_4 as f64 / originals_2 as f64;
        assert!((ratio - 4.0 / 7.0).abs() < 0.02, "ratio = {ratio}");
    }

    #[test]
    fn explosion_spec_mismatch() {
        let data = DiscreteDataset::from_rows(vec![4], &[vec![1], vec![4]]).unwrap();
        let spec = paper_explosion();
        assert!(matches!(
            explode(&data, &spec, 1),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn explosion_json_round_trip() {
        let spec = paper_explosion();
        let round = ExplosionSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(round, spec);
    }
}
