use crate::dataset::DiscreteDataset;
use crate::error::{Error, Result};
use crate::joint::JointTable;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A discretization policy for one node: which of the `m1 - 1` gaps between
/// consecutive ranks remain thresholds.
///
/// Gap `t` (for `t` in `1..m1`) separates rank `t` from rank `t + 1`, i.e.
/// 0-based values `t - 1` and `t`. A value `v` (0-based) maps to the block
/// index `#{t in thresholds : t <= v}`, so retaining every gap is the
/// identity mapping and retaining none collapses the column to a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Policy {
    node: usize,
    m1: u32,
    thresholds: Vec<u32>,
}

impl Policy {
    pub fn new(node: usize, m1: u32, mut thresholds: Vec<u32>) -> Result<Self> {
        if m1 == 0 {
            return Err(Error::Domain("a node must have at least one value".into()));
        }
        thresholds.sort_unstable();
        thresholds.dedup();
        if thresholds.iter().any(|&t| t == 0 || t >= m1) {
            return Err(Error::PolicyMismatch(format!(
                "thresholds must lie in 1..{m1}"
            )));
        }
        Ok(Policy {
            node,
            m1,
            thresholds,
        })
    }

    /// All gaps retained: the identity discretization.
    pub fn full(node: usize, m1: u32) -> Self {
        Policy {
            node,
            m1,
            thresholds: (1..m1).collect(),
        }
    }

    /// No gaps retained: everything maps to a single value.
    pub fn single_block(node: usize, m1: u32) -> Self {
        Policy {
            node,
            m1,
            thresholds: Vec::new(),
        }
    }

    /// The policy whose blocks are exactly the given consecutive group sizes.
    pub fn from_group_sizes(node: usize, sizes: &[u32]) -> Self {
        assert!(!sizes.is_empty(), "a policy needs at least one block");
        let m1 = sizes.iter().sum();
        let mut thresholds = Vec::with_capacity(sizes.len().saturating_sub(1));
        let mut acc = 0;
        for &s in &sizes[..sizes.len() - 1] {
            acc += s;
            thresholds.push(acc);
        }
        Policy {
            node,
            m1,
            thresholds,
        }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn m1(&self) -> u32 {
        self.m1
    }

    pub fn thresholds(&self) -> &[u32] {
        &self.thresholds
    }

    /// Number of blocks the policy produces.
    pub fn k1(&self) -> u32 {
        self.thresholds.len() as u32 + 1
    }

    /// Block index (0-based) of a 0-based value.
    pub fn block_of(&self, value: u32) -> u32 {
        debug_assert!(value < self.m1);
        self.thresholds.iter().filter(|&&t| t <= value).count() as u32
    }

    /// This policy with gap `t` dropped.
    pub fn without_threshold(&self, t: u32) -> Policy {
        Policy {
            node: self.node,
            m1: self.m1,
            thresholds: self
                .thresholds
                .iter()
                .copied()
                .filter(|&x| x != t)
                .collect(),
        }
    }

    pub fn contains_threshold(&self, t: u32) -> bool {
        self.thresholds.binary_search(&t).is_ok()
    }

    /// Bar notation over 1-based ranks, e.g. `12|345|6`. Ranks above 9 are
    /// comma-separated within blocks to stay unambiguous.
    pub fn bar_notation(&self) -> String {
        let compact = self.m1 <= 9;
        let mut blocks: Vec<Vec<String>> = vec![Vec::new(); self.k1() as usize];
        for v in 0..self.m1 {
            blocks[self.block_of(v) as usize].push((v + 1).to_string());
        }
        blocks
            .iter()
            .map(|b| b.join(if compact { "" } else { "," }))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// JSON form of a policy; the node is numbered from 1 like every other text
/// interface.
#[derive(Serialize, Deserialize)]
struct PolicyRepr {
    node: usize,
    m1: u32,
    thresholds: Vec<u32>,
}

impl Serialize for Policy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolicyRepr {
            node: self.node + 1,
            m1: self.m1,
            thresholds: self.thresholds.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Policy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolicyRepr::deserialize(deserializer)?;
        if repr.node == 0 {
            return Err(D::Error::custom("nodes are numbered from 1"));
        }
        Policy::new(repr.node - 1, repr.m1, repr.thresholds)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Maps the policy's node to block indices, leaving other columns untouched.
pub fn apply_policy(data: &DiscreteDataset, p: &Policy) -> Result<DiscreteDataset> {
    if p.node() >= data.n_cols() {
        return Err(Error::PolicyMismatch(format!(
            "node {} out of range for {} columns",
            p.node() + 1,
            data.n_cols()
        )));
    }
    if p.m1() != data.cardinality(p.node()) {
        return Err(Error::PolicyMismatch(format!(
            "policy spans {} values, column has cardinality {}",
            p.m1(),
            data.cardinality(p.node())
        )));
    }
    let column = data.column(p.node()).iter().map(|&v| p.block_of(v)).collect();
    Ok(data.with_column(p.node(), p.k1(), column))
}

impl JointTable {
    /// Sums the axis of `var` down to the policy's blocks.
    pub fn aggregate(&self, var: usize, p: &Policy) -> Result<JointTable> {
        let axis = self
            .axis_of(var)
            .ok_or_else(|| Error::PolicyMismatch(format!("variable {var} not in table")))?;
        if self.cards()[axis] != p.m1() {
            return Err(Error::PolicyMismatch(format!(
                "policy spans {} values, axis has cardinality {}",
                p.m1(),
                self.cards()[axis]
            )));
        }
        let mut cards = self.cards().to_vec();
        cards[axis] = p.k1();
        let cells: usize = cards.iter().map(|&c| c as usize).product();
        let mut probs = vec![0.0; cells];
        let mut strides = Vec::with_capacity(cards.len());
        let mut stride = 1usize;
        for &c in &cards {
            strides.push(stride);
            stride *= c as usize;
        }
        self.for_each_cell(|values, prob| {
            let mut index = 0usize;
            for (a, &v) in values.iter().enumerate() {
                let v = if a == axis { p.block_of(v) } else { v };
                index += v as usize * strides[a];
            }
            probs[index] += prob;
        });
        Ok(JointTable::from_parts_unchecked(
            self.vars().to_vec(),
            cards,
            probs,
        ))
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("entropy argument {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Bits reserved to encode which of the `C(m1-1, k1-1)` threshold
/// configurations was chosen: `(m1-1) H((k1-1)/(m1-1))`, an entropy upper
/// bound on the exact binomial log.
pub fn dl_policy(m1: u32, k1: u32) -> Result<f64> {
    if k1 < 1 || k1 > m1 {
        return Err(Error::Domain(format!(
            "block count {k1} outside 1..={m1}"
        )));
    }
    if m1 == 1 {
        return Ok(0.0);
    }
    let gaps = f64::from(m1 - 1);
    Ok(gaps * binary_entropy(f64::from(k1 - 1) / gaps)?)
}

/// Bits to recover the original column from its discretized version:
/// `-sum_rows log2 P(X | X*)` with conditionals estimated from the column.
pub fn dl_recover(data: &DiscreteDataset, node: usize, p: &Policy) -> Result<f64> {
    if node >= data.n_cols() || p.node() != node {
        return Err(Error::PolicyMismatch(format!(
            "policy targets node {}, asked about node {}",
            p.node() + 1,
            node + 1
        )));
    }
    if p.m1() != data.cardinality(node) {
        return Err(Error::PolicyMismatch(format!(
            "policy spans {} values, column has cardinality {}",
            p.m1(),
            data.cardinality(node)
        )));
    }
    let mut value_counts = vec![0u64; p.m1() as usize];
    for &v in data.column(node) {
        value_counts[v as usize] += 1;
    }
    let mut block_counts = vec![0u64; p.k1() as usize];
    for (v, &c) in value_counts.iter().enumerate() {
        block_counts[p.block_of(v as u32) as usize] += c;
    }
    let mut bits = 0.0;
    for (v, &c) in value_counts.iter().enumerate() {
        if c > 0 {
            let block = block_counts[p.block_of(v as u32) as usize];
            bits += c as f64 * ((block as f64).log2() - (c as f64).log2());
        }
    }
    Ok(bits)
}
