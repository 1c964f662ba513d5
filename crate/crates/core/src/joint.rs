//! Exact joint probability tables over subsets of nodes, mutual
//! information, and the `ScoreSource` abstraction that lets discretization
//! searches run on either sampled data or a closed-form distribution.

use crate::dataset::DiscreteDataset;
use crate::error::{Error, Result};
use crate::simulate::ExplosionSpec;

/// A joint probability table over a sorted list of variables. Cells are
/// indexed mixed-radix with the first (lowest-id) variable fastest-varying.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<usize>,
    cards: Vec<u32>,
    probs: Vec<f64>,
}

impl JointTable {
    /// Builds a table; `vars` must be strictly increasing and `probs` must
    /// hold one nonnegative entry per cell with total mass near 1.
    pub fn new(vars: Vec<usize>, cards: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Domain("joint table over no variables".into()));
        }
        if !vars.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "joint table variables must be strictly increasing".into(),
            ));
        }
        if cards.len() != vars.len() {
            return Err(Error::SizeMismatch(format!(
                "{} cardinalities for {} variables",
                cards.len(),
                vars.len()
            )));
        }
        let cells: usize = cards.iter().map(|&c| c as usize).product();
        if probs.len() != cells {
            return Err(Error::SizeMismatch(format!(
                "{} probabilities for {cells} cells",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Domain("negative or non-finite probability".into()));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Domain(format!("total mass {mass}, expected 1")));
        }
        Ok(JointTable { vars, cards, probs })
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn cards(&self) -> &[u32] {
        &self.cards
    }

    /// Position of `var` within this table, if present.
    pub fn axis_of(&self, var: usize) -> Option<usize> {
        self.vars.binary_search(&var).ok()
    }

    pub fn n_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Probability of one cell, addressed by 0-based values in `vars` order.
    pub fn prob(&self, values: &[u32]) -> f64 {
        assert_eq!(values.len(), self.vars.len());
        let mut index = 0usize;
        let mut stride = 1usize;
        for (axis, &v) in values.iter().enumerate() {
            index += v as usize * stride;
            stride *= self.cards[axis] as usize;
        }
        self.probs[index]
    }

    /// Sums the table down to the given (sorted) subset of its variables.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointTable> {
        if keep.is_empty() {
            return Err(Error::Domain("cannot marginalize to no variables".into()));
        }
        let axes: Vec<usize> = keep
            .iter()
            .map(|&v| {
                self.axis_of(v).ok_or_else(|| {
                    Error::Domain(format!("variable {v} is not in the table"))
                })
            })
            .collect::<Result<_>>()?;
        if keep.len() == self.vars.len() {
            return Ok(self.clone());
        }
        let out_cards: Vec<u32> = axes.iter().map(|&a| self.cards[a]).collect();
        let cells: usize = out_cards.iter().map(|&c| c as usize).product();
        let mut probs = vec![0.0; cells];
        self.for_each_cell(|values, p| {
            let mut index = 0usize;
            let mut stride = 1usize;
            for (k, &a) in axes.iter().enumerate() {
                index += values[a] as usize * stride;
                stride *= out_cards[k] as usize;
            }
            probs[index] += p;
        });
        Ok(JointTable {
            vars: keep.to_vec(),
            cards: out_cards,
            probs,
        })
    }

    /// Calls `f` with every cell's values (in `vars` order) and probability.
    pub fn for_each_cell(&self, mut f: impl FnMut(&[u32], f64)) {
        let mut values = vec![0u32; self.cards.len()];
        for &p in &self.probs {
            f(&values, p);
            // mixed-radix increment, axis 0 fastest
            for (axis, v) in values.iter_mut().enumerate() {
                *v += 1;
                if *v < self.cards[axis] {
                    break;
                }
                *v = 0;
            }
        }
    }

    pub(crate) fn from_parts_unchecked(
        vars: Vec<usize>,
        cards: Vec<u32>,
        probs: Vec<f64>,
    ) -> JointTable {
        JointTable { vars, cards, probs }
    }
}

/// Empirical joint relative frequencies of `data` over the (sorted,
/// distinct) node subset `vars`.
pub fn joint_table(data: &DiscreteDataset, vars: &[usize]) -> Result<JointTable> {
    if vars.is_empty() {
        return Err(Error::Domain("empty variable subset".into()));
    }
    if !vars.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain(
            "variable subset must be strictly increasing".into(),
        ));
    }
    if *vars.last().unwrap() >= data.n_cols() {
        return Err(Error::Domain(format!(
            "variable {} out of range",
            vars.last().unwrap()
        )));
    }
    let cards: Vec<u32> = vars.iter().map(|&v| data.cardinality(v)).collect();
    let cells: usize = cards.iter().map(|&c| c as usize).product();
    let mut counts = vec![0u64; cells];
    let m = data.n_rows();
    for row in 0..m {
        let mut index = 0usize;
        let mut stride = 1usize;
        for (axis, &v) in vars.iter().enumerate() {
            index += data.value(row, v) as usize * stride;
            stride *= cards[axis] as usize;
        }
        counts[index] += 1;
    }
    let probs = counts.iter().map(|&c| c as f64 / m as f64).collect();
    Ok(JointTable {
        vars: vars.to_vec(),
        cards,
        probs,
    })
}

/// Exact exploded joint: the target variable's axis is expanded so that the
/// cell for group member `l` of original value `v` carries `q(v, l)` times
/// the original cell mass. Other variables are untouched.
pub fn explode_joint(joint: &JointTable, spec: &ExplosionSpec) -> Result<JointTable> {
    let axis = joint.axis_of(spec.node()).ok_or_else(|| {
        Error::SpecMismatch(format!("node {} is not in the table", spec.node() + 1))
    })?;
    if spec.original_cardinality() != joint.cards[axis] {
        return Err(Error::SpecMismatch(format!(
            "spec covers {} values, axis has cardinality {}",
            spec.original_cardinality(),
            joint.cards[axis]
        )));
    }
    let offsets = spec.offsets();
    let mut cards = joint.cards.clone();
    cards[axis] = spec.exploded_cardinality();
    let cells: usize = cards.iter().map(|&c| c as usize).product();
    let mut probs = vec![0.0; cells];
    let strides = strides_of(&cards);
    joint.for_each_cell(|values, p| {
        let v = values[axis] as usize;
        let mut base = 0usize;
        for (a, &val) in values.iter().enumerate() {
            if a != axis {
                base += val as usize * strides[a];
            }
        }
        for (l, &q) in spec.groups()[v].iter().enumerate() {
            let new_value = offsets[v] as usize + l;
            probs[base + new_value * strides[axis]] = q * p;
        }
    });
    Ok(JointTable {
        vars: joint.vars.clone(),
        cards,
        probs,
    })
}

fn strides_of(cards: &[u32]) -> Vec<usize> {
    let mut strides = Vec::with_capacity(cards.len());
    let mut stride = 1usize;
    for &c in cards {
        strides.push(stride);
        stride *= c as usize;
    }
    strides
}

/// Estimated mutual information (bits) between the variable groups `a` and
/// `b` under `joint`: sum of `p log2(p / (pA pB))` with zero-probability
/// cells contributing zero. Either group being empty yields 0; overlapping
/// groups are an error.
pub fn mutual_information(joint: &JointTable, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::Overlap);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let mut keep: Vec<usize> = a.iter().chain(b).copied().collect();
    keep.sort_unstable();
    let table = if keep == joint.vars {
        joint.clone()
    } else {
        joint.marginal(&keep)?
    };

    let a_axes: Vec<usize> = table
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| a.contains(v))
        .map(|(axis, _)| axis)
        .collect();
    let b_axes: Vec<usize> = table
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| b.contains(v))
        .map(|(axis, _)| axis)
        .collect();
    let project = |axes: &[usize], values: &[u32]| -> usize {
        let mut index = 0usize;
        let mut stride = 1usize;
        for &axis in axes {
            index += values[axis] as usize * stride;
            stride *= table.cards[axis] as usize;
        }
        index
    };
    let a_cells: usize = a_axes.iter().map(|&x| table.cards[x] as usize).product();
    let b_cells: usize = b_axes.iter().map(|&x| table.cards[x] as usize).product();
    let mut pa = vec![0.0; a_cells];
    let mut pb = vec![0.0; b_cells];
    table.for_each_cell(|values, p| {
        pa[project(&a_axes, values)] += p;
        pb[project(&b_axes, values)] += p;
    });
    let mut info = 0.0;
    table.for_each_cell(|values, p| {
        if p > 0.0 {
            let denom = pa[project(&a_axes, values)] * pb[project(&b_axes, values)];
            info += p * (p / denom).log2();
        }
    });
    Ok(info)
}

/// Anything discretization scoring can run against: sampled data (empirical
/// frequencies) or an exact distribution with a nominal sample size.
pub trait ScoreSource: Sync {
    fn var_count(&self) -> usize;
    fn cardinality(&self, var: usize) -> u32;
    /// Effective sample size `m` used by penalty and information terms.
    fn sample_size(&self) -> f64;
    /// Joint table over a sorted subset of variables.
    fn joint(&self, vars: &[usize]) -> Result<JointTable>;
}

impl ScoreSource for DiscreteDataset {
    fn var_count(&self) -> usize {
        self.n_cols()
    }

    fn cardinality(&self, var: usize) -> u32 {
        DiscreteDataset::cardinality(self, var)
    }

    fn sample_size(&self) -> f64 {
        self.n_rows() as f64
    }

    fn joint(&self, vars: &[usize]) -> Result<JointTable> {
        joint_table(self, vars)
    }
}

/// A closed-form joint distribution over all variables plus a nominal sample
/// size, for noise-free (distribution-level) search runs.
#[derive(Debug, Clone)]
pub struct DistributionSource {
    full: JointTable,
    m: f64,
}

impl DistributionSource {
    pub fn new(full: JointTable, m: f64) -> Result<Self> {
        if m.is_nan() || m < 1.0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        Ok(DistributionSource { full, m })
    }

    pub fn table(&self) -> &JointTable {
        &self.full
    }
}

impl ScoreSource for DistributionSource {
    fn var_count(&self) -> usize {
        self.full.vars.len()
    }

    fn cardinality(&self, var: usize) -> u32 {
        let axis = self.full.axis_of(var).expect("variable in table");
        self.full.cards[axis]
    }

    fn sample_size(&self) -> f64 {
        self.m
    }

    fn joint(&self, vars: &[usize]) -> Result<JointTable> {
        self.full.marginal(vars)
    }
}
