//! Random distribution-exact exploded instances with a known correct
//! discretization, used by the oracle-agreement sweeps and the bench
//! subcommand.
//!
//! Each instance is a two-node network (node 0 parent of node 1) whose base
//! distribution is exploded at node 0. Generator floors keep the instances
//! well separated: base marginals and group probabilities stay bounded away
//! from zero and conditional rows are rejection-sampled to pairwise total
//! variation at least 0.3, so the information lost by any cross-group merge
//! dwarfs the penalty change at the nominal sample size.

use crate::discretize::Policy;
use crate::error::Result;
use crate::graph::Dag;
use crate::joint::{explode_joint, DistributionSource, JointTable};
use crate::simulate::ExplosionSpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Largest group size the generator will produce.
const MAX_GROUP: u32 = 6;

/// A generated instance: the exploded two-node distribution, its graph, and
/// the ground-truth policy that undoes the explosion.
#[derive(Debug, Clone)]
pub struct ExplodedInstance {
    pub dag: Dag,
    pub source: DistributionSource,
    pub base: JointTable,
    pub explosion: ExplosionSpec,
    pub truth: Policy,
    pub base_card: u32,
    pub child_card: u32,
}

/// Draws an instance whose exploded node has exactly `m1` values and whose
/// nominal sample size is `m`. Deterministic in the RNG state.
pub fn random_exploded_instance(
    m1: u32,
    m: f64,
    rng: &mut ChaCha8Rng,
) -> Result<ExplodedInstance> {
    assert!(m1 >= 2, "an exploded node needs at least two values");
    let min_groups = m1.div_ceil(MAX_GROUP).max(2);
    let max_groups = 3.min(m1);
    let base_card = if min_groups >= max_groups {
        min_groups
    } else {
        rng.gen_range(min_groups..=max_groups)
    };
    let child_card = rng.gen_range(2u32..=3);

    let sizes = random_group_sizes(m1, base_card, rng);
    let theta = floored_simplex(base_card as usize, 0.5, rng);
    let rows = separated_rows(base_card as usize, child_card as usize, rng);

    let mut probs = vec![0.0; (base_card * child_card) as usize];
    for i in 0..base_card as usize {
        for j in 0..child_card as usize {
            probs[i + base_card as usize * j] = theta[i] * rows[i][j];
        }
    }
    let base = JointTable::new(vec![0, 1], vec![base_card, child_card], probs)?;

    let groups: Vec<Vec<f64>> = sizes
        .iter()
        .map(|&len| {
            if len == 1 {
                vec![1.0]
            } else {
                floored_simplex(len as usize, 0.5, rng)
            }
        })
        .collect();
    let explosion = ExplosionSpec::new(0, groups)?;
    let exploded = explode_joint(&base, &explosion)?;
    let truth = Policy::from_group_sizes(0, &sizes);
    Ok(ExplodedInstance {
        dag: Dag::new(2, &[(0, 1)])?,
        source: DistributionSource::new(exploded, m)?,
        base,
        explosion,
        truth,
        base_card,
        child_card,
    })
}

/// Splits `total` into `parts` sizes, each in `1..=MAX_GROUP`.
fn random_group_sizes(total: u32, parts: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut sizes = vec![1u32; parts as usize];
    let mut remaining = total - parts;
    while remaining > 0 {
        let idx = rng.gen_range(0..parts as usize);
        if sizes[idx] < MAX_GROUP {
            sizes[idx] += 1;
            remaining -= 1;
        }
    }
    sizes
}

/// A random distribution mixed with the uniform one, so every entry is at
/// least `uniform_weight / len`.
fn floored_simplex(len: usize, uniform_weight: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter()
        .map(|&x| (1.0 - uniform_weight) * x / total + uniform_weight / len as f64)
        .collect()
}

/// Conditional rows rejection-sampled to pairwise total variation >= 0.3.
fn separated_rows(n_rows: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    const MIN_TV: f64 = 0.3;
    'outer: for _ in 0..10_000 {
        let rows: Vec<Vec<f64>> = (0..n_rows)
            .map(|_| floored_simplex(len, 0.2, rng))
            .collect();
        for a in 0..n_rows {
            for b in a + 1..n_rows {
                if total_variation(&rows[a], &rows[b]) < MIN_TV {
                    continue 'outer;
                }
            }
        }
        return rows;
    }
    // Deterministic fallback: spread point masses across the range.
    (0..n_rows)
        .map(|i| {
            let peak = i * (len - 1) / (n_rows - 1).max(1);
            (0..len)
                .map(|j| if j == peak { 0.7 } else { 0.3 / (len - 1) as f64 })
                .collect()
        })
        .collect()
}

pub(crate) fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
}
