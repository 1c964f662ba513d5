//! Maximum-likelihood estimation and whole-network scores: log-likelihood,
//! AIC, BIC, and the two-part description length (network + data).
//!
//! AIC and BIC are reported in natural-log units; description lengths are in
//! bits. Ceilings are dropped everywhere, so all lengths are real-valued.

use crate::dataset::{counts, parent_config_index, CountTable, DiscreteDataset};
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{equivalence_key, Dag};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Which score ranks candidates in [`recover`]. LL is maximized, the other
/// three are minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Ll,
    Aic,
    Bic,
    Mdl,
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ll" => Ok(Criterion::Ll),
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            "mdl" => Ok(Criterion::Mdl),
            other => Err(Error::Domain(format!("unknown criterion `{other}`"))),
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Criterion::Ll => "ll",
            Criterion::Aic => "aic",
            Criterion::Bic => "bic",
            Criterion::Mdl => "mdl",
        };
        f.write_str(s)
    }
}

/// Maximum-likelihood estimates `theta_ijk = n_ijk / n_ij.`; rows for parent
/// configurations never observed are left undefined rather than imputed.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    rows: Vec<Vec<Option<Vec<f64>>>>,
}

impl ThetaTable {
    /// Estimated distribution of `node` under parent configuration `config`,
    /// or `None` if that configuration never occurs.
    pub fn row(&self, node: usize, config: usize) -> Option<&[f64]> {
        self.rows[node][config].as_deref()
    }

    pub fn theta(&self, node: usize, config: usize, value: usize) -> Option<f64> {
        self.rows[node][config].as_ref().map(|r| r[value])
    }
}

/// Estimates every theta row from a count table.
pub fn mle_theta(ct: &CountTable) -> ThetaTable {
    let rows = (0..ct.n_nodes())
        .map(|i| {
            (0..ct.config_len(i))
                .map(|j| {
                    let total = ct.config_count(i, j);
                    if total == 0 {
                        return None;
                    }
                    Some(
                        (0..ct.cardinality(i) as usize)
                            .map(|k| ct.count(i, j, k) as f64 / total as f64)
                            .collect(),
                    )
                })
                .collect()
        })
        .collect();
    ThetaTable { rows }
}

/// Maximized log-likelihood in both bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLik {
    pub nats: f64,
    pub bits: f64,
}

fn log_lik_from_counts(ct: &CountTable) -> LogLik {
    let mut nats = 0.0;
    for i in 0..ct.n_nodes() {
        for j in 0..ct.config_len(i) {
            let total = ct.config_count(i, j);
            if total == 0 {
                continue;
            }
            let ln_total = (total as f64).ln();
            for k in 0..ct.cardinality(i) as usize {
                let n = ct.count(i, j, k);
                if n > 0 {
                    nats += n as f64 * ((n as f64).ln() - ln_total);
                }
            }
        }
    }
    LogLik {
        nats,
        bits: nats / LN_2,
    }
}

/// Plug-in log-likelihood of `data` under `dag`, with `0 log 0 = 0`.
pub fn log_likelihood(data: &DiscreteDataset, dag: &Dag) -> Result<LogLik> {
    Ok(log_lik_from_counts(&counts(data, dag)?))
}

/// Free-parameter count `sum_i ||Pi_i|| (||X_i|| - 1)`.
pub fn param_count(dag: &Dag, cards: &[u32]) -> u64 {
    (0..dag.node_count())
        .map(|i| dag.parent_config_count(i, cards) * (u64::from(cards[i]) - 1))
        .sum()
}

/// Bits to describe the network: value ranges, parent lists, and the
/// estimated parameters at half a log of the sample size each. A parentless
/// node has zero parents to list but one parameter row.
pub fn dl_net(dag: &Dag, cards: &[u32], m: u64) -> f64 {
    let log_n = (dag.node_count() as f64).log2();
    let mut bits = 0.0;
    for (i, &card) in cards.iter().enumerate() {
        bits += f64::from(card).log2();
        bits += (1.0 + dag.parents(i).len() as f64) * log_n;
    }
    bits + 0.5 * (m as f64).log2() * param_count(dag, cards) as f64
}

/// Bits to encode the rows under the factored plug-in density: the sum over
/// rows of `-log2 p_hat(row)`. Summed row-by-row, which makes it an
/// independent route to `-log_likelihood().bits`.
pub fn dl_data(data: &DiscreteDataset, dag: &Dag) -> Result<f64> {
    let ct = counts(data, dag)?;
    let theta = mle_theta(&ct);
    let cards = data.cardinalities();
    let mut bits = 0.0;
    for row in 0..data.n_rows() {
        for i in 0..dag.node_count() {
            let j = parent_config_index(dag.parents(i), cards, |p| data.value(row, p));
            let p = theta
                .theta(i, j, data.value(row, i) as usize)
                .expect("a row's own configuration was observed");
            bits -= p.log2();
        }
    }
    Ok(bits)
}

/// All per-network scores computed in one pass over the data.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScores {
    pub ll: LogLik,
    pub params: u64,
    pub aic: f64,
    pub bic: f64,
    pub dl_net: f64,
    pub dl_data: f64,
    pub mdl: f64,
}

/// Scores `dag` against `data` under every criterion.
pub fn score_all(data: &DiscreteDataset, dag: &Dag) -> Result<NetworkScores> {
    let cards = data.cardinalities();
    let m = data.n_rows() as u64;
    let ll = log_likelihood(data, dag)?;
    let params = param_count(dag, cards);
    let net = dl_net(dag, cards, m);
    let data_bits = dl_data(data, dag)?;
    Ok(NetworkScores {
        ll,
        params,
        aic: -2.0 * ll.nats + 2.0 * params as f64,
        bic: -2.0 * ll.nats + params as f64 * (m as f64).ln(),
        dl_net: net,
        dl_data: data_bits,
        mdl: net + data_bits,
    })
}

/// One criterion's value for `dag` on `data`. LL is returned as `ln L`; AIC
/// and BIC in natural-log units; MDL in bits.
pub fn score_network(data: &DiscreteDataset, dag: &Dag, criterion: Criterion) -> Result<f64> {
    let scores = score_all(data, dag)?;
    Ok(criterion_report_value(&scores, criterion))
}

fn criterion_report_value(s: &NetworkScores, c: Criterion) -> f64 {
    match c {
        Criterion::Ll => s.ll.nats,
        Criterion::Aic => s.aic,
        Criterion::Bic => s.bic,
        Criterion::Mdl => s.mdl,
    }
}

/// The quantity minimized when ranking under `c`.
fn criterion_rank_value(s: &NetworkScores, c: Criterion) -> f64 {
    match c {
        Criterion::Ll => -s.ll.nats,
        Criterion::Aic => s.aic,
        Criterion::Bic => s.bic,
        Criterion::Mdl => s.mdl,
    }
}

/// Relative tolerance for grouping scores into a tie at the top rank.
const WINNER_REL_TOLERANCE: f64 = 1e-9;

/// Everything [`recover`] reports: per-candidate scores, the ranking under
/// the chosen criterion, and the best-scoring set grouped by Markov
/// equivalence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub criterion: Criterion,
    pub candidates: Vec<CandidateScore>,
    /// Candidate indices sorted best to worst (ties keep candidate order).
    pub ranking: Vec<usize>,
    /// Candidate indices tied with the best score.
    pub winners: Vec<usize>,
    /// The winners grouped into Markov equivalence classes.
    pub winner_classes: Vec<Vec<usize>>,
}

/// Scores of one candidate graph. Edges are serialized 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateScore {
    pub edges: Vec<(usize, usize)>,
    pub ll_nats: f64,
    pub params: u64,
    pub aic: f64,
    pub bic: f64,
    pub dl_net: f64,
    pub dl_data: f64,
    pub mdl: f64,
}

impl CandidateScore {
    fn new(dag: &Dag, s: &NetworkScores) -> Self {
        CandidateScore {
            edges: dag.edges().into_iter().map(|(p, c)| (p + 1, c + 1)).collect(),
            ll_nats: s.ll.nats,
            params: s.params,
            aic: s.aic,
            bic: s.bic,
            dl_net: s.dl_net,
            dl_data: s.dl_data,
            mdl: s.mdl,
        }
    }

    pub fn edges_label(&self) -> String {
        if self.edges.is_empty() {
            return "(none)".into();
        }
        self.edges
            .iter()
            .map(|(p, c)| format!("{p}->{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl ScoreReport {
    /// Fixed-width listing of every candidate plus the winner summary.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        let label_width = self
            .candidates
            .iter()
            .map(|c| c.edges_label().len())
            .max()
            .unwrap_or(5)
            .max(5);
        out.push_str(&format!(
            "{:>4}  {:<label_width$}  {:>16}  {:>16}  {:>16}  {:>16}\n",
            "#", "edges", "ll (nats)", "AIC", "BIC", "MDL"
        ));
        for (idx, c) in self.candidates.iter().enumerate() {
            let mark = if self.winners.contains(&idx) { "*" } else { " " };
            out.push_str(&format!(
                "{mark}{:>3}  {:<label_width$}  {:>16.4}  {:>16.4}  {:>16.4}  {:>16.4}\n",
                idx + 1,
                c.edges_label(),
                c.ll_nats,
                c.aic,
                c.bic,
                c.mdl
            ));
        }
        out.push_str(&format!(
            "\nwinners by {} ({} graph(s), {} equivalence class(es)):\n",
            self.criterion,
            self.winners.len(),
            self.winner_classes.len()
        ));
        for class in &self.winner_classes {
            let labels: Vec<String> = class
                .iter()
                .map(|&i| self.candidates[i].edges_label())
                .collect();
            out.push_str(&format!("  [{}]\n", labels.join(" ; ")));
        }
        out
    }
}

/// Scores every candidate and reports the best set under `criterion`,
/// grouped by Markov equivalence. Candidate order is preserved; scoring runs
/// in parallel when the `parallel` feature is enabled.
pub fn recover(
    data: &DiscreteDataset,
    candidates: &[Dag],
    criterion: Criterion,
) -> Result<ScoreReport> {
    if candidates.is_empty() {
        return Err(Error::Domain("no candidate graphs".into()));
    }
    let scored: Vec<Result<NetworkScores>> =
        exec::map_slice(candidates, |dag| score_all(data, dag));
    let mut all = Vec::with_capacity(candidates.len());
    for s in scored {
        all.push(s?);
    }
    let values: Vec<f64> = all
        .iter()
        .map(|s| criterion_rank_value(s, criterion))
        .collect();
    let mut ranking: Vec<usize> = (0..values.len()).collect();
    ranking.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let best = values[ranking[0]];
    let tol = WINNER_REL_TOLERANCE * best.abs().max(1.0);
    let winners: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] - best <= tol)
        .collect();
    let mut winner_classes: Vec<(crate::graph::EquivalenceKey, Vec<usize>)> = Vec::new();
    for &i in &winners {
        let key = equivalence_key(&candidates[i]);
        match winner_classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => winner_classes.push((key, vec![i])),
        }
    }
    Ok(ScoreReport {
        criterion,
        candidates: candidates
            .iter()
            .zip(&all)
            .map(|(dag, s)| CandidateScore::new(dag, s))
            .collect(),
        ranking,
        winners,
        winner_classes: winner_classes.into_iter().map(|(_, v)| v).collect(),
    })
}
