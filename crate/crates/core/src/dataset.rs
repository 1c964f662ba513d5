//! Data ingestion, value relabeling, and sufficient-statistic counting.
//!
//! Discrete values are stored 0-based internally; CSV files and reports use
//! the 1-based labels `1..=card`.

use crate::error::{Error, Result};
use crate::graph::Dag;
use std::io::{Read, Write};
use std::path::Path;

/// Raw numeric observations straight from a CSV file, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl RawDataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::SizeMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let m = columns.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::EmptyData);
        }
        if columns.iter().any(|c| c.len() != m) {
            return Err(Error::SizeMismatch("ragged columns".into()));
        }
        Ok(RawDataset { names, columns })
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }
}

/// Per-node mapping from sorted distinct raw values to the ranks `1..=m_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueMap {
    values: Vec<f64>,
}

impl ValueMap {
    /// Sorted distinct raw values; rank of `values[r]` is `r + 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 0-based rank of `raw`, if it was observed.
    pub fn rank(&self, raw: f64) -> Option<u32> {
        self.values
            .binary_search_by(|v| v.total_cmp(&raw))
            .ok()
            .map(|r| r as u32)
    }

    pub fn cardinality(&self) -> u32 {
        self.values.len() as u32
    }
}

/// Integer-valued observations with per-node cardinalities, column-major.
/// Column `i` holds values in `0..cards[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDataset {
    cards: Vec<u32>,
    columns: Vec<Vec<u32>>,
}

impl DiscreteDataset {
    pub fn new(cards: Vec<u32>, columns: Vec<Vec<u32>>) -> Result<Self> {
        if cards.len() != columns.len() {
            return Err(Error::SizeMismatch(format!(
                "{} cardinalities for {} columns",
                cards.len(),
                columns.len()
            )));
        }
        let m = columns.first().map_or(0, Vec::len);
        if m == 0 {
            return Err(Error::EmptyData);
        }
        for (i, col) in columns.iter().enumerate() {
            if col.len() != m {
                return Err(Error::SizeMismatch("ragged columns".into()));
            }
            if cards[i] == 0 {
                return Err(Error::Domain(format!("column {i} has cardinality 0")));
            }
            if col.iter().any(|&v| v >= cards[i]) {
                return Err(Error::Domain(format!(
                    "column {i} holds a value outside 0..{}",
                    cards[i]
                )));
            }
        }
        Ok(DiscreteDataset { cards, columns })
    }

    /// Builds a dataset from 1-based row tuples, for tests and small fixtures.
    pub fn from_rows(cards: Vec<u32>, rows: &[Vec<u32>]) -> Result<Self> {
        let n = cards.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for row in rows {
            if row.len() != n {
                return Err(Error::SizeMismatch("ragged rows".into()));
            }
            for (i, &v) in row.iter().enumerate() {
                if v == 0 {
                    return Err(Error::Domain("row values are numbered from 1".into()));
                }
                columns[i].push(v - 1);
            }
        }
        DiscreteDataset::new(cards, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cards
    }

    pub fn cardinality(&self, node: usize) -> u32 {
        self.cards[node]
    }

    pub fn column(&self, node: usize) -> &[u32] {
        &self.columns[node]
    }

    pub fn value(&self, row: usize, node: usize) -> u32 {
        self.columns[node][row]
    }

    /// Replaces one column (with a new cardinality), leaving others untouched.
    pub(crate) fn with_column(&self, node: usize, card: u32, column: Vec<u32>) -> Self {
        let mut cards = self.cards.clone();
        let mut columns = self.columns.clone();
        cards[node] = card;
        columns[node] = column;
        DiscreteDataset { cards, columns }
    }
}

/// Reads a header-first CSV of finite numerics.
pub fn load_csv(path: impl AsRef<Path>) -> Result<RawDataset> {
    let file = std::fs::File::open(path)?;
    parse_csv(file)
}

/// Parses CSV text from any reader: a header line of column names followed
/// by comma-separated numeric rows (LF or CRLF).
pub fn parse_csv(reader: impl Read) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    let n = names.len();
    let mut columns = vec![Vec::new(); n];
    for (idx, record) in rdr.records().enumerate() {
        let line = idx + 2; // header is line 1
        let record = record.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        if record.len() != n {
            return Err(Error::Parse {
                line,
                msg: format!("expected {n} fields, found {}", record.len()),
            });
        }
        for (i, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("`{field}` is not numeric"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("`{field}` is not finite"),
                });
            }
            // Collapse -0.0 onto 0.0 so ties relabel identically.
            columns[i].push(if value == 0.0 { 0.0 } else { value });
        }
    }
    RawDataset::new(names, columns)
}

/// Writes a dataset as CSV with 1-based integer values.
pub fn write_csv(data: &DiscreteDataset, names: &[String], out: impl Write) -> Result<()> {
    if names.len() != data.n_cols() {
        return Err(Error::SizeMismatch(format!(
            "{} names for {} columns",
            names.len(),
            data.n_cols()
        )));
    }
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(names)
        .map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    for row in 0..data.n_rows() {
        let record: Vec<String> = (0..data.n_cols())
            .map(|i| (data.value(row, i) + 1).to_string())
            .collect();
        wtr.write_record(&record)
            .map_err(|e| Error::Parse { line: row + 2, msg: e.to_string() })?;
    }
    wtr.flush()?;
    Ok(())
}

/// Relabels each column's distinct raw values to their ascending ranks.
pub fn relabel(raw: &RawDataset) -> (DiscreteDataset, Vec<ValueMap>) {
    let mut cards = Vec::with_capacity(raw.n_cols());
    let mut columns = Vec::with_capacity(raw.n_cols());
    let mut maps = Vec::with_capacity(raw.n_cols());
    for i in 0..raw.n_cols() {
        let mut distinct: Vec<f64> = raw.column(i).to_vec();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        let map = ValueMap { values: distinct };
        let ranks: Vec<u32> = raw
            .column(i)
            .iter()
            .map(|&v| map.rank(v).expect("observed value must have a rank"))
            .collect();
        cards.push(map.cardinality());
        columns.push(ranks);
        maps.push(map);
    }
    let data = DiscreteDataset::new(cards, columns).expect("relabeled data is rectangular");
    (data, maps)
}

/// Occurrence counts `n_ijk`, indexed (node, parent configuration, value),
/// plus the marginals `n_ij.`.
#[derive(Debug, Clone)]
pub struct CountTable {
    /// counts[i][j][k]
    counts: Vec<Vec<Vec<u64>>>,
    /// config_counts[i][j] = sum_k counts[i][j][k]
    config_counts: Vec<Vec<u64>>,
    cards: Vec<u32>,
    n_rows: u64,
}

impl CountTable {
    pub fn count(&self, node: usize, config: usize, value: usize) -> u64 {
        self.counts[node][config][value]
    }

    pub fn config_count(&self, node: usize, config: usize) -> u64 {
        self.config_counts[node][config]
    }

    pub fn config_len(&self, node: usize) -> usize {
        self.config_counts[node].len()
    }

    pub fn cardinality(&self, node: usize) -> u32 {
        self.cards[node]
    }

    pub fn n_nodes(&self) -> usize {
        self.cards.len()
    }

    pub fn n_rows(&self) -> u64 {
        self.n_rows
    }
}

/// Mixed-radix index of a parent configuration: the lowest-indexed parent is
/// the fastest-varying digit.
pub(crate) fn parent_config_index(
    parents: &[usize],
    cards: &[u32],
    value_of: impl Fn(usize) -> u32,
) -> usize {
    let mut index = 0usize;
    let mut stride = 1usize;
    for &p in parents {
        index += value_of(p) as usize * stride;
        stride *= cards[p] as usize;
    }
    index
}

/// Tallies `n_ijk` for every node of `dag` over `data`.
pub fn counts(data: &DiscreteDataset, dag: &Dag) -> Result<CountTable> {
    if dag.node_count() != data.n_cols() {
        return Err(Error::SizeMismatch(format!(
            "graph has {} nodes, data has {} columns",
            dag.node_count(),
            data.n_cols()
        )));
    }
    let cards = data.cardinalities();
    let m = data.n_rows();
    let mut counts = Vec::with_capacity(dag.node_count());
    let mut config_counts = Vec::with_capacity(dag.node_count());
    for i in 0..dag.node_count() {
        let n_configs = dag.parent_config_count(i, cards) as usize;
        let mut node_counts = vec![vec![0u64; cards[i] as usize]; n_configs];
        let mut node_config = vec![0u64; n_configs];
        let parents = dag.parents(i);
        let column = data.column(i);
        for row in 0..m {
            let j = parent_config_index(parents, cards, |p| data.value(row, p));
            node_counts[j][column[row] as usize] += 1;
            node_config[j] += 1;
        }
        counts.push(node_counts);
        config_counts.push(node_config);
    }
    Ok(CountTable {
        counts,
        config_counts,
        cards: cards.to_vec(),
        n_rows: m as u64,
    })
}
