//! `bnmdl`: score Bayesian-network structures over discrete data and find
//! minimum-description-length discretizations.
//!
//! Subcommands: `simulate` (forward-sample a specified network to CSV),
//! `explode` (split a node's values into superfluous ones), `recover`
//! (score every candidate DAG and report the winners up to Markov
//! equivalence), `discretize` (single-node top-down search, optionally
//! checked against the exhaustive oracle or cycled over all nodes), and
//! `bench` (top-down vs exhaustive sweep over generated instances).
//!
//! Every subcommand is deterministic given its inputs and `--seed`; the
//! commands that draw randomness require the flag explicitly.

use anyhow::{bail, Context, Result};
use bnmdl::dataset::{load_csv, relabel, write_csv, DiscreteDataset};
use bnmdl::discretize::{cycle_report, discretize_report};
use bnmdl::graph::{enumerate_dags, parse_edge_list, Dag};
use bnmdl::scoring::{recover, Criterion};
use bnmdl::simulate::{explode, sample, BnSpec, ExplosionSpec};
use bnmdl::sweep::{run_sweep, SweepConfig};
use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "bnmdl", version, about = "Bayesian-network scoring and MDL discretization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward-sample a network specification to a CSV file.
    Simulate {
        /// Network specification (JSON: nodes, edges, CPT rows).
        #[arg(long)]
        spec: PathBuf,
        /// Number of rows to draw.
        #[arg(long)]
        rows: usize,
        /// RNG seed; all randomness flows from this flag.
        #[arg(long)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Replace one node's values with superfluous substitutes per an
    /// explosion specification.
    Explode {
        /// Input data CSV (header + numeric rows).
        #[arg(long)]
        data: PathBuf,
        /// Explosion specification (JSON: node, per-value groups).
        #[arg(long)]
        explosion: PathBuf,
        /// RNG seed; all randomness flows from this flag.
        #[arg(long)]
        seed: u64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score every DAG on the data's columns and report the winners.
    Recover {
        /// Input data CSV.
        #[arg(long)]
        data: PathBuf,
        /// Ranking criterion: ll, aic, bic, or mdl.
        #[arg(long, default_value = "mdl")]
        criterion: String,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the discretization of a node minimizing the local
    /// description-length score.
    Discretize {
        /// Input data CSV.
        #[arg(long)]
        data: PathBuf,
        /// Graph edge list: one `parent child` pair of 1-based indices per line.
        #[arg(long)]
        graph: PathBuf,
        /// 1-based node to discretize (required unless --cycle).
        #[arg(long)]
        node: Option<usize>,
        /// Also run the exhaustive search and report agreement.
        #[arg(long)]
        exhaustive: bool,
        /// Cycle the search over every node instead of one.
        #[arg(long)]
        cycle: bool,
        /// Pass limit for --cycle.
        #[arg(long, default_value_t = 10)]
        max_passes: usize,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the top-down search against the exhaustive oracle over
    /// generated instances.
    Bench {
        /// Inclusive distinct-value sweep, e.g. 4:12.
        #[arg(long, value_name = "LO:HI")]
        m1_sweep: String,
        /// Instances per sweep level.
        #[arg(long, default_value_t = 20)]
        reps: u32,
        /// RNG seed; all randomness flows from this flag.
        #[arg(long)]
        seed: u64,
        /// Nominal sample size of the generated distributions.
        #[arg(long, default_value_t = 100_000.0)]
        nominal_m: f64,
        /// Also run the sequential removal variant and report agreement.
        #[arg(long)]
        compare_variants: bool,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate {
            spec,
            rows,
            seed,
            out,
        } => run_simulate(&spec, rows, seed, &out),
        Command::Explode {
            data,
            explosion,
            seed,
            out,
        } => run_explode(&data, &explosion, seed, &out),
        Command::Recover {
            data,
            criterion,
            out,
        } => run_recover(&data, &criterion, out.as_deref()),
        Command::Discretize {
            data,
            graph,
            node,
            exhaustive,
            cycle,
            max_passes,
            out,
        } => run_discretize(&data, &graph, node, exhaustive, cycle, max_passes, out.as_deref()),
        Command::Bench {
            m1_sweep,
            reps,
            seed,
            nominal_m,
            compare_variants,
            out,
        } => run_bench(&m1_sweep, reps, seed, nominal_m, compare_variants, out.as_deref()),
    }
}

fn load_discrete(path: &Path) -> Result<DiscreteDataset> {
    let raw = load_csv(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(relabel(&raw).0)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run_simulate(spec_path: &Path, rows: usize, seed: u64, out: &Path) -> Result<()> {
    let text =
        fs::read_to_string(spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    let spec = BnSpec::from_json(&text)?;
    let data = sample(&spec, rows, seed)?;
    let file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&data, spec.names(), file)?;
    println!(
        "wrote {} rows x {} columns to {} (cardinalities: {})",
        data.n_rows(),
        data.n_cols(),
        out.display(),
        join(data.cardinalities())
    );
    Ok(())
}

fn run_explode(data_path: &Path, explosion_path: &Path, seed: u64, out: &Path) -> Result<()> {
    let raw = load_csv(data_path).with_context(|| format!("reading {}", data_path.display()))?;
    let names = raw.names().to_vec();
    let (data, _) = relabel(&raw);
    let text = fs::read_to_string(explosion_path)
        .with_context(|| format!("reading {}", explosion_path.display()))?;
    let spec = ExplosionSpec::from_json(&text)?;
    let exploded = explode(&data, &spec, seed)?;
    let file = fs::File::create(out).with_context(|| format!("creating {}", out.display()))?;
    write_csv(&exploded, &names, file)?;
    println!(
        "exploded node {} from {} to {} values over {} rows -> {}",
        spec.node() + 1,
        spec.original_cardinality(),
        spec.exploded_cardinality(),
        exploded.n_rows(),
        out.display()
    );
    Ok(())
}

fn run_recover(data_path: &Path, criterion: &str, out: Option<&Path>) -> Result<()> {
    let criterion: Criterion = criterion.parse()?;
    let data = load_discrete(data_path)?;
    let candidates = enumerate_dags(data.n_cols())?;
    let report = recover(&data, &candidates, criterion)?;
    print!("{}", report.text_table());
    if let Some(path) = out {
        write_json(path, &report)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn load_graph(path: &Path, n: usize) -> Result<Dag> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_edge_list(&text, n)?)
}

fn run_discretize(
    data_path: &Path,
    graph_path: &Path,
    node: Option<usize>,
    exhaustive: bool,
    cycle: bool,
    max_passes: usize,
    out: Option<&Path>,
) -> Result<()> {
    let data = load_discrete(data_path)?;
    let dag = load_graph(graph_path, data.n_cols())?;
    if cycle {
        let nodes: Vec<usize> = (0..data.n_cols()).collect();
        let report = cycle_report(&data, &dag, &nodes, max_passes)?;
        print!("{}", report.text_table());
        if let Some(path) = out {
            write_json(path, &report)?;
            println!("report written to {}", path.display());
        }
        return Ok(());
    }
    let Some(node) = node else {
        bail!("--node is required unless --cycle is given");
    };
    if node == 0 || node > data.n_cols() {
        bail!("--node must be in 1..={}", data.n_cols());
    }
    let report = discretize_report(&data, &dag, node - 1, exhaustive)?;
    print!("{}", report.text_table());
    if let Some(path) = out {
        write_json(path, &report)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn run_bench(
    m1_sweep: &str,
    reps: u32,
    seed: u64,
    nominal_m: f64,
    compare_variants: bool,
    out: Option<&Path>,
) -> Result<()> {
    let (m1_min, m1_max) = parse_sweep(m1_sweep)?;
    let config = SweepConfig {
        m1_min,
        m1_max,
        reps,
        seed,
        m: nominal_m,
        compare_variants,
    };
    let report = run_sweep(&config)?;
    print!("{}", report.text_table());
    if let Some(path) = out {
        write_json(path, &report)?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn parse_sweep(text: &str) -> Result<(u32, u32)> {
    let Some((lo, hi)) = text.split_once(':') else {
        bail!("--m1-sweep expects LO:HI, e.g. 4:12");
    };
    let lo: u32 = lo.trim().parse().context("bad sweep lower bound")?;
    let hi: u32 = hi.trim().parse().context("bad sweep upper bound")?;
    Ok((lo, hi))
}

fn join(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}
