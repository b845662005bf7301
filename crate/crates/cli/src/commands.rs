//! The operations behind each subcommand, separated from argument parsing
//! so they can be driven in-process by tests.

use std::path::{Path, PathBuf};
use std::time::Instant;

use tpo_core::constraints::{Heuristic, ToleranceSpec};
use tpo_core::gen;
use tpo_core::mining::{self, MiningConfig};
use tpo_core::monitor;
use tpo_core::{Alphabet, EventId, TimedTrace};

use crate::error::CliError;
use crate::formats::{
    format_bound, tpo_to_dot, ConstraintDocument, TpoDocument, TraceKey, TraceLogDocument,
};

/// Heuristic selection as it appears on the command line; RANDOM takes its
/// seed from the `--seed` flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum HeuristicArg {
    Nearest,
    Distant,
    Random,
    Sound,
}

impl HeuristicArg {
    pub fn resolve(self, seed: u64) -> Heuristic {
        match self {
            HeuristicArg::Nearest => Heuristic::Nearest,
            HeuristicArg::Distant => Heuristic::Distant,
            HeuristicArg::Random => Heuristic::Random { seed },
            HeuristicArg::Sound => Heuristic::Sound,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeuristicArg::Nearest => "nearest",
            HeuristicArg::Distant => "distant",
            HeuristicArg::Random => "random",
            HeuristicArg::Sound => "sound",
        }
    }
}

pub struct MineOptions {
    pub log: PathBuf,
    pub heuristic: HeuristicArg,
    pub seed: u64,
    pub inflate: f64,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

pub struct MineSummary {
    pub events: usize,
    pub traces: usize,
    pub clocks: usize,
    pub removed: usize,
    pub trivial: usize,
    pub kept: usize,
    pub wall_ms: f64,
    pub document: TpoDocument,
}

pub fn cmd_mine(opts: &MineOptions) -> Result<MineSummary, CliError> {
    let doc = TraceLogDocument::load(&opts.log)?;
    if doc.traces.is_empty() {
        return Err(CliError::Validation("log contains no traces".into()));
    }
    let traces = doc.to_timed_traces()?;
    let config = MiningConfig {
        heuristic: opts.heuristic.resolve(opts.seed),
        inflation: opts.inflate,
        tolerance: opts.tolerance,
        ..MiningConfig::default()
    };
    let start = Instant::now();
    let outcome = mining::mine(&traces, &config)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let document = TpoDocument::from_model(&doc.alphabet, &outcome.tpo);
    if let Some(path) = &opts.out {
        document.save(path)?;
    }
    if let Some(path) = &opts.dot {
        std::fs::write(path, tpo_to_dot(&doc.alphabet, &outcome.tpo))
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
    }
    Ok(MineSummary {
        events: doc.alphabet.len(),
        traces: traces.len(),
        clocks: outcome.tpo.clocks(),
        removed: outcome.removed,
        trivial: outcome.trivial,
        kept: outcome.reduced.len(),
        wall_ms,
        document,
    })
}

pub struct CheckReport {
    pub lines: Vec<(TraceKey, Option<String>)>,
    pub incompatible: usize,
}

/// Loads a model and a log, re-indexes the log's events into the model's
/// alphabet, and reports one line per trace.
pub fn cmd_check(tpo_path: &Path, log_path: &Path) -> Result<CheckReport, CliError> {
    let (alphabet, tpo) = TpoDocument::load(tpo_path)?.to_model()?;
    let doc = TraceLogDocument::load(log_path)?;

    let mut remap = Vec::with_capacity(doc.alphabet.len());
    for label in doc.alphabet.labels() {
        match alphabet.id(label) {
            Some(id) => remap.push(id),
            None => {
                return Err(CliError::Validation(format!(
                    "log event {label:?} is not part of the model"
                )))
            }
        }
    }

    let mut lines = Vec::new();
    let mut incompatible = 0;
    for (id, entries) in doc.trace_ids.iter().zip(&doc.traces) {
        let remapped: Vec<(EventId, f64)> = entries.iter().map(|&(e, t)| (remap[e.0], t)).collect();
        let verdict = match TimedTrace::new(remapped) {
            Ok(trace) => monitor::check_trace(&tpo, &trace)
                .err()
                .map(|v| describe_violation(&alphabet, &v)),
            Err(e) => Some(e.to_string()),
        };
        if verdict.is_some() {
            incompatible += 1;
        }
        lines.push((id.clone(), verdict));
    }
    Ok(CheckReport {
        lines,
        incompatible,
    })
}

fn describe_violation(alphabet: &Alphabet, v: &monitor::Violation) -> String {
    use monitor::Violation::*;
    match v {
        TimeRegression {
            event,
            time,
            previous,
        } => format!(
            "time regression at {}: {time} after {previous}",
            alphabet.label(*event)
        ),
        DuplicateEvent { event } => format!("duplicate event {}", alphabet.label(*event)),
        OrderViolation { event, missing } => format!(
            "order violation at {}: requires {} first",
            alphabet.label(*event),
            alphabet.label(*missing)
        ),
        GuardViolation {
            event,
            clock,
            relation,
            constant,
            actual,
        } => format!(
            "guard violation at {}: c{} = {actual}, needs c{} {relation} {constant}",
            alphabet.label(*event),
            clock.0,
            clock.0
        ),
        IncompleteRun { missing } => {
            let names: Vec<&str> = missing.iter().map(|e| alphabet.label(*e)).collect();
            format!("incomplete run, missing: {}", names.join(", "))
        }
    }
}

pub struct ReduceOptions {
    pub constraints: PathBuf,
    pub heuristic: HeuristicArg,
    pub seed: u64,
    pub tolerance: f64,
}

pub struct ReduceReport {
    pub kept: Vec<String>,
    pub removed: Vec<String>,
    pub trivial: Vec<String>,
    pub wall_ms: f64,
    pub document: ConstraintDocument,
}

pub fn cmd_reduce(opts: &ReduceOptions) -> Result<ReduceReport, CliError> {
    let (alphabet, sys) = ConstraintDocument::load(&opts.constraints)?.to_system()?;
    let start = Instant::now();
    let outcome = sys
        .eliminate_redundancy(
            opts.heuristic.resolve(opts.seed),
            ToleranceSpec::absolute(opts.tolerance),
        )
        .map_err(|e| match e {
            tpo_core::constraints::ConstraintError::Infeasible(cycle) => {
                CliError::Infeasible(cycle)
            }
            other => CliError::Validation(other.to_string()),
        })?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ReduceReport {
        kept: outcome
            .system
            .bounds()
            .iter()
            .map(|b| format_bound(&alphabet, b))
            .collect(),
        removed: outcome
            .removed
            .iter()
            .map(|b| format_bound(&alphabet, b))
            .collect(),
        trivial: outcome
            .trivial
            .iter()
            .map(|b| format_bound(&alphabet, b))
            .collect(),
        document: ConstraintDocument::from_system(&alphabet, &outcome.system),
        wall_ms,
    })
}

pub struct GenerateOptions {
    pub events: usize,
    pub density: f64,
    pub clocks: usize,
    pub traces: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub tpo_out: Option<PathBuf>,
}

pub struct GenerateSummary {
    pub events: usize,
    pub clocks: usize,
    pub traces: usize,
    pub tpo_path: PathBuf,
}

/// Synthetic label for event `i`, zero-padded so the lexicographic order
/// of labels matches the id order on reload.
pub fn synthetic_labels(n: usize) -> Alphabet {
    let width = n.saturating_sub(1).max(1).to_string().len();
    Alphabet::from_labels((0..n).map(|i| format!("e{i:0width$}")))
        .expect("generated labels are unique")
}

pub fn cmd_generate(opts: &GenerateOptions) -> Result<GenerateSummary, CliError> {
    let order = gen::random_dag(opts.events, opts.density, opts.seed);
    let tpo = gen::random_bounds(&order, opts.clocks, opts.seed)?;
    let alphabet = synthetic_labels(order.len());

    let traces = if opts.traces > 0 {
        gen::sample_traces(&tpo, opts.traces, opts.seed)?
    } else {
        Vec::new()
    };
    let doc = TraceLogDocument::from_traces(
        alphabet.clone(),
        traces.iter().map(|t| t.entries().to_vec()).collect(),
    );
    doc.save(&opts.out)?;

    let tpo_path = opts
        .tpo_out
        .clone()
        .unwrap_or_else(|| default_tpo_path(&opts.out));
    TpoDocument::from_model(&alphabet, &tpo).save(&tpo_path)?;

    Ok(GenerateSummary {
        events: order.len(),
        clocks: tpo.clocks(),
        traces: traces.len(),
        tpo_path,
    })
}

fn default_tpo_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("log");
    out.with_file_name(format!("{stem}.tpo.json"))
}

pub struct SplitOptions {
    pub log: PathBuf,
    pub k: usize,
    pub out: Option<PathBuf>,
}

pub struct SplitSummary {
    pub traces: usize,
    pub leftover: Vec<(String, usize)>,
    pub document: TraceLogDocument,
}

pub fn cmd_split(opts: &SplitOptions) -> Result<SplitSummary, CliError> {
    let doc = TraceLogDocument::load(&opts.log)?;
    let entries = doc.flattened();
    let outcome = mining::split_log(&entries, opts.k)?;
    let document = TraceLogDocument::from_traces(doc.alphabet.clone(), outcome.traces);
    if let Some(path) = &opts.out {
        document.save(path)?;
    }
    let leftover = outcome
        .counts
        .leftover
        .iter()
        .enumerate()
        .filter(|&(_, &y)| y > 0)
        .map(|(e, &y)| (doc.alphabet.label(EventId(e)).to_owned(), y))
        .collect();
    Ok(SplitSummary {
        traces: document.traces.len(),
        leftover,
        document,
    })
}

pub struct BenchOptions {
    pub events_list: Vec<usize>,
    pub traces: usize,
    pub heuristics: Vec<HeuristicArg>,
    pub repeats: usize,
    pub seed: u64,
    pub density: f64,
    pub clocks: usize,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub events: usize,
    pub heuristic: &'static str,
    /// Repeat index, or "mean" rows aggregated per (events, heuristic).
    pub repeat: String,
    pub clocks: f64,
    pub wall_ms: f64,
}

/// One mining run per (size, heuristic, repeat); the same generated log is
/// shared by all heuristics of a repeat so comparisons are paired. Seeds
/// advance by one per repeat.
pub fn cmd_bench(opts: &BenchOptions) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for &n in &opts.events_list {
        let mut per_heuristic: Vec<Vec<(f64, f64)>> = vec![Vec::new(); opts.heuristics.len()];
        for repeat in 0..opts.repeats {
            let seed = opts.seed + repeat as u64;
            let order = gen::random_dag(n, opts.density, seed);
            let tpo = gen::random_bounds(&order, opts.clocks, seed)?;
            let traces = gen::sample_traces(&tpo, opts.traces, seed)?;
            for (h_ix, &heuristic) in opts.heuristics.iter().enumerate() {
                let config = MiningConfig {
                    heuristic: heuristic.resolve(seed),
                    ..MiningConfig::default()
                };
                let start = Instant::now();
                let outcome = mining::mine(&traces, &config)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                per_heuristic[h_ix].push((outcome.tpo.clocks() as f64, wall_ms));
                rows.push(BenchRow {
                    events: n,
                    heuristic: heuristic.name(),
                    repeat: repeat.to_string(),
                    clocks: outcome.tpo.clocks() as f64,
                    wall_ms,
                });
            }
        }
        for (h_ix, &heuristic) in opts.heuristics.iter().enumerate() {
            let samples = &per_heuristic[h_ix];
            let len = samples.len().max(1) as f64;
            rows.push(BenchRow {
                events: n,
                heuristic: heuristic.name(),
                repeat: "mean".into(),
                clocks: samples.iter().map(|s| s.0).sum::<f64>() / len,
                wall_ms: samples.iter().map(|s| s.1).sum::<f64>() / len,
            });
        }
    }
    Ok(rows)
}

pub fn bench_rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,heuristic,repeat,clocks,wall_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            r.events, r.heuristic, r.repeat, r.clocks, r.wall_ms
        ));
    }
    out
}
