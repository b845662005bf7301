use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tpo_cli::commands::{
    self, BenchOptions, GenerateOptions, HeuristicArg, MineOptions, ReduceOptions, SplitOptions,
};
use tpo_cli::{CliError, EXIT_VIOLATIONS};

#[derive(Parser)]
#[command(
    name = "tpo",
    about = "Mine, check, and generate timed partial order workflow models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a model from a timed event log (JSONL or CSV).
    Mine {
        /// Event log: JSON lines {"trace_id","event","timestamp"} or .csv.
        log: PathBuf,
        #[arg(long, value_enum, default_value = "nearest")]
        heuristic: HeuristicArg,
        /// Seed for the random heuristic.
        #[arg(long, default_value_t = 1337)]
        seed: u64,
        /// Widen each mined interval by this fraction of its width.
        #[arg(long, default_value_t = 0.0)]
        inflate: f64,
        /// Redundancy slack as a fraction of each interval's width.
        #[arg(long, default_value_t = 0.04)]
        tolerance: f64,
        /// Write the mined model as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a Graphviz rendering of the mined model.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check every trace of a log against a model.
    Check {
        /// Model JSON as written by `mine` or `generate`.
        tpo: PathBuf,
        /// Event log to check.
        log: PathBuf,
    },
    /// Remove redundant bounds from an interval constraint file.
    Reduce {
        /// Constraint JSON: events, order edges, absolute and difference
        /// intervals ("inf" for an open upper end).
        constraints: PathBuf,
        #[arg(long, value_enum, default_value = "nearest")]
        heuristic: HeuristicArg,
        #[arg(long, default_value_t = 1337)]
        seed: u64,
        /// Absolute slack for the redundancy test.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Write the surviving system as a constraint JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random model and a log of conforming traces.
    Generate {
        #[arg(long)]
        events: usize,
        /// Probability of an edge between any forward pair of events.
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        /// Clock budget for the generated model.
        #[arg(long, default_value_t = 3)]
        clocks: usize,
        #[arg(long, default_value_t = 1000)]
        traces: usize,
        #[arg(long, default_value_t = 1337)]
        seed: u64,
        /// Log output path; the model lands next to it unless --tpo-out.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tpo_out: Option<PathBuf>,
    },
    /// Split an interleaved pipeline log into k per-product traces.
    Split {
        log: PathBuf,
        /// Number of concurrent products in the log.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark mining across sizes and heuristics; prints CSV.
    Bench {
        /// Comma-separated event counts.
        #[arg(long, value_delimiter = ',', default_value = "10,25,50")]
        events_list: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        traces: usize,
        /// Comma-separated subset of nearest,distant,random,sound.
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "nearest,distant,random,sound"
        )]
        heuristics: Vec<HeuristicArg>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 1337)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        density: f64,
        #[arg(long, default_value_t = 3)]
        clocks: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("TPO_LOG_LEVEL", "warn"))
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Mine {
            log,
            heuristic,
            seed,
            inflate,
            tolerance,
            out,
            dot,
        } => {
            let summary = commands::cmd_mine(&MineOptions {
                log,
                heuristic,
                seed,
                inflate,
                tolerance,
                out,
                dot,
            })?;
            println!(
                "events: {}  traces: {}  clocks: {}  kept bounds: {}  removed: {}  trivial: {}  wall: {:.1} ms",
                summary.events,
                summary.traces,
                summary.clocks,
                summary.kept,
                summary.removed,
                summary.trivial,
                summary.wall_ms
            );
            Ok(0)
        }
        Command::Check { tpo, log } => {
            let report = commands::cmd_check(&tpo, &log)?;
            for (id, verdict) in &report.lines {
                match verdict {
                    None => println!("trace {id}: compatible"),
                    Some(reason) => println!("trace {id}: VIOLATION - {reason}"),
                }
            }
            println!(
                "{} of {} traces compatible",
                report.lines.len() - report.incompatible,
                report.lines.len()
            );
            Ok(if report.incompatible == 0 {
                0
            } else {
                EXIT_VIOLATIONS
            })
        }
        Command::Reduce {
            constraints,
            heuristic,
            seed,
            tolerance,
            out,
        } => {
            let report = commands::cmd_reduce(&ReduceOptions {
                constraints,
                heuristic,
                seed,
                tolerance,
            })?;
            for line in &report.kept {
                println!("kept: {line}");
            }
            for line in &report.removed {
                println!("removed: {line}");
            }
            for line in &report.trivial {
                println!("trivial: {line}");
            }
            println!(
                "{} kept, {} removed, {} trivial ({:.3} ms)",
                report.kept.len(),
                report.removed.len(),
                report.trivial.len(),
                report.wall_ms
            );
            if let Some(path) = out {
                report.document.save(&path)?;
            }
            Ok(0)
        }
        Command::Generate {
            events,
            density,
            clocks,
            traces,
            seed,
            out,
            tpo_out,
        } => {
            let summary = commands::cmd_generate(&GenerateOptions {
                events,
                density,
                clocks,
                traces,
                seed,
                out,
                tpo_out,
            })?;
            println!(
                "generated {} events, {} clocks, {} traces; model at {}",
                summary.events,
                summary.clocks,
                summary.traces,
                summary.tpo_path.display()
            );
            Ok(0)
        }
        Command::Split { log, k, out } => {
            let summary = commands::cmd_split(&SplitOptions { log, k, out })?;
            println!("split into {} traces", summary.traces);
            for (label, count) in &summary.leftover {
                println!("leftover: {count} occurrence(s) of {label}");
            }
            Ok(0)
        }
        Command::Bench {
            events_list,
            traces,
            heuristics,
            repeats,
            seed,
            density,
            clocks,
            out,
        } => {
            let rows = commands::cmd_bench(&BenchOptions {
                events_list,
                traces,
                heuristics,
                repeats,
                seed,
                density,
                clocks,
            })?;
            let csv = commands::bench_rows_to_csv(&rows);
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
    }
}
