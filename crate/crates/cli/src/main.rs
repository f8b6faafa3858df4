mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Crosstalk-aware time-slice scheduling for multimode-fiber networks.
#[derive(Debug, Parser)]
#[command(name = "otss", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance and write the schedule.
    Plan(PlanArgs),
    /// Check a schedule against every constraint; exit 1 on violations.
    Validate(ValidateArgs),
    /// Run a load sweep and write per-trial rows as CSV.
    Sweep(SweepArgs),
    /// Write the MILP model of an instance in CPLEX LP format.
    EmitLp(EmitLpArgs),
    /// Generate seeded uniform traffic for a topology.
    GenTraffic(GenTrafficArgs),
    /// Draw the mode × slot occupancy of one link.
    Timeline(TimelineArgs),
    /// Write a bundled instance.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Solver {
    Exact,
    Greedy,
    /// One slot per frame, no time slicing.
    Baseline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ObjectiveArg {
    Lexicographic,
    Weighted,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Search nodes before the exact solver stops proving optimality.
    #[arg(long, default_value_t = 1_000_000)]
    node_budget: u64,
    /// Wall-clock budget of one solve, in seconds.
    #[arg(long, default_value_t = 600.0)]
    time_limit_s: f64,
    /// Candidate paths per request.
    #[arg(long, default_value_t = 3)]
    k_paths: usize,
    /// Allow non-contiguous mode sets.
    #[arg(long)]
    all_mode_subsets: bool,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Solver::Exact)]
    solver: Solver,
    /// Schedule file; printed to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    schedule: PathBuf,
    /// Judge against the instance collapsed to a single slot (baseline output).
    #[arg(long)]
    conventional: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Offered loads in Gb/s, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    loads: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Solver::Exact, Solver::Baseline])]
    solvers: Vec<Solver>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// CSV of per-trial rows; metadata goes next to it with a .json extension.
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct EmitLpArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Target file; the lexicographic objective writes `<stem>.phase1.lp` and `<stem>.phase2.lp`.
    #[arg(short, long)]
    output: PathBuf,
    /// Defaults to the instance's objective mode.
    #[arg(long, value_enum)]
    objective: Option<ObjectiveArg>,
    /// Throughput kept in phase 2; computed with the exact solver when omitted.
    #[arg(long)]
    throughput_floor: Option<f64>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct GenTrafficArgs {
    /// Instance or bare topology document.
    #[arg(short, long)]
    input: PathBuf,
    /// Offered load in Gb/s.
    #[arg(long)]
    load: String,
    #[arg(long)]
    seed: u64,
    /// Bandwidth step in Gb/s.
    #[arg(long, default_value = "1")]
    granularity: String,
    /// Largest request bandwidth in Gb/s.
    #[arg(long, default_value = "10")]
    capacity: String,
    /// Printed to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TimelineArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    schedule: PathBuf,
    /// Link as FROM:TO; the busiest link when omitted.
    #[arg(long)]
    link: Option<String>,
    /// Draw against the instance collapsed to a single slot.
    #[arg(long)]
    conventional: bool,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(otss_core::harness::fixtures::NAMES))]
    name: String,
    /// Printed to stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => commands::plan(a),
        Command::Validate(a) => commands::validate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::EmitLp(a) => commands::emit_lp(a),
        Command::GenTraffic(a) => commands::gen_traffic(a),
        Command::Timeline(a) => commands::timeline(a),
        Command::Fixtures(a) => commands::fixtures(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let mut message = String::new();
            for cause in e.chain().map(ToString::to_string) {
                if !message.ends_with(&cause) {
                    message += if message.is_empty() { "" } else { ": " };
                    message += &cause;
                }
            }
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
