use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::traffic::{gen_uniform_traffic, BANDWIDTH_LAW};
use crate::decimal::{self, Rational};
use crate::error::{Error, Result};
use crate::model::{Instance, Tier};
use crate::solve::{
    solve_baseline_conventional, solve_exact_from_baseline, solve_greedy, OrderPolicy, Schedule, SolveLimits,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Greedy,
    Baseline,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Baseline => "baseline",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            "baseline" => Ok(SolverKind::Baseline),
            _ => Err(Error::InvalidParameter(format!(
                "unknown solver '{s}' (expected exact, greedy or baseline)"
            ))),
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub load_gbps: f64,
    pub trial: usize,
    pub solver: SolverKind,
    pub throughput_gbps: f64,
    pub acceptance_ratio: f64,
    pub lambda_count: u64,
    pub solve_ms: f64,
    pub optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAverage {
    pub load_gbps: f64,
    pub solver: SolverKind,
    pub trials: usize,
    pub mean_throughput_gbps: f64,
    pub mean_acceptance_ratio: f64,
    pub mean_lambda_count: f64,
    pub all_optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub seed: u64,
    /// SHA-256 of the template instance document.
    pub instance_digest: String,
    pub bandwidth_law: String,
    pub node_budget: u64,
    pub rows: Vec<SweepRow>,
    pub averages: Vec<SweepAverage>,
}

pub const CSV_HEADER: [&str; 8] = [
    "load_gbps",
    "trial",
    "solver",
    "throughput_gbps",
    "acceptance_ratio",
    "lambda_count",
    "solve_ms",
    "optimal",
];

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one (load, trial) cell, independent of execution order.
pub fn cell_seed(master: u64, load_index: usize, trial: usize) -> u64 {
    splitmix64(master ^ splitmix64(((load_index as u64) << 32) | trial as u64))
}

pub fn instance_digest(instance: &Instance) -> String {
    hex::encode(Sha256::digest(instance.to_json().as_bytes()))
}

/// Uplink capacity of the first half of the edge switches: every mode of
/// every outgoing link at the per-channel capacity.
pub fn edge_bisection_capacity_gbps(instance: &Instance) -> Rational {
    let topo = &instance.topology;
    let edges: Vec<usize> = topo.nodes_in_tier(Tier::Edge).collect();
    let uplinks: usize = edges[..edges.len() / 2].iter().map(|&v| topo.outgoing(v).len()).sum();
    instance.planner.link_capacity_gbps * decimal::int((uplinks * instance.modes) as i64)
}

fn row(
    instance: &Instance,
    load: Rational,
    trial: usize,
    solver: SolverKind,
    schedule: &Schedule,
    elapsed_ms: f64,
) -> SweepRow {
    let total = instance.requests.len();
    // Baseline cells are counted on the sliced grid.
    let lambda_count = match solver {
        SolverKind::Baseline => schedule.lambda_count * instance.slot_count() as u64,
        _ => schedule.lambda_count,
    };
    SweepRow {
        load_gbps: decimal::to_f64(load),
        trial,
        solver,
        throughput_gbps: decimal::to_f64(schedule.throughput_gbps),
        acceptance_ratio: if total == 0 {
            1.0
        } else {
            schedule.accepted.len() as f64 / total as f64
        },
        lambda_count,
        solve_ms: elapsed_ms,
        optimal: schedule.optimal,
    }
}

fn timed(f: impl FnOnce() -> Schedule) -> (Schedule, f64) {
    let start = Instant::now();
    let s = f();
    (s, start.elapsed().as_secs_f64() * 1e3)
}

fn run_cell(
    template: &Instance,
    load: Rational,
    trial: usize,
    seed: u64,
    solvers: &[SolverKind],
    limits: &SolveLimits,
) -> Result<Vec<SweepRow>> {
    let requests = gen_uniform_traffic(
        &template.topology,
        load,
        template.planner.granularity_gbps,
        template.planner.link_capacity_gbps,
        seed,
    )?;
    let instance = template.with_requests(requests)?;
    let mut baseline: Option<(Schedule, f64)> = None;
    let mut rows = Vec::with_capacity(solvers.len());
    for &solver in solvers {
        let (schedule, ms) = match solver {
            SolverKind::Greedy => timed(|| solve_greedy(&instance, limits, OrderPolicy::DescendingBandwidth)),
            SolverKind::Baseline => baseline
                .get_or_insert_with(|| timed(|| solve_baseline_conventional(&instance, limits)))
                .clone(),
            SolverKind::Exact => {
                let (base, _) = baseline
                    .get_or_insert_with(|| timed(|| solve_baseline_conventional(&instance, limits)))
                    .clone();
                timed(|| solve_exact_from_baseline(&instance, limits, &base))
            }
        };
        rows.push(row(&instance, load, trial, solver, &schedule, ms));
    }
    Ok(rows)
}

/// Runs every (load, trial) cell in parallel. Each cell generates one
/// request set from its own derived seed and solves it with every listed
/// solver. Rows come back sorted by load index, trial, then solver order.
pub fn run_sweep(
    template: &Instance,
    loads: &[Rational],
    solvers: &[SolverKind],
    trials: usize,
    seed: u64,
    limits: &SolveLimits,
) -> Result<SweepResult> {
    if loads.is_empty() || solvers.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter(
            "a sweep needs at least one load, one solver and one trial".into(),
        ));
    }
    let cells: Vec<(usize, usize)> = (0..loads.len())
        .flat_map(|l| (0..trials).map(move |t| (l, t)))
        .collect();
    let per_cell: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(l, t)| run_cell(template, loads[l], t, cell_seed(seed, l, t), solvers, limits))
        .collect::<Result<_>>()?;
    let rows: Vec<SweepRow> = per_cell.into_iter().flatten().collect();

    let mut averages = Vec::new();
    for &load in loads {
        let lf = decimal::to_f64(load);
        for &solver in solvers {
            let sel: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.load_gbps == lf && r.solver == solver)
                .collect();
            let n = sel.len() as f64;
            averages.push(SweepAverage {
                load_gbps: lf,
                solver,
                trials: sel.len(),
                mean_throughput_gbps: sel.iter().map(|r| r.throughput_gbps).sum::<f64>() / n,
                mean_acceptance_ratio: sel.iter().map(|r| r.acceptance_ratio).sum::<f64>() / n,
                mean_lambda_count: sel.iter().map(|r| r.lambda_count as f64).sum::<f64>() / n,
                all_optimal: sel.iter().all(|r| r.optimal),
            });
        }
    }
    Ok(SweepResult {
        seed,
        instance_digest: instance_digest(template),
        bandwidth_law: BANDWIDTH_LAW.into(),
        node_budget: limits.node_budget,
        rows,
        averages,
    })
}

impl SweepResult {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.load_gbps.to_string(),
                r.trial.to_string(),
                r.solver.name().to_string(),
                r.throughput_gbps.to_string(),
                r.acceptance_ratio.to_string(),
                r.lambda_count.to_string(),
                format!("{:.3}", r.solve_ms),
                r.optimal.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Metadata and averages; rows live in the CSV.
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&serde_json::json!({
            "seed": self.seed,
            "instance_digest": self.instance_digest,
            "bandwidth_law": self.bandwidth_law,
            "node_budget": self.node_budget,
            "averages": self.averages,
        }))
        .expect("metadata always serializes")
    }

    /// Rows with the wall-clock column cleared, for comparing runs.
    pub fn timeless_rows(&self) -> Vec<SweepRow> {
        self.rows
            .iter()
            .map(|r| SweepRow {
                solve_ms: 0.0,
                ..r.clone()
            })
            .collect()
    }
}
