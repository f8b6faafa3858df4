use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use otss_core::decimal::{self, Rational};
use otss_core::harness::{fixtures as bundled, gen_uniform_traffic, run_sweep, SolverKind};
use otss_core::milp::{build_model, emit_lp as write_model};
use otss_core::model::{read_instance, Instance, ObjectiveMode, Topology, TopologyDoc};
use otss_core::solve::{
    solve_baseline_conventional, solve_exact, solve_greedy, LinkRef, ModeSubsets, OrderPolicy, Schedule, SolveLimits,
};
use otss_core::timeline::render_timeline;
use otss_core::validate::check_schedule;
use otss_core::Error;

use crate::{
    EmitLpArgs, FixturesArgs, GenTrafficArgs, LimitArgs, ObjectiveArg, PlanArgs, Solver, SweepArgs, TimelineArgs,
    ValidateArgs,
};

impl LimitArgs {
    fn limits(&self) -> Result<SolveLimits> {
        if !(self.time_limit_s.is_finite() && self.time_limit_s >= 0.0) {
            bail!("--time-limit-s must be a non-negative number");
        }
        Ok(SolveLimits {
            node_budget: self.node_budget,
            time_budget: Duration::from_secs_f64(self.time_limit_s),
            k_paths: self.k_paths,
            mode_subsets: if self.all_mode_subsets {
                ModeSubsets::All
            } else {
                ModeSubsets::Contiguous
            },
        })
    }
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> Self {
        match s {
            Solver::Exact => SolverKind::Exact,
            Solver::Greedy => SolverKind::Greedy,
            Solver::Baseline => SolverKind::Baseline,
        }
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gbps(text: &str, flag: &str) -> Result<Rational> {
    decimal::parse(text).with_context(|| format!("{flag}: '{text}' is not a decimal number"))
}

pub fn plan(a: PlanArgs) -> Result<ExitCode> {
    let instance = read_instance(&a.input)?;
    let limits = a.limits.limits()?;
    let schedule = match a.solver {
        Solver::Exact => solve_exact(&instance, &limits),
        Solver::Greedy => solve_greedy(&instance, &limits, OrderPolicy::DescendingBandwidth),
        Solver::Baseline => solve_baseline_conventional(&instance, &limits),
    };
    eprintln!(
        "throughput {} Gb/s, {} cells, {} of {} requests accepted{}",
        decimal::to_f64(schedule.throughput_gbps),
        schedule.lambda_count,
        schedule.accepted.len(),
        instance.requests.len(),
        if schedule.optimal { ", optimal" } else { "" }
    );
    let mut text = schedule.to_json();
    text.push('\n');
    write_or_print(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

pub fn validate(a: ValidateArgs) -> Result<ExitCode> {
    let mut instance = read_instance(&a.input)?;
    if a.conventional {
        instance = instance.collapsed_frame();
    }
    let schedule = Schedule::read(&a.schedule)?;
    let report = match check_schedule(&instance, &schedule) {
        Ok(r) => r,
        Err(Error::Structural(problems)) => {
            println!("FAIL");
            for p in problems {
                println!("  structural: {p}");
            }
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    if report.pass {
        println!("PASS");
        return Ok(ExitCode::SUCCESS);
    }
    println!("FAIL: {} violations", report.violations.len());
    for v in &report.violations {
        println!("  {}: {}", format!("{:?}", v.family).to_lowercase(), v.message);
    }
    Ok(ExitCode::from(1))
}

pub fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let template = read_instance(&a.input)?;
    let loads = a.loads.iter().map(|l| gbps(l, "--loads")).collect::<Result<Vec<_>>>()?;
    let solvers: Vec<SolverKind> = a.solvers.iter().map(|&s| s.into()).collect();
    let result = run_sweep(&template, &loads, &solvers, a.trials, a.seed, &a.limits.limits()?)?;
    result.write_csv(&a.output)?;
    let meta = a.output.with_extension("json");
    std::fs::write(&meta, result.metadata_json() + "\n").with_context(|| format!("writing {}", meta.display()))?;
    println!(
        "{:>10}  {:<8}  {:>12}  {:>10}  {:>8}",
        "load", "solver", "throughput", "accepted", "cells"
    );
    for avg in &result.averages {
        println!(
            "{:>10}  {:<8}  {:>12.2}  {:>10.3}  {:>8.1}",
            avg.load_gbps,
            avg.solver.name(),
            avg.mean_throughput_gbps,
            avg.mean_acceptance_ratio,
            avg.mean_lambda_count
        );
    }
    Ok(ExitCode::SUCCESS)
}

pub fn emit_lp(a: EmitLpArgs) -> Result<ExitCode> {
    let mut instance = read_instance(&a.input)?;
    match a.objective {
        Some(ObjectiveArg::Lexicographic) => instance.planner.objective_mode = ObjectiveMode::Lexicographic,
        Some(ObjectiveArg::Weighted) if !matches!(instance.planner.objective_mode, ObjectiveMode::Weighted { .. }) => {
            instance.planner.objective_mode = ObjectiveMode::Weighted { eta1: None, eta2: None };
        }
        _ => {}
    }
    let mut model = build_model(&instance)?;
    if instance.planner.objective_mode == ObjectiveMode::Lexicographic {
        let floor = match a.throughput_floor {
            Some(f) => f,
            None => {
                let s = solve_exact(&instance, &a.limits.limits()?);
                if !s.optimal {
                    eprintln!("warning: search budget exhausted; the phase-2 floor is the best throughput found");
                }
                decimal::to_f64(s.throughput_gbps)
            }
        };
        model.set_throughput_floor(floor);
    }
    for path in write_model(&model, &a.output)? {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gen_traffic(a: GenTrafficArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", a.input.display()))?;
    let topology = match value.get("topology") {
        Some(_) => read_instance(&a.input)?.topology,
        None => {
            let doc: TopologyDoc =
                serde_json::from_value(value).with_context(|| format!("parsing {}", a.input.display()))?;
            Topology::from_doc(&doc)?
        }
    };
    let requests = gen_uniform_traffic(
        &topology,
        gbps(&a.load, "--load")?,
        gbps(&a.granularity, "--granularity")?,
        gbps(&a.capacity, "--capacity")?,
        a.seed,
    )?;
    let mut out = serde_json::to_string_pretty(&serde_json::json!({ "requests": requests }))?;
    out.push('\n');
    write_or_print(a.output.as_deref(), &out)?;
    Ok(ExitCode::SUCCESS)
}

pub fn timeline(a: TimelineArgs) -> Result<ExitCode> {
    let mut instance = read_instance(&a.input)?;
    if a.conventional {
        instance = instance.collapsed_frame();
    }
    let schedule = Schedule::read(&a.schedule)?;
    let link = match &a.link {
        Some(l) => match l.split_once(':') {
            Some((from, to)) => Some(LinkRef::new(from, to)),
            None => bail!("--link expects FROM:TO, got '{l}'"),
        },
        None => None,
    };
    print!("{}", render_timeline(&instance, &schedule, link.as_ref())?);
    Ok(ExitCode::SUCCESS)
}

pub fn fixtures(a: FixturesArgs) -> Result<ExitCode> {
    let instance: Instance = bundled::by_name(&a.name).with_context(|| format!("no fixture named '{}'", a.name))?;
    let mut text = instance.to_json();
    text.push('\n');
    write_or_print(a.output.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}
