//! Exact branch-and-bound, greedy first-fit and the conventional one-slot
//! baseline.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use super::candidates::{enumerate_candidates, CandidateAssignment, ModeSubsets};
use super::schedule::{Assignment, Schedule, SlotRange};
use super::state::SearchState;
use crate::decimal::{self, Rational};
use crate::model::{Instance, ObjectiveMode};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveLimits {
    /// Search nodes (candidate attempts) before giving up on optimality.
    pub node_budget: u64,
    pub time_budget: Duration,
    /// Path candidates per request.
    pub k_paths: usize,
    pub mode_subsets: ModeSubsets,
}

impl Default for SolveLimits {
    fn default() -> Self {
        Self {
            node_budget: 1_000_000,
            time_budget: Duration::from_secs(600),
            k_paths: 3,
            mode_subsets: ModeSubsets::Contiguous,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Largest bandwidth first, ties by request id.
    #[default]
    DescendingBandwidth,
    /// Instance order.
    InputOrder,
}

fn request_order(instance: &Instance, policy: OrderPolicy) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.requests.len()).collect();
    if policy == OrderPolicy::DescendingBandwidth {
        let reqs = &instance.requests;
        order.sort_by(|&a, &b| {
            reqs[b]
                .bandwidth_gbps
                .cmp(&reqs[a].bandwidth_gbps)
                .then_with(|| reqs[a].id.cmp(&reqs[b].id))
        });
    }
    order
}

/// `(eta1, eta2)` for the weighted objective, filling unset weights so the
/// throughput term strictly dominates.
pub fn objective_weights(instance: &Instance) -> (f64, f64) {
    let (eta1, eta2) = match instance.planner.objective_mode {
        ObjectiveMode::Weighted { eta1, eta2 } => (eta1, eta2),
        ObjectiveMode::Lexicographic => (None, None),
    };
    let cells = instance.requests.len() * instance.topology.links().len() * instance.modes * instance.slot_count();
    let default_eta2 = 1.0 / (cells as f64 * decimal::to_f64(instance.max_bandwidth_gbps()) + 1.0);
    (eta1.unwrap_or(1.0), eta2.unwrap_or(default_eta2))
}

/// Objective comparison under the instance's objective mode.
#[derive(Clone, Copy, Debug)]
struct Objective {
    weights: Option<(f64, f64)>,
}

impl Objective {
    fn new(instance: &Instance) -> Self {
        let weights = match instance.planner.objective_mode {
            ObjectiveMode::Lexicographic => None,
            ObjectiveMode::Weighted { .. } => Some(objective_weights(instance)),
        };
        Self { weights }
    }

    fn cmp(&self, a: (Rational, u64), b: (Rational, u64)) -> Ordering {
        match self.weights {
            None => a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)),
            Some((e1, e2)) => {
                let va = e1 * decimal::to_f64(a.0) - e2 * a.1 as f64;
                let vb = e1 * decimal::to_f64(b.0) - e2 * b.1 as f64;
                va.total_cmp(&vb)
            }
        }
    }
}

struct Prepared {
    candidates: Vec<Vec<CandidateAssignment>>,
    order: Vec<usize>,
}

fn prepare(instance: &Instance, limits: &SolveLimits, policy: OrderPolicy) -> Prepared {
    let candidates = (0..instance.requests.len())
        .map(|r| enumerate_candidates(instance, r, limits.k_paths, limits.mode_subsets))
        .collect();
    Prepared {
        candidates,
        order: request_order(instance, policy),
    }
}

fn greedy_with(instance: &Instance, prepared: &Prepared) -> Schedule {
    let mut state = SearchState::new(instance);
    for &r in &prepared.order {
        for cand in &prepared.candidates[r] {
            if state.try_commit(r, cand, true) {
                break;
            }
        }
    }
    snapshot(instance, &state, false)
}

fn snapshot(instance: &Instance, state: &SearchState<'_>, optimal: bool) -> Schedule {
    let accepted = state
        .chosen
        .iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| c.to_assignment(instance, &instance.requests[r].id)))
        .collect();
    Schedule::from_assignments(instance, accepted, optimal)
}

/// First-fit in policy order: each request takes its first candidate that
/// collides with nothing and keeps every receiver under the threshold.
pub fn solve_greedy(instance: &Instance, limits: &SolveLimits, policy: OrderPolicy) -> Schedule {
    let prepared = prepare(instance, limits, policy);
    greedy_with(instance, &prepared)
}

struct Search<'a> {
    instance: &'a Instance,
    prepared: &'a Prepared,
    objective: Objective,
    monotone: bool,
    /// Suffix sums over `order` of bandwidth and minimum cell count of the
    /// requests that have any candidate at all.
    rest_bandwidth: Vec<Rational>,
    rest_cells: Vec<u64>,
    incumbent: Schedule,
    nodes: u64,
    limits: &'a SolveLimits,
    started: Instant,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn over_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.limits.node_budget
            || (self.nodes.is_multiple_of(1024) && self.started.elapsed() > self.limits.time_budget)
        {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn dfs(&mut self, state: &mut SearchState<'a>, depth: usize, value: (Rational, u64)) {
        if depth == self.prepared.order.len() {
            if (self.monotone || state.all_within())
                && self.objective.cmp(value, self.incumbent.objective()) == Ordering::Greater
            {
                self.incumbent = snapshot(self.instance, state, false);
            }
            return;
        }
        let bound = (value.0 + self.rest_bandwidth[depth], value.1 + self.rest_cells[depth]);
        if self.objective.cmp(bound, self.incumbent.objective()) != Ordering::Greater {
            return;
        }
        let r = self.prepared.order[depth];
        let bandwidth = self.instance.requests[r].bandwidth_gbps;
        let prepared = self.prepared;
        for cand in &prepared.candidates[r] {
            if self.over_budget() {
                return;
            }
            if state.try_commit(r, cand, self.monotone) {
                self.dfs(state, depth + 1, (value.0 + bandwidth, value.1 + cand.lambda_count()));
                state.revert(r);
            }
        }
        if self.over_budget() {
            return;
        }
        self.dfs(state, depth + 1, value);
    }
}

fn search(instance: &Instance, limits: &SolveLimits, warm: Vec<Schedule>) -> Schedule {
    let prepared = prepare(instance, limits, OrderPolicy::DescendingBandwidth);
    let objective = Objective::new(instance);
    let mut incumbent = greedy_with(instance, &prepared);
    for w in warm {
        if objective.cmp(w.objective(), incumbent.objective()) == Ordering::Greater {
            incumbent = w;
        }
    }
    let n = prepared.order.len();
    let mut rest_bandwidth = vec![decimal::int(0); n + 1];
    let mut rest_cells = vec![0u64; n + 1];
    for depth in (0..n).rev() {
        let r = prepared.order[depth];
        let cheapest = prepared.candidates[r]
            .iter()
            .map(CandidateAssignment::lambda_count)
            .min();
        rest_bandwidth[depth] = rest_bandwidth[depth + 1];
        rest_cells[depth] = rest_cells[depth + 1];
        if let Some(cells) = cheapest {
            rest_bandwidth[depth] += instance.requests[r].bandwidth_gbps;
            rest_cells[depth] += cells;
        }
    }
    let mut run = Search {
        instance,
        prepared: &prepared,
        objective,
        monotone: instance.planner.accumulation_model.is_monotone(),
        rest_bandwidth,
        rest_cells,
        incumbent,
        nodes: 0,
        limits,
        started: Instant::now(),
        exhausted: false,
    };
    let mut state = SearchState::new(instance);
    run.dfs(&mut state, 0, (decimal::int(0), 0));
    let mut best = run.incumbent;
    best.optimal = !run.exhausted;
    best
}

/// Branch-and-bound over per-request decisions (one candidate or reject).
///
/// Prunes on slot collisions, crosstalk (incrementally, for monotone
/// accumulation models) and an optimistic bound that accepts every remaining
/// request at its cheapest candidate. The incumbent starts from the greedy
/// schedule and, on multi-slot frames, from the conventional baseline
/// carried over to the sliced grid, so the result is never worse than
/// either. Ties keep the first schedule found. When a budget runs out the
/// best schedule so far is returned with `optimal: false`.
pub fn solve_exact(instance: &Instance, limits: &SolveLimits) -> Schedule {
    if instance.slot_count() > 1 {
        let baseline = solve_baseline_conventional(instance, limits);
        solve_exact_from_baseline(instance, limits, &baseline)
    } else {
        search(instance, limits, Vec::new())
    }
}

/// `solve_exact` with an already computed conventional schedule, for
/// callers that report both.
pub fn solve_exact_from_baseline(instance: &Instance, limits: &SolveLimits, baseline: &Schedule) -> Schedule {
    let mut warm = Vec::new();
    if instance.slot_count() > 1 {
        let lifted = lift_baseline(instance, baseline);
        if crate::validate::check_schedule(instance, &lifted).is_ok_and(|r| r.pass) {
            warm.push(lifted);
        }
    }
    search(instance, limits, warm)
}

/// Conventional MDM: the same search on a one-slot frame, so every accepted
/// request holds its modes for the whole frame. The schedule refers to
/// `instance.collapsed_frame()`.
pub fn solve_baseline_conventional(instance: &Instance, limits: &SolveLimits) -> Schedule {
    search(&instance.collapsed_frame(), limits, Vec::new())
}

/// Re-expresses a one-slot schedule on the instance's sliced grid: same
/// paths and modes, leading slots just covering each request's units.
pub fn lift_baseline(instance: &Instance, baseline: &Schedule) -> Schedule {
    let accepted = baseline
        .accepted
        .iter()
        .filter_map(|a| {
            let r = instance.request_index(&a.request_id)?;
            let need = instance.required_units(r) as usize;
            let len = need.div_ceil(a.modes.len().max(1)).min(instance.slot_count());
            Some(Assignment {
                slots: SlotRange::new(0, len),
                ..a.clone()
            })
        })
        .collect();
    Schedule::from_assignments(instance, accepted, false)
}
