//! Schedule construction: candidate enumeration, exact branch-and-bound,
//! greedy first-fit and the conventional-MDM baseline.

mod candidates;
mod paths;
mod schedule;
mod search;
mod state;

pub use candidates::{enumerate_candidates, mode_sets, CandidateAssignment, ModeSubsets};
pub use paths::{compare_paths, k_shortest_paths, Path};
pub use schedule::{Assignment, LinkRef, Schedule, SlotRange};
pub use search::{
    lift_baseline, objective_weights, solve_baseline_conventional, solve_exact, solve_exact_from_baseline,
    solve_greedy, OrderPolicy, SolveLimits,
};
