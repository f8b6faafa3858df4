//! Experiment support: seeded traffic, load sweeps and bundled fixtures.

pub mod fixtures;
mod sweep;
mod traffic;

pub use sweep::{
    cell_seed, edge_bisection_capacity_gbps, instance_digest, run_sweep, SolverKind, SweepAverage, SweepResult,
    SweepRow, CSV_HEADER,
};
pub use traffic::{gen_uniform_traffic, BANDWIDTH_LAW};

use crate::model::Instance;
use crate::solve::{Assignment, LinkRef, Schedule, SlotRange};

/// Numbers the bench scenario is expected to reproduce.
#[derive(Clone, Debug, PartialEq)]
pub struct Fig4Facts {
    pub victim: &'static str,
    pub aggressor: &'static str,
    /// Accumulated crosstalk at the victim under the slice placement.
    pub victim_total_db: f64,
    pub victim_feasible: bool,
    /// Link-c share of the worst receiver when all four modes share slot 0.
    pub forced_worst_link_c_db: f64,
    pub forced_worst_victim: &'static str,
}

/// The bench scenario, its slice placement and the expected facts.
pub fn fig4_scenario() -> (Instance, Schedule, Fig4Facts) {
    let instance = fixtures::fig4();
    let placement = fixtures::fig4_placement(&instance);
    let facts = Fig4Facts {
        victim: "G",
        aggressor: "A",
        victim_total_db: -36.01,
        victim_feasible: true,
        forced_worst_link_c_db: -5.87,
        forced_worst_victim: "E",
    };
    (instance, placement, facts)
}

/// A (LP01), D (LP11), E (LP02) and G (LP31) all in slot 0.
pub fn fig4_copropagating(instance: &Instance) -> Schedule {
    let accepted = [("A", 0), ("D", 1), ("E", 2), ("G", 3)]
        .iter()
        .map(|&(id, mode)| {
            let r = instance.request_index(id).expect("fig4 request");
            let src = instance.topology.node_id(instance.requests[r].source);
            Assignment {
                request_id: id.into(),
                path: vec![LinkRef::new(src, "A1"), LinkRef::new("A1", "E3")],
                modes: vec![mode],
                slots: SlotRange::new(0, 1),
            }
        })
        .collect();
    Schedule::from_assignments(instance, accepted, false)
}
