//! Domain types: topology, requests, frame grid, crosstalk matrix and the
//! validated planning instance.

mod instance;
mod matrix;
mod topology;

pub use instance::{
    load_instance, read_instance, required_slot_units, slot_capacity_gbps, FrameConfig, Instance, InstanceDoc,
    ObjectiveMode, PlannerConfig, Request, RequestDoc,
};
pub use matrix::{lp_label, mode_label, CrosstalkMatrix, LP_LABELS, REFERENCE_XT_DB_PER_100M};
pub use topology::{build_fat_tree, valid_identifier, Link, LinkDoc, Node, Tier, Topology, TopologyDoc};
