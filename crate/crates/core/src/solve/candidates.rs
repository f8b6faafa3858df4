use super::paths::{k_shortest_paths, Path};
use super::schedule::{Assignment, LinkRef, SlotRange};
use crate::model::Instance;

/// Which mode sets a request may occupy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ModeSubsets {
    /// Runs of consecutive mode indices.
    #[default]
    Contiguous,
    /// Every non-empty subset.
    All,
}

/// One way to carry a request: a path, a mode set and a slot interval that
/// repeat on every link of the path.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateAssignment {
    pub path: Path,
    /// Rank of `path` among the request's k shortest paths.
    pub path_rank: usize,
    pub modes: Vec<usize>,
    pub slots: SlotRange,
    /// `|modes|·|slots|` slot units per link.
    pub supply: u32,
}

impl CandidateAssignment {
    pub fn lambda_count(&self) -> u64 {
        (self.path.hops() as u64) * (self.supply as u64)
    }

    pub fn to_assignment(&self, instance: &Instance, request_id: &str) -> Assignment {
        let topo = &instance.topology;
        Assignment {
            request_id: request_id.to_string(),
            path: self
                .path
                .links
                .iter()
                .map(|&l| {
                    let link = &topo.links()[l];
                    LinkRef::new(topo.node_id(link.from), topo.node_id(link.to))
                })
                .collect(),
            modes: self.modes.clone(),
            slots: self.slots,
        }
    }
}

pub fn mode_sets(mode_count: usize, subsets: ModeSubsets) -> Vec<Vec<usize>> {
    match subsets {
        ModeSubsets::Contiguous => (0..mode_count)
            .flat_map(|start| (start + 1..=mode_count).map(move |end| (start..end).collect()))
            .collect(),
        ModeSubsets::All => (1u32..(1 << mode_count))
            .map(|mask| (0..mode_count).filter(|m| mask & (1 << m) != 0).collect())
            .collect(),
    }
}

/// All minimal (path, modes, interval) options for request index `r`.
///
/// A candidate is kept when its supply covers the request's slot units and
/// dropping either one mode or one slot would not. Ordered by supply, path
/// rank, interval length, first slot, then mode indices.
pub fn enumerate_candidates(instance: &Instance, r: usize, k: usize, subsets: ModeSubsets) -> Vec<CandidateAssignment> {
    let req = &instance.requests[r];
    let need = instance.required_units(r);
    let slots = instance.slot_count();
    let paths = k_shortest_paths(&instance.topology, req.source, req.destination, k);
    let sets = mode_sets(instance.modes, subsets);
    let mut out = Vec::new();
    for (rank, path) in paths.iter().enumerate() {
        for modes in &sets {
            let width = modes.len() as u32;
            for len in 1..=slots as u32 {
                let supply = width * len;
                if supply < need || supply - need >= width.min(len) {
                    continue;
                }
                for start in 0..=(slots - len as usize) {
                    out.push(CandidateAssignment {
                        path: path.clone(),
                        path_rank: rank,
                        modes: modes.clone(),
                        slots: SlotRange::new(start, start + len as usize),
                        supply,
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.supply, a.path_rank, a.slots.len(), a.slots.start, &a.modes).cmp(&(
            b.supply,
            b.path_rank,
            b.slots.len(),
            b.slots.start,
            &b.modes,
        ))
    });
    out
}
