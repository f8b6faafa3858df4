//! Incremental occupancy and crosstalk bookkeeping shared by the search
//! routines.

use super::candidates::CandidateAssignment;
use crate::model::Instance;
use crate::xtalk::{pairwise_contribution, AccumulationModel, Accumulator, Contribution};

pub(crate) struct SearchState<'a> {
    pub instance: &'a Instance,
    model: AccumulationModel,
    modes: usize,
    slots: usize,
    /// Coupling per (link, aggressor mode, victim mode).
    coupling: Vec<Option<Contribution>>,
    /// Request holding each (link, mode, slot) cell.
    cells: Vec<Option<u32>>,
    /// Committed requests per link, in commit order.
    on_link: Vec<Vec<usize>>,
    pub chosen: Vec<Option<&'a CandidateAssignment>>,
    pub totals: Vec<Accumulator>,
    undo: Vec<Vec<(usize, Accumulator)>>,
}

impl<'a> SearchState<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let modes = instance.modes;
        let slots = instance.slot_count();
        let links = instance.topology.links();
        let model = instance.planner.accumulation_model;
        let mut coupling = Vec::with_capacity(links.len() * modes * modes);
        for link in links {
            for a in 0..modes {
                for v in 0..modes {
                    coupling.push((a != v).then(|| {
                        pairwise_contribution(&instance.crosstalk, a, v, link.length_m, model)
                            .expect("validated matrix has every off-diagonal entry")
                    }));
                }
            }
        }
        Self {
            instance,
            model,
            modes,
            slots,
            coupling,
            cells: vec![None; links.len() * modes * slots],
            on_link: vec![Vec::new(); links.len()],
            chosen: vec![None; instance.requests.len()],
            totals: vec![Accumulator::default(); instance.requests.len()],
            undo: vec![Vec::new(); instance.requests.len()],
        }
    }

    fn cell(&self, link: usize, mode: usize, slot: usize) -> usize {
        (link * self.modes + mode) * self.slots + slot
    }

    fn coupling(&self, link: usize, aggressor: usize, victim: usize) -> Contribution {
        self.coupling[(link * self.modes + aggressor) * self.modes + victim].expect("distinct modes")
    }

    fn free(&self, cand: &CandidateAssignment) -> bool {
        cand.path.links.iter().all(|&l| {
            cand.modes
                .iter()
                .all(|&m| (cand.slots.start..cand.slots.end).all(|t| self.cells[self.cell(l, m, t)].is_none()))
        })
    }

    fn within(&self, acc: &Accumulator) -> bool {
        acc.level(self.model).within(self.instance.planner.xt_threshold_db)
    }

    /// Commits `cand` for request `r` if it collides with nothing and, when
    /// `check_crosstalk` is set, leaves every affected receiver under the
    /// threshold. Returns whether it was committed.
    pub fn try_commit(&mut self, r: usize, cand: &'a CandidateAssignment, check_crosstalk: bool) -> bool {
        debug_assert!(self.chosen[r].is_none());
        if !self.free(cand) {
            return false;
        }
        let mut own = Accumulator::default();
        let mut others: Vec<(usize, Accumulator)> = Vec::new();
        for &l in &cand.path.links {
            for &other in &self.on_link[l] {
                let theirs = self.chosen[other].expect("committed");
                if !theirs.slots.overlaps(&cand.slots) {
                    continue;
                }
                let slot = match others.iter().position(|(o, _)| *o == other) {
                    Some(i) => i,
                    None => {
                        others.push((other, self.totals[other]));
                        others.len() - 1
                    }
                };
                for &om in &theirs.modes {
                    for &cm in &cand.modes {
                        own.add(self.coupling(l, om, cm));
                        others[slot].1.add(self.coupling(l, cm, om));
                    }
                }
            }
        }
        if check_crosstalk && !(self.within(&own) && others.iter().all(|(_, acc)| self.within(acc))) {
            return false;
        }
        for &l in &cand.path.links {
            for &m in &cand.modes {
                for t in cand.slots.start..cand.slots.end {
                    let c = self.cell(l, m, t);
                    self.cells[c] = Some(r as u32);
                }
            }
            self.on_link[l].push(r);
        }
        let mut saved = Vec::with_capacity(others.len());
        for (other, acc) in others {
            saved.push((other, self.totals[other]));
            self.totals[other] = acc;
        }
        self.undo[r] = saved;
        self.totals[r] = own;
        self.chosen[r] = Some(cand);
        true
    }

    /// Reverts the most recent commit, which must be request `r`.
    pub fn revert(&mut self, r: usize) {
        let cand = self.chosen[r].take().expect("committed");
        for &l in &cand.path.links {
            for &m in &cand.modes {
                for t in cand.slots.start..cand.slots.end {
                    let c = self.cell(l, m, t);
                    self.cells[c] = None;
                }
            }
            let popped = self.on_link[l].pop();
            debug_assert_eq!(popped, Some(r));
        }
        for (other, acc) in std::mem::take(&mut self.undo[r]) {
            self.totals[other] = acc;
        }
        self.totals[r] = Accumulator::default();
    }

    /// Every committed receiver is under the threshold.
    pub fn all_within(&self) -> bool {
        self.chosen
            .iter()
            .zip(&self.totals)
            .all(|(c, acc)| c.is_none() || self.within(acc))
    }
}
