use std::collections::BTreeMap;

use serde::Serialize;

use super::{Family, VarGroup, VariableIndex};
use crate::model::Instance;

/// Variables per group and constraints per family. Zero entries are left out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ModelCounts {
    pub variables: BTreeMap<VarGroup, usize>,
    pub constraints: BTreeMap<Family, usize>,
}

impl ModelCounts {
    pub fn total_variables(&self) -> usize {
        self.variables.values().sum()
    }

    pub fn total_constraints(&self) -> usize {
        self.constraints.values().sum()
    }

    pub fn variables_in(&self, group: VarGroup) -> usize {
        self.variables.get(&group).copied().unwrap_or(0)
    }

    pub fn constraints_in(&self, family: Family) -> usize {
        self.constraints.get(&family).copied().unwrap_or(0)
    }
}

/// Model size from index-set arithmetic alone, without building anything.
pub fn count_formulas(instance: &Instance) -> ModelCounts {
    let topo = &instance.topology;
    let (r, e, m, t) = (
        instance.requests.len(),
        topo.links().len(),
        instance.modes,
        instance.slot_count(),
    );
    let mut counts = ModelCounts::default();
    for (group, n) in VarGroup::ALL.iter().zip(VariableIndex::group_sizes(r, e, m, t)) {
        if n > 0 {
            counts.variables.insert(*group, n);
        }
    }
    if r == 0 {
        return counts;
    }

    let active = |v: usize| topo.degree(v) > 0;
    let mut per_request = [0usize; 5];
    for req in &instance.requests {
        let (s, d) = (req.source, req.destination);
        let transit = (0..topo.nodes().len())
            .filter(|&v| v != s && v != d && active(v))
            .count();
        let direct = usize::from(topo.link_between(s, d).is_some());
        let end_terms = topo.outgoing(s).len() + topo.incoming(d).len() - 2 * direct;
        let eq3 = if end_terms > 0 { t } else { 0 };
        per_request[0] += 4 + transit;
        per_request[1] += eq3;
        per_request[2] += transit * t;
        per_request[3] += eq3 * m;
        per_request[4] += transit * m * t;
    }
    let pairs = r * (r - 1);
    let mode_pairs = m * (m - 1);
    let families = [
        (Family::Eq2, per_request[0]),
        (Family::Eq3, per_request[1]),
        (Family::Eq4, per_request[2]),
        (Family::Eq5, per_request[3]),
        (Family::Eq6, per_request[4]),
        (Family::Eq7, e * m * t),
        (Family::Eq8, r * e * m * (2 * t + 1)),
        (Family::Eq9, r * e * (t * (m + 1) + (2 * t + 1) + m * (t + 1) + m * t)),
        (Family::Eq10, r * e * (m * t + 2)),
        (Family::Eq11, if r >= 2 && m >= 2 && e >= 1 { r } else { 0 }),
        (Family::Eq12, 2 * pairs * e * mode_pairs),
        (Family::Eq13, pairs * e * mode_pairs * t),
        (Family::Eq14, pairs * e * mode_pairs * t),
        (Family::Eq15, pairs * e * mode_pairs * t),
    ];
    for (family, n) in families {
        if n > 0 {
            counts.constraints.insert(family, n);
        }
    }
    counts
}
