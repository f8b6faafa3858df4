//! Solver-independent schedule checker.
//!
//! Everything is re-derived from the schedule's path / modes / interval form:
//! the per-(request, link, mode, slot) occupancy is rebuilt first and each
//! constraint family is then tested on that occupancy alone.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::decimal::{self, Rational};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::solve::Schedule;
use crate::xtalk::{accumulate_for_request, XtLevel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Path connectivity and unit conservation.
    Eq2,
    /// Per-slot continuity between source and destination.
    Eq3,
    /// Per-slot continuity at transit nodes.
    Eq4,
    /// Per-mode continuity between source and destination.
    Eq5,
    /// Per-mode continuity at transit nodes.
    Eq6,
    /// A (link, mode, slot) cell is used once.
    Eq7,
    /// Slots of a request on a link are contiguous.
    Eq8,
    /// Every used mode carries the same slots.
    Eq9,
    /// Enough units on every used link.
    Eq10,
    /// Accumulated crosstalk under the threshold.
    Eq11,
    /// The schedule's own objective pair disagrees with its assignments.
    Reported,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Location {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub family: Family,
    pub location: Location,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn families(&self) -> BTreeSet<Family> {
        self.violations.iter().map(|v| v.family).collect()
    }
}

/// Sum of bandwidth over accepted requests.
pub fn throughput_gbps(instance: &Instance, schedule: &Schedule) -> Rational {
    schedule
        .accepted
        .iter()
        .filter_map(|a| instance.request_index(&a.request_id))
        .map(|r| instance.requests[r].bandwidth_gbps)
        .sum()
}

/// Number of occupied (request, link, mode, slot) cells.
pub fn resource_usage(schedule: &Schedule) -> u64 {
    schedule
        .accepted
        .iter()
        .map(|a| (a.path.len() * a.modes.len() * a.slots.len()) as u64)
        .sum()
}

struct Derived {
    /// Request index and resolved link indices per accepted assignment.
    resolved: Vec<(usize, Vec<usize>)>,
    /// (link, mode, slot) -> requests.
    cells: BTreeMap<(usize, usize, usize), Vec<usize>>,
    /// (request, link) -> occupied (mode, slot).
    per_link: HashMap<(usize, usize), BTreeSet<(usize, usize)>>,
}

fn structural(instance: &Instance, schedule: &Schedule) -> Result<Vec<(usize, Vec<usize>)>> {
    let topo = &instance.topology;
    let mut problems = Vec::new();
    let mut seen = HashSet::new();
    let mut resolved = Vec::new();
    for a in &schedule.accepted {
        let Some(r) = instance.request_index(&a.request_id) else {
            problems.push(format!("accepted request '{}' is not in the instance", a.request_id));
            continue;
        };
        if !seen.insert(r) {
            problems.push(format!("request '{}' is listed more than once", a.request_id));
        }
        let mut links = Vec::with_capacity(a.path.len());
        for l in &a.path {
            match topo
                .node_index(&l.from)
                .zip(topo.node_index(&l.to))
                .and_then(|(f, t)| topo.link_between(f, t))
            {
                Some(idx) => links.push(idx),
                None => problems.push(format!("request '{}' uses missing link {l}", a.request_id)),
            }
        }
        if links.iter().collect::<HashSet<_>>().len() != links.len() {
            problems.push(format!("request '{}' traverses a link twice", a.request_id));
        }
        if let Some(&m) = a.modes.iter().find(|&&m| m >= instance.modes) {
            problems.push(format!(
                "request '{}' uses mode {m} of {}",
                a.request_id, instance.modes
            ));
        }
        if a.modes.iter().collect::<HashSet<_>>().len() != a.modes.len() {
            problems.push(format!("request '{}' lists a mode twice", a.request_id));
        }
        if a.slots.end > instance.slot_count() {
            problems.push(format!(
                "request '{}' uses slots up to {} of a {}-slot frame",
                a.request_id,
                a.slots.end,
                instance.slot_count()
            ));
        }
        resolved.push((r, links));
    }
    for id in &schedule.rejected {
        match instance.request_index(id) {
            None => problems.push(format!("rejected request '{id}' is not in the instance")),
            Some(r) if !seen.insert(r) => problems.push(format!("request '{id}' is listed more than once")),
            Some(_) => {}
        }
    }
    for r in &instance.requests {
        if !schedule.accepted.iter().any(|a| a.request_id == r.id) && !schedule.rejected.contains(&r.id) {
            problems.push(format!("request '{}' is neither accepted nor rejected", r.id));
        }
    }
    if problems.is_empty() {
        Ok(resolved)
    } else {
        Err(Error::Structural(problems))
    }
}

fn derive(schedule: &Schedule, resolved: Vec<(usize, Vec<usize>)>) -> Derived {
    let mut cells: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    let mut per_link: HashMap<_, BTreeSet<_>> = HashMap::new();
    for (a, (r, links)) in schedule.accepted.iter().zip(&resolved) {
        for &l in links {
            let entry = per_link.entry((*r, l)).or_default();
            for &m in &a.modes {
                for t in a.slots.start..a.slots.end {
                    cells.entry((l, m, t)).or_default().push(*r);
                    entry.insert((m, t));
                }
            }
        }
    }
    Derived {
        resolved,
        cells,
        per_link,
    }
}

/// Transitions in a 0/1 pattern padded with a zero on both ends.
fn transitions(pattern: &[bool]) -> usize {
    let mut prev = false;
    let mut count = 0;
    for &x in pattern.iter().chain(std::iter::once(&false)) {
        if x != prev {
            count += 1;
        }
        prev = x;
    }
    count
}

struct Checker<'a> {
    instance: &'a Instance,
    out: Vec<Violation>,
}

impl Checker<'_> {
    fn push(&mut self, family: Family, location: Location, message: String) {
        self.out.push(Violation {
            family,
            location,
            message,
        });
    }

    fn link_name(&self, l: usize) -> String {
        self.instance.topology.link_label(l)
    }
}

/// Checks a schedule against every constraint family. Dangling references
/// are reported as a structural error and no constraint is checked.
pub fn check_schedule(instance: &Instance, schedule: &Schedule) -> Result<ViolationReport> {
    let resolved = structural(instance, schedule)?;
    let derived = derive(schedule, resolved);
    let topo = &instance.topology;
    let modes = instance.modes;
    let slots = instance.slot_count();
    let mut ck = Checker {
        instance,
        out: Vec::new(),
    };

    for (r, links) in &derived.resolved {
        let r = *r;
        let req = &instance.requests[r];
        let need = instance.required_units(r) as usize;
        let at_request = || Location {
            request: Some(req.id.clone()),
            ..Default::default()
        };
        let units = |l: usize| derived.per_link.get(&(r, l)).map_or(0, BTreeSet::len);
        let has = |l: usize, m: usize, t: usize| derived.per_link.get(&(r, l)).is_some_and(|s| s.contains(&(m, t)));

        // Path shape.
        match (links.first(), links.last()) {
            (Some(&first), Some(&last)) => {
                if topo.links()[first].from != req.source {
                    ck.push(
                        Family::Eq2,
                        at_request(),
                        format!("path of '{}' does not start at its source", req.id),
                    );
                }
                if topo.links()[last].to != req.destination {
                    ck.push(
                        Family::Eq2,
                        at_request(),
                        format!("path of '{}' does not end at its destination", req.id),
                    );
                }
                for w in links.windows(2) {
                    if topo.links()[w[0]].to != topo.links()[w[1]].from {
                        ck.push(
                            Family::Eq2,
                            Location {
                                link: Some(ck.link_name(w[1])),
                                ..at_request()
                            },
                            format!("path of '{}' is disconnected before {}", req.id, ck.link_name(w[1])),
                        );
                    }
                }
                let mut visited = vec![topo.links()[first].from];
                for &l in links {
                    let to = topo.links()[l].to;
                    if visited.contains(&to) {
                        ck.push(
                            Family::Eq2,
                            Location {
                                node: Some(topo.node_id(to).into()),
                                ..at_request()
                            },
                            format!("path of '{}' revisits {}", req.id, topo.node_id(to)),
                        );
                    }
                    visited.push(to);
                }
            }
            _ => ck.push(
                Family::Eq2,
                at_request(),
                format!("'{}' is accepted with an empty path", req.id),
            ),
        }

        // Unit conservation per node.
        let mut nodes: BTreeSet<usize> = [req.source, req.destination].into();
        for &l in links {
            nodes.insert(topo.links()[l].from);
            nodes.insert(topo.links()[l].to);
        }
        let cap = modes * slots;
        for &n in &nodes {
            let out: usize = topo.outgoing(n).iter().map(|&l| units(l)).sum();
            let inn: usize = topo.incoming(n).iter().map(|&l| units(l)).sum();
            let at = Location {
                node: Some(topo.node_id(n).into()),
                ..at_request()
            };
            let net = out as i64 - inn as i64;
            let ok = if n == req.source {
                (need as i64..=cap as i64).contains(&net)
            } else if n == req.destination {
                (need as i64..=cap as i64).contains(&-net)
            } else {
                net == 0
            };
            if !ok {
                ck.push(
                    Family::Eq2,
                    at,
                    format!(
                        "'{}' has net outflow {net} units at {} (needs {need})",
                        req.id,
                        topo.node_id(n)
                    ),
                );
            }
        }

        // Continuity per slot and per (mode, slot).
        for t in 0..slots {
            let sum_out = |n: usize, m: Option<usize>| -> usize {
                topo.outgoing(n)
                    .iter()
                    .map(|&l| match m {
                        Some(m) => has(l, m, t) as usize,
                        None => (0..modes).filter(|&m| has(l, m, t)).count(),
                    })
                    .sum()
            };
            let sum_in = |n: usize, m: Option<usize>| -> usize {
                topo.incoming(n)
                    .iter()
                    .map(|&l| match m {
                        Some(m) => has(l, m, t) as usize,
                        None => (0..modes).filter(|&m| has(l, m, t)).count(),
                    })
                    .sum()
            };
            let slot_at = |n: Option<usize>, m: Option<usize>| Location {
                request: Some(req.id.clone()),
                node: n.map(|n| topo.node_id(n).to_string()),
                mode: m,
                slot: Some(t),
                ..Default::default()
            };
            if sum_out(req.source, None) != sum_in(req.destination, None) {
                ck.push(
                    Family::Eq3,
                    slot_at(None, None),
                    format!("'{}' leaves and arrives with different slot {t} usage", req.id),
                );
            }
            for m in 0..modes {
                if sum_out(req.source, Some(m)) != sum_in(req.destination, Some(m)) {
                    ck.push(
                        Family::Eq5,
                        slot_at(None, Some(m)),
                        format!("'{}' changes mode {m} usage end to end", req.id),
                    );
                }
            }
            for &z in nodes.iter().filter(|&&z| z != req.source && z != req.destination) {
                if sum_out(z, None) != sum_in(z, None) {
                    ck.push(
                        Family::Eq4,
                        slot_at(Some(z), None),
                        format!("'{}' breaks slot {t} continuity at {}", req.id, topo.node_id(z)),
                    );
                }
                for m in 0..modes {
                    if sum_out(z, Some(m)) != sum_in(z, Some(m)) {
                        ck.push(
                            Family::Eq6,
                            slot_at(Some(z), Some(m)),
                            format!("'{}' breaks mode {m} continuity at {}", req.id, topo.node_id(z)),
                        );
                    }
                }
            }
        }

        // Per-link shape: contiguity, shared slot pattern, capacity.
        for &l in links {
            let lname = ck.link_name(l);
            let at = |m: Option<usize>| Location {
                request: Some(req.id.clone()),
                link: Some(lname.clone()),
                mode: m,
                ..Default::default()
            };
            let aggregate: Vec<bool> = (0..slots).map(|t| (0..modes).any(|m| has(l, m, t))).collect();
            for m in 0..modes {
                let pattern: Vec<bool> = (0..slots).map(|t| has(l, m, t)).collect();
                if transitions(&pattern) > 2 {
                    ck.push(
                        Family::Eq8,
                        at(Some(m)),
                        format!("'{}' uses non-contiguous slots on mode {m}", req.id),
                    );
                }
                if pattern.iter().any(|&x| x) && pattern != aggregate {
                    ck.push(
                        Family::Eq9,
                        at(Some(m)),
                        format!("'{}' uses different slots on mode {m}", req.id),
                    );
                }
            }
            if transitions(&aggregate) > 2 {
                ck.push(
                    Family::Eq9,
                    at(None),
                    format!("'{}' aggregate slot usage is not contiguous", req.id),
                );
            }
            if units(l) < need {
                ck.push(
                    Family::Eq10,
                    at(None),
                    format!("'{}' has {} units on {lname} but needs {need}", req.id, units(l)),
                );
            }
        }
    }

    for (&(l, m, t), holders) in &derived.cells {
        if holders.len() > 1 {
            let ids: Vec<&str> = holders.iter().map(|&r| instance.requests[r].id.as_str()).collect();
            ck.push(
                Family::Eq7,
                Location {
                    link: Some(ck.link_name(l)),
                    mode: Some(m),
                    slot: Some(t),
                    ..Default::default()
                },
                format!("{} share mode {m} slot {t} on {}", ids.join(", "), ck.link_name(l)),
            );
        }
    }

    for a in &schedule.accepted {
        let report = accumulate_for_request(&a.request_id, schedule, instance)?;
        if !report.feasible {
            let total = match report.total_db {
                XtLevel::Db(d) => format!("{d:.2} dB"),
                XtLevel::NoCrosstalk => "-inf".into(),
            };
            ck.push(
                Family::Eq11,
                Location {
                    request: Some(a.request_id.clone()),
                    ..Default::default()
                },
                format!(
                    "'{}' accumulates {total} of crosstalk, above {} dB",
                    a.request_id, instance.planner.xt_threshold_db
                ),
            );
        }
    }

    let throughput = throughput_gbps(instance, schedule);
    if throughput != schedule.throughput_gbps {
        ck.push(
            Family::Reported,
            Location::default(),
            format!(
                "reported throughput {} Gb/s, assignments carry {}",
                decimal::to_f64(schedule.throughput_gbps),
                decimal::to_f64(throughput)
            ),
        );
    }
    let usage = resource_usage(schedule);
    if usage != schedule.lambda_count {
        ck.push(
            Family::Reported,
            Location::default(),
            format!(
                "reported {} occupied cells, assignments hold {usage}",
                schedule.lambda_count
            ),
        );
    }

    Ok(ViolationReport {
        pass: ck.out.is_empty(),
        violations: ck.out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;
    use crate::solve::{Assignment, LinkRef, SlotRange};

    fn assign(id: &str, path: &[(&str, &str)], modes: &[usize], slots: (usize, usize)) -> Assignment {
        Assignment {
            request_id: id.into(),
            path: path.iter().map(|(f, t)| LinkRef::new(*f, *t)).collect(),
            modes: modes.to_vec(),
            slots: SlotRange::new(slots.0, slots.1),
        }
    }

    #[test]
    fn transitions_are_padded() {
        assert_eq!(transitions(&[false, true, true, false]), 2);
        assert_eq!(transitions(&[true, true, true, true]), 2);
        assert_eq!(transitions(&[true, false, true, false]), 4);
        assert_eq!(transitions(&[false; 4]), 0);
    }

    #[test]
    fn empty_schedule_passes() {
        let inst = fixtures::fig2();
        let report = check_schedule(&inst, &Schedule::empty(&inst)).unwrap();
        assert!(report.pass);
        assert_eq!(throughput_gbps(&inst, &Schedule::empty(&inst)), decimal::int(0));
    }

    #[test]
    fn double_booking_is_one_eq7() {
        let inst = fixtures::single_link(2, 4, &[("A", 1), ("B", 1)], 100.0);
        let s = Schedule::from_assignments(
            &inst,
            vec![
                assign("A", &[("a", "b")], &[0], (2, 3)),
                assign("B", &[("a", "b")], &[0], (2, 3)),
            ],
            false,
        );
        let report = check_schedule(&inst, &s).unwrap();
        assert_eq!(report.violations.len(), 1, "{report:?}");
        let v = &report.violations[0];
        assert_eq!(v.family, Family::Eq7);
        assert_eq!((v.location.mode, v.location.slot), (Some(0), Some(2)));
    }

    #[test]
    fn shared_200m_link_sliced_vs_overlapping() {
        let inst = fixtures::shared_200m_pair();
        let sliced = Schedule::from_assignments(
            &inst,
            vec![
                assign("A", &[("a", "b")], &[0], (0, 2)),
                assign("B", &[("a", "b")], &[1], (2, 4)),
            ],
            false,
        );
        assert!(check_schedule(&inst, &sliced).unwrap().pass);

        let overlapping = Schedule::from_assignments(
            &inst,
            vec![
                assign("A", &[("a", "b")], &[0], (0, 2)),
                assign("B", &[("a", "b")], &[1], (0, 2)),
            ],
            false,
        );
        let report = check_schedule(&inst, &overlapping).unwrap();
        assert_eq!(report.families(), [Family::Eq11].into());
        let b = report
            .violations
            .iter()
            .find(|v| v.location.request.as_deref() == Some("B"))
            .unwrap();
        assert!(b.message.contains("-12.79 dB"), "{}", b.message);
    }

    #[test]
    fn throughput_and_usage() {
        let inst = fixtures::fig2();
        let r = inst
            .requests
            .iter()
            .find(|r| r.bandwidth_gbps == decimal::int(3))
            .unwrap();
        let src = inst.topology.node_id(r.source).to_string();
        let dst = inst.topology.node_id(r.destination).to_string();
        let s = Schedule::from_assignments(
            &inst,
            vec![assign(&r.id, &[(&src, "A1"), ("A1", &dst)], &[0], (0, 2))],
            false,
        );
        assert_eq!(throughput_gbps(&inst, &s), decimal::int(3));
        assert_eq!(resource_usage(&s), 4);
        assert!(check_schedule(&inst, &s).unwrap().pass);

        let mut doubled = s.clone();
        doubled.accepted[0].modes = vec![0, 1];
        assert_eq!(resource_usage(&doubled), 8);

        let pair = fixtures::shared_200m_pair();
        let both = Schedule::from_assignments(
            &pair,
            vec![
                assign("A", &[("a", "b")], &[0], (0, 2)),
                assign("B", &[("a", "b")], &[1], (2, 4)),
            ],
            false,
        );
        assert_eq!(throughput_gbps(&pair, &both), decimal::int(10));
    }

    #[test]
    fn dangling_references_are_structural() {
        let inst = fixtures::single_link(2, 4, &[("A", 1)], 100.0);
        let mut s = Schedule::from_assignments(&inst, vec![assign("A", &[("b", "a")], &[0], (0, 1))], false);
        assert!(matches!(check_schedule(&inst, &s), Err(Error::Structural(_))));
        s.accepted[0] = assign("A", &[("a", "b")], &[5], (0, 1));
        assert!(matches!(check_schedule(&inst, &s), Err(Error::Structural(_))));
        s.accepted[0] = assign("Z", &[("a", "b")], &[0], (0, 1));
        assert!(matches!(check_schedule(&inst, &s), Err(Error::Structural(_))));
    }

    #[test]
    fn dropped_link_breaks_conservation() {
        let inst = fixtures::fig2();
        let r = &inst.requests[0];
        let src = inst.topology.node_id(r.source).to_string();
        let dst = inst.topology.node_id(r.destination).to_string();
        let need = inst.required_units(0) as usize;
        let full = assign(&r.id, &[(&src, "A1"), ("A1", &dst)], &[0], (0, need));
        let s = Schedule::from_assignments(&inst, vec![full.clone()], false);
        assert!(check_schedule(&inst, &s).unwrap().pass);
        let mut cut = s.clone();
        cut.accepted[0].path.remove(1);
        let report = check_schedule(&inst, &cut).unwrap();
        assert!(report.families().contains(&Family::Eq2));
    }
}
