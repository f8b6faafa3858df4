use std::collections::BTreeMap;

use super::{
    count_formulas, Constraint, Family, MilpModel, Objective, ObjectiveSense, Objectives, Sense, VarGroup, VarKind,
    Variable, VariableIndex,
};
use crate::decimal;
use crate::error::{Error, Result};
use crate::model::{Instance, ObjectiveMode};
use crate::solve::objective_weights;
use crate::xtalk::pairwise_contribution;

struct Names<'a> {
    instance: &'a Instance,
}

impl Names<'_> {
    fn r(&self, r: usize) -> &str {
        &self.instance.requests[r].id
    }

    fn e(&self, e: usize) -> String {
        let topo = &self.instance.topology;
        let link = &topo.links()[e];
        format!("e{}_{}", topo.node_id(link.from), topo.node_id(link.to))
    }

    fn n(&self, v: usize) -> &str {
        self.instance.topology.node_id(v)
    }
}

/// Accumulates terms, merging repeated variables and dropping zeros.
#[derive(Default)]
struct Row {
    terms: BTreeMap<usize, f64>,
    order: Vec<usize>,
}

impl Row {
    fn add(&mut self, var: usize, coef: f64) -> &mut Self {
        match self.terms.get_mut(&var) {
            Some(c) => *c += coef,
            None => {
                self.terms.insert(var, coef);
                self.order.push(var);
            }
        }
        self
    }

    fn finish(self) -> Vec<(usize, f64)> {
        self.order
            .into_iter()
            .filter_map(|v| {
                let c = self.terms[&v];
                (c != 0.0).then_some((v, c))
            })
            .collect()
    }
}

struct Builder<'a> {
    idx: VariableIndex,
    names: Names<'a>,
    constraints: Vec<Constraint>,
}

impl Builder<'_> {
    fn push(&mut self, family: Family, name: String, row: Row, sense: Sense, rhs: f64) {
        let terms = row.finish();
        if terms.is_empty() {
            return;
        }
        self.constraints.push(Constraint {
            name,
            family,
            terms,
            sense,
            rhs,
        });
    }
}

fn variables(instance: &Instance, idx: &VariableIndex) -> Vec<Variable> {
    let names = Names { instance };
    let (rn, en, mn, tn) = (idx.requests, idx.links, idx.modes, idx.slots);
    let mut vars = Vec::with_capacity(idx.total());
    let mut push = |group, name: String| {
        vars.push(Variable {
            name,
            group,
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        })
    };
    for r in 0..rn {
        for e in 0..en {
            for m in 0..mn {
                for t in 0..tn {
                    push(
                        VarGroup::Lambda,
                        format!("l_r{}_{}_m{}_t{t}", names.r(r), names.e(e), m + 1),
                    );
                }
            }
        }
    }
    for r in 0..rn {
        push(VarGroup::Rho, format!("rho_r{}", names.r(r)));
    }
    for (r1, r2) in ordered_pairs(rn) {
        for e in 0..en {
            for (m1, m2) in ordered_pairs(mn) {
                for t in 0..tn {
                    push(
                        VarGroup::Beta,
                        format!(
                            "b_r{}_r{}_{}_m{}_m{}_t{t}",
                            names.r(r1),
                            names.r(r2),
                            names.e(e),
                            m1 + 1,
                            m2 + 1
                        ),
                    );
                }
            }
        }
    }
    for (r1, r2) in ordered_pairs(rn) {
        for e in 0..en {
            for (m1, m2) in ordered_pairs(mn) {
                push(
                    VarGroup::Theta,
                    format!(
                        "th_r{}_r{}_{}_m{}_m{}",
                        names.r(r1),
                        names.r(r2),
                        names.e(e),
                        m1 + 1,
                        m2 + 1
                    ),
                );
            }
        }
    }
    for r in 0..rn {
        for e in 0..en {
            for m in 0..mn {
                for k in 0..=tn {
                    push(
                        VarGroup::ModeTransition,
                        format!("cm_r{}_{}_m{}_k{k}", names.r(r), names.e(e), m + 1),
                    );
                }
            }
        }
    }
    for r in 0..rn {
        for e in 0..en {
            for k in 0..=tn {
                push(
                    VarGroup::AnyTransition,
                    format!("ca_r{}_{}_k{k}", names.r(r), names.e(e)),
                );
            }
        }
    }
    for r in 0..rn {
        for e in 0..en {
            for t in 0..tn {
                push(VarGroup::Occupancy, format!("u_r{}_{}_t{t}", names.r(r), names.e(e)));
            }
        }
    }
    for r in 0..rn {
        for e in 0..en {
            for m in 0..mn {
                push(
                    VarGroup::ModeUsed,
                    format!("w_r{}_{}_m{}", names.r(r), names.e(e), m + 1),
                );
            }
        }
    }
    for r in 0..rn {
        for e in 0..en {
            push(VarGroup::LinkUsed, format!("y_r{}_{}", names.r(r), names.e(e)));
        }
    }
    debug_assert_eq!(vars.len(), idx.total());
    vars
}

/// `(a, b)` with `a != b`, `a` major.
pub(crate) fn ordered_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
}

/// Builds the complete model. Fails with a size-limit error, before
/// allocating anything, when the variable count exceeds
/// `planner.max_variables`.
pub fn build_model(instance: &Instance) -> Result<MilpModel> {
    let expected = count_formulas(instance);
    let cap = instance.planner.max_variables;
    if expected.total_variables() > cap {
        return Err(Error::SizeLimit {
            count: expected.total_variables(),
            cap,
        });
    }
    let topo = &instance.topology;
    let idx = VariableIndex::new(
        instance.requests.len(),
        topo.links().len(),
        instance.modes,
        instance.slot_count(),
    );
    let variables = variables(instance, &idx);
    let mut b = Builder {
        idx: idx.clone(),
        names: Names { instance },
        constraints: Vec::new(),
    };
    flow_and_continuity(instance, &mut b);
    cell_exclusivity(&mut b);
    per_link_shape(instance, &mut b);
    crosstalk(instance, &mut b);

    b.constraints.sort_by_key(|c| c.family);

    let objectives = objectives(instance, &idx);
    Ok(MilpModel {
        name: instance.name.clone().unwrap_or_else(|| "otss".into()),
        variables,
        constraints: b.constraints,
        objectives,
        index: idx,
    })
}

fn objectives(instance: &Instance, idx: &VariableIndex) -> Objectives {
    let bandwidth: Vec<(usize, f64)> = (0..idx.requests)
        .map(|r| (idx.rho(r), decimal::to_f64(instance.requests[r].bandwidth_gbps)))
        .collect();
    let lambdas = || (0..idx.requests * idx.links * idx.modes * idx.slots).map(|i| i + idx.lambda(0, 0, 0, 0));
    match instance.planner.objective_mode {
        ObjectiveMode::Lexicographic => Objectives::TwoPhase {
            throughput: Objective {
                sense: ObjectiveSense::Maximize,
                terms: bandwidth,
            },
            usage: Objective {
                sense: ObjectiveSense::Minimize,
                terms: lambdas().map(|v| (v, 1.0)).collect(),
            },
            throughput_floor: None,
        },
        ObjectiveMode::Weighted { .. } => {
            let (eta1, eta2) = objective_weights(instance);
            let mut terms: Vec<(usize, f64)> = bandwidth.into_iter().map(|(v, b)| (v, eta1 * b)).collect();
            terms.extend(lambdas().map(|v| (v, -eta2)));
            Objectives::Weighted(Objective {
                sense: ObjectiveSense::Maximize,
                terms,
            })
        }
    }
}

fn flow_and_continuity(instance: &Instance, b: &mut Builder<'_>) {
    let topo = &instance.topology;
    let idx = b.idx.clone();
    let (mn, tn) = (idx.modes, idx.slots);
    let total_units = (mn * tn) as f64;
    for (r, req) in instance.requests.iter().enumerate() {
        let (s, d) = (req.source, req.destination);
        let q = instance.required_units(r) as f64;
        let rid = b.names.r(r).to_string();
        let net = |node: usize, sign: f64| {
            let mut row = Row::default();
            for &e in topo.outgoing(node) {
                for m in 0..mn {
                    for t in 0..tn {
                        row.add(idx.lambda(r, e, m, t), sign);
                    }
                }
            }
            for &e in topo.incoming(node) {
                for m in 0..mn {
                    for t in 0..tn {
                        row.add(idx.lambda(r, e, m, t), -sign);
                    }
                }
            }
            row
        };
        for (end, node, sign) in [("src", s, 1.0), ("dst", d, -1.0)] {
            let mut lo = net(node, sign);
            lo.add(idx.rho(r), -q);
            b.push(Family::Eq2, format!("eq2_{end}_min_r{rid}"), lo, Sense::Ge, 0.0);
            let mut hi = net(node, sign);
            hi.add(idx.rho(r), -total_units);
            b.push(Family::Eq2, format!("eq2_{end}_max_r{rid}"), hi, Sense::Le, 0.0);
        }
        let transit: Vec<usize> = (0..topo.nodes().len())
            .filter(|&v| v != s && v != d && topo.degree(v) > 0)
            .collect();
        for &v in &transit {
            let name = format!("eq2_node_r{rid}_n{}", b.names.n(v));
            b.push(Family::Eq2, name, net(v, 1.0), Sense::Eq, 0.0);
        }

        // Slot and mode continuity: what leaves the source in a (mode, slot)
        // reaches the destination, and transit nodes forward it unchanged.
        let end_to_end = |modes: &[usize], t: usize| {
            let mut row = Row::default();
            for &e in topo.outgoing(s) {
                for &m in modes {
                    row.add(idx.lambda(r, e, m, t), 1.0);
                }
            }
            for &e in topo.incoming(d) {
                for &m in modes {
                    row.add(idx.lambda(r, e, m, t), -1.0);
                }
            }
            row
        };
        let through = |v: usize, modes: &[usize], t: usize| {
            let mut row = Row::default();
            for &e in topo.incoming(v) {
                for &m in modes {
                    row.add(idx.lambda(r, e, m, t), 1.0);
                }
            }
            for &e in topo.outgoing(v) {
                for &m in modes {
                    row.add(idx.lambda(r, e, m, t), -1.0);
                }
            }
            row
        };
        let all_modes: Vec<usize> = (0..mn).collect();
        for t in 0..tn {
            b.push(
                Family::Eq3,
                format!("eq3_r{rid}_t{t}"),
                end_to_end(&all_modes, t),
                Sense::Eq,
                0.0,
            );
        }
        for &v in &transit {
            for t in 0..tn {
                let name = format!("eq4_r{rid}_n{}_t{t}", b.names.n(v));
                b.push(Family::Eq4, name, through(v, &all_modes, t), Sense::Eq, 0.0);
            }
        }
        for m in 0..mn {
            for t in 0..tn {
                let name = format!("eq5_r{rid}_m{}_t{t}", m + 1);
                b.push(Family::Eq5, name, end_to_end(&[m], t), Sense::Eq, 0.0);
            }
        }
        for &v in &transit {
            for m in 0..mn {
                for t in 0..tn {
                    let name = format!("eq6_r{rid}_n{}_m{}_t{t}", b.names.n(v), m + 1);
                    b.push(Family::Eq6, name, through(v, &[m], t), Sense::Eq, 0.0);
                }
            }
        }
    }
}

fn cell_exclusivity(b: &mut Builder<'_>) {
    let idx = b.idx.clone();
    for e in 0..idx.links {
        let ename = b.names.e(e);
        for m in 0..idx.modes {
            for t in 0..idx.slots {
                let mut row = Row::default();
                for r in 0..idx.requests {
                    row.add(idx.lambda(r, e, m, t), 1.0);
                }
                b.push(Family::Eq7, format!("eq7_{ename}_m{}_t{t}", m + 1), row, Sense::Le, 1.0);
            }
        }
    }
}

/// Emits `c_k >= |x_k - x_{k-1}|` for `k = 0..=T` with virtual zeros at
/// both ends, then `sum c <= 2`.
fn transitions(
    b: &mut Builder<'_>,
    family: Family,
    prefix: &str,
    slots: usize,
    x: impl Fn(usize) -> usize,
    c: impl Fn(usize) -> usize,
) {
    for k in 0..=slots {
        let cur = (k < slots).then(|| x(k));
        let prev = k.checked_sub(1).map(&x);
        if let Some(cur) = cur {
            let mut row = Row::default();
            row.add(c(k), 1.0).add(cur, -1.0);
            if let Some(p) = prev {
                row.add(p, 1.0);
            }
            b.push(family, format!("{prefix}_up_k{k}"), row, Sense::Ge, 0.0);
        }
        if let Some(p) = prev {
            let mut row = Row::default();
            row.add(c(k), 1.0).add(p, -1.0);
            if let Some(cur) = cur {
                row.add(cur, 1.0);
            }
            b.push(family, format!("{prefix}_dn_k{k}"), row, Sense::Ge, 0.0);
        }
    }
    let mut row = Row::default();
    for k in 0..=slots {
        row.add(c(k), 1.0);
    }
    b.push(family, format!("{prefix}_sum"), row, Sense::Le, 2.0);
}

fn per_link_shape(instance: &Instance, b: &mut Builder<'_>) {
    let idx = b.idx.clone();
    let (mn, tn) = (idx.modes, idx.slots);
    let big_m = instance.big_m() as f64;
    for r in 0..idx.requests {
        let rid = b.names.r(r).to_string();
        let q = instance.required_units(r) as f64;
        for e in 0..idx.links {
            let tag = format!("r{rid}_{}", b.names.e(e));
            for m in 0..mn {
                transitions(
                    b,
                    Family::Eq8,
                    &format!("eq8_{tag}_m{}", m + 1),
                    tn,
                    |t| idx.lambda(r, e, m, t),
                    |k| idx.mode_transition(r, e, m, k),
                );
            }

            for t in 0..tn {
                for m in 0..mn {
                    let mut row = Row::default();
                    row.add(idx.occupancy(r, e, t), 1.0).add(idx.lambda(r, e, m, t), -1.0);
                    b.push(
                        Family::Eq9,
                        format!("eq9_occ_{tag}_m{}_t{t}", m + 1),
                        row,
                        Sense::Ge,
                        0.0,
                    );
                }
                let mut row = Row::default();
                row.add(idx.occupancy(r, e, t), 1.0);
                for m in 0..mn {
                    row.add(idx.lambda(r, e, m, t), -1.0);
                }
                b.push(Family::Eq9, format!("eq9_occmax_{tag}_t{t}"), row, Sense::Le, 0.0);
            }
            transitions(
                b,
                Family::Eq9,
                &format!("eq9_{tag}"),
                tn,
                |t| idx.occupancy(r, e, t),
                |k| idx.any_transition(r, e, k),
            );
            for m in 0..mn {
                for t in 0..tn {
                    let mut row = Row::default();
                    row.add(idx.mode_used(r, e, m), 1.0).add(idx.lambda(r, e, m, t), -1.0);
                    b.push(
                        Family::Eq9,
                        format!("eq9_used_{tag}_m{}_t{t}", m + 1),
                        row,
                        Sense::Ge,
                        0.0,
                    );
                }
                let mut row = Row::default();
                row.add(idx.mode_used(r, e, m), 1.0);
                for t in 0..tn {
                    row.add(idx.lambda(r, e, m, t), -1.0);
                }
                b.push(
                    Family::Eq9,
                    format!("eq9_usedmax_{tag}_m{}", m + 1),
                    row,
                    Sense::Le,
                    0.0,
                );
            }
            for m in 0..mn {
                for t in 0..tn {
                    let mut row = Row::default();
                    row.add(idx.lambda(r, e, m, t), 1.0)
                        .add(idx.occupancy(r, e, t), -1.0)
                        .add(idx.mode_used(r, e, m), -1.0);
                    b.push(
                        Family::Eq9,
                        format!("eq9_match_{tag}_m{}_t{t}", m + 1),
                        row,
                        Sense::Ge,
                        -1.0,
                    );
                }
            }

            for m in 0..mn {
                for t in 0..tn {
                    let mut row = Row::default();
                    row.add(idx.link_used(r, e), 1.0).add(idx.lambda(r, e, m, t), -1.0);
                    b.push(
                        Family::Eq10,
                        format!("eq10_used_{tag}_m{}_t{t}", m + 1),
                        row,
                        Sense::Ge,
                        0.0,
                    );
                }
            }
            let cells = |row: &mut Row, coef: f64| {
                for m in 0..mn {
                    for t in 0..tn {
                        row.add(idx.lambda(r, e, m, t), coef);
                    }
                }
            };
            let mut row = Row::default();
            row.add(idx.link_used(r, e), 1.0);
            cells(&mut row, -1.0);
            b.push(Family::Eq10, format!("eq10_usedmax_{tag}"), row, Sense::Le, 0.0);
            let mut row = Row::default();
            cells(&mut row, 1.0);
            row.add(idx.link_used(r, e), -big_m);
            b.push(Family::Eq10, format!("eq10_cap_{tag}"), row, Sense::Ge, q - big_m);
        }
    }
}

fn crosstalk(instance: &Instance, b: &mut Builder<'_>) {
    let idx = b.idx.clone();
    let model = instance.planner.accumulation_model;
    let links = instance.topology.links();
    let threshold = model.linear_threshold(instance.planner.xt_threshold_db);
    let big_m = instance.big_m() as f64;

    for r1 in 0..idx.requests {
        let mut row = Row::default();
        for r2 in (0..idx.requests).filter(|&r2| r2 != r1) {
            for (e, link) in links.iter().enumerate() {
                for (m1, m2) in ordered_pairs(idx.modes) {
                    let coef = pairwise_contribution(&instance.crosstalk, m2, m1, link.length_m, model)
                        .expect("validated matrix has every off-diagonal entry")
                        .coefficient();
                    row.add(idx.theta(r1, r2, e, m1, m2), coef);
                }
            }
        }
        let name = format!("eq11_r{}", b.names.r(r1));
        b.push(Family::Eq11, name, row, Sense::Le, threshold);
    }

    for (r1, r2) in ordered_pairs(idx.requests) {
        for e in 0..idx.links {
            for (m1, m2) in ordered_pairs(idx.modes) {
                let tag = format!(
                    "r{}_r{}_{}_m{}_m{}",
                    b.names.r(r1),
                    b.names.r(r2),
                    b.names.e(e),
                    m1 + 1,
                    m2 + 1
                );
                let theta = idx.theta(r1, r2, e, m1, m2);
                let mut lo = Row::default();
                lo.add(theta, 1.0);
                let mut hi = Row::default();
                hi.add(theta, big_m);
                for t in 0..idx.slots {
                    lo.add(idx.beta(r1, r2, e, m1, m2, t), -1.0);
                    hi.add(idx.beta(r1, r2, e, m1, m2, t), -1.0);
                }
                b.push(Family::Eq12, format!("eq12_min_{tag}"), lo, Sense::Le, 0.0);
                b.push(Family::Eq12, format!("eq12_max_{tag}"), hi, Sense::Ge, 0.0);
                for t in 0..idx.slots {
                    let beta = idx.beta(r1, r2, e, m1, m2, t);
                    let victim = idx.lambda(r1, e, m1, t);
                    let aggressor = idx.lambda(r2, e, m2, t);
                    let mut row = Row::default();
                    row.add(beta, 1.0).add(victim, -1.0);
                    b.push(Family::Eq13, format!("eq13_{tag}_t{t}"), row, Sense::Le, 0.0);
                    let mut row = Row::default();
                    row.add(beta, 1.0).add(aggressor, -1.0);
                    b.push(Family::Eq14, format!("eq14_{tag}_t{t}"), row, Sense::Le, 0.0);
                    let mut row = Row::default();
                    row.add(beta, 1.0).add(victim, -1.0).add(aggressor, -1.0);
                    b.push(Family::Eq15, format!("eq15_{tag}_t{t}"), row, Sense::Ge, -1.0);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;

    #[test]
    fn one_request_counts() {
        let inst = fixtures::single_link(2, 4, &[("A", 5)], 100.0);
        let model = build_model(&inst).unwrap();
        let counts = model.counts();
        assert_eq!(counts.variables[&VarGroup::Lambda], 8);
        assert_eq!(counts.variables[&VarGroup::Rho], 1);
        assert_eq!(counts.variables.get(&VarGroup::Beta).copied().unwrap_or(0), 0);
        assert_eq!(counts.variables.get(&VarGroup::Theta).copied().unwrap_or(0), 0);
    }

    #[test]
    fn two_request_pair_counts() {
        let inst = fixtures::single_link(2, 4, &[("A", 5), ("B", 5)], 100.0);
        let counts = build_model(&inst).unwrap().counts();
        assert_eq!(counts.variables[&VarGroup::Beta], 16);
        assert_eq!(counts.variables[&VarGroup::Theta], 4);
    }

    #[test]
    fn empty_request_set_is_empty() {
        let inst = fixtures::single_link(2, 4, &[], 100.0);
        let model = build_model(&inst).unwrap();
        assert!(model.variables.is_empty());
        assert!(model.constraints.is_empty());
    }

    #[test]
    fn well_formed() {
        let model = build_model(&fixtures::fig4()).unwrap();
        assert_eq!(model.integrity_problems(), Vec::<String>::new());
    }

    #[test]
    fn size_cap_names_the_count() {
        let mut inst = fixtures::fig2();
        inst.planner.max_variables = 100;
        let err = build_model(&inst).unwrap_err();
        let expected = count_formulas(&inst).total_variables();
        assert!(matches!(err, Error::SizeLimit { count, cap: 100 } if count == expected));
        assert!(err.to_string().contains(&expected.to_string()));
    }

    #[test]
    fn crosstalk_coefficients_follow_the_victim() {
        // Victim A on m1 hears aggressor B on m2 at -17.7 dB/100 m.
        let inst = fixtures::single_link(2, 2, &[("A", 5), ("B", 5)], 100.0);
        let model = build_model(&inst).unwrap();
        let eq11 = model.constraints.iter().find(|c| c.name == "eq11_rA").unwrap();
        let th = model.index.theta(0, 1, 0, 0, 1);
        let coef = eq11.terms.iter().find(|(v, _)| *v == th).unwrap().1;
        assert!((coef - 10f64.powf(-1.77)).abs() < 1e-15);
        assert!((eq11.rhs - 10f64.powf(-1.3)).abs() < 1e-15);
    }
}
