use super::build::ordered_pairs;
use super::{Constraint, MilpModel, Objective};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::solve::Schedule;

/// Variable values encoding `schedule`: λ and ρ from the assignments and
/// every auxiliary binary at the value its defining constraints force.
pub fn schedule_values(model: &MilpModel, instance: &Instance, schedule: &Schedule) -> Result<Vec<f64>> {
    let idx = &model.index;
    let topo = &instance.topology;
    let mut x = vec![0.0; model.variables.len()];
    let mut problems = Vec::new();
    for a in &schedule.accepted {
        let Some(r) = instance.request_index(&a.request_id) else {
            problems.push(format!("unknown request '{}'", a.request_id));
            continue;
        };
        x[idx.rho(r)] = 1.0;
        for l in &a.path {
            let link = topo
                .node_index(&l.from)
                .zip(topo.node_index(&l.to))
                .and_then(|(f, t)| topo.link_between(f, t));
            let Some(e) = link else {
                problems.push(format!("request '{}' uses missing link {l}", a.request_id));
                continue;
            };
            for &m in &a.modes {
                if m >= idx.modes {
                    problems.push(format!("request '{}' uses mode index {m}", a.request_id));
                    continue;
                }
                for t in a.slots.start..a.slots.end.min(idx.slots) {
                    x[idx.lambda(r, e, m, t)] = 1.0;
                }
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Structural(problems));
    }

    let lam = |x: &[f64], r, e, m, t| x[idx.lambda(r, e, m, t)];
    for r in 0..idx.requests {
        for e in 0..idx.links {
            let mut any_cell = false;
            for m in 0..idx.modes {
                for k in 0..=idx.slots {
                    let cur = if k < idx.slots { lam(&x, r, e, m, k) } else { 0.0 };
                    let prev = if k > 0 { lam(&x, r, e, m, k - 1) } else { 0.0 };
                    x[idx.mode_transition(r, e, m, k)] = (cur - prev).abs();
                }
                let used = (0..idx.slots).any(|t| lam(&x, r, e, m, t) > 0.5);
                x[idx.mode_used(r, e, m)] = f64::from(u8::from(used));
                any_cell |= used;
            }
            for t in 0..idx.slots {
                let occupied = (0..idx.modes).any(|m| lam(&x, r, e, m, t) > 0.5);
                x[idx.occupancy(r, e, t)] = f64::from(u8::from(occupied));
            }
            for k in 0..=idx.slots {
                let cur = if k < idx.slots { x[idx.occupancy(r, e, k)] } else { 0.0 };
                let prev = if k > 0 { x[idx.occupancy(r, e, k - 1)] } else { 0.0 };
                x[idx.any_transition(r, e, k)] = (cur - prev).abs();
            }
            x[idx.link_used(r, e)] = f64::from(u8::from(any_cell));
        }
    }
    for (r1, r2) in ordered_pairs(idx.requests) {
        for e in 0..idx.links {
            for (m1, m2) in ordered_pairs(idx.modes) {
                let mut any = false;
                for t in 0..idx.slots {
                    let both = lam(&x, r1, e, m1, t) > 0.5 && lam(&x, r2, e, m2, t) > 0.5;
                    x[idx.beta(r1, r2, e, m1, m2, t)] = f64::from(u8::from(both));
                    any |= both;
                }
                x[idx.theta(r1, r2, e, m1, m2)] = f64::from(u8::from(any));
            }
        }
    }
    Ok(x)
}

pub fn row_value(terms: &[(usize, f64)], values: &[f64]) -> f64 {
    terms.iter().map(|&(v, c)| c * values[v]).sum()
}

/// Constraints that `values` breaks by more than `tol`.
pub fn violated_constraints<'m>(model: &'m MilpModel, values: &[f64], tol: f64) -> Vec<&'m Constraint> {
    model
        .constraints
        .iter()
        .filter(|c| !c.sense.holds(row_value(&c.terms, values), c.rhs, tol))
        .collect()
}

pub fn objective_value(objective: &Objective, values: &[f64]) -> f64 {
    row_value(&objective.terms, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures;
    use crate::milp::build_model;
    use crate::solve::{solve_exact, SolveLimits};

    #[test]
    fn solver_schedule_satisfies_the_model() {
        let inst = fixtures::fig4();
        let schedule = solve_exact(&inst, &SolveLimits::default());
        let model = build_model(&inst).unwrap();
        let x = schedule_values(&model, &inst, &schedule).unwrap();
        let broken: Vec<_> = violated_constraints(&model, &x, 1e-9)
            .iter()
            .map(|c| c.name.clone())
            .collect();
        assert!(broken.is_empty(), "{broken:?}");
    }

    #[test]
    fn colliding_cells_break_eq7() {
        let inst = fixtures::shared_200m_pair();
        let mut schedule = solve_exact(&inst, &SolveLimits::default());
        let first = schedule.accepted[0].clone();
        schedule.accepted[1].modes = first.modes.clone();
        schedule.accepted[1].slots = first.slots;
        let model = build_model(&inst).unwrap();
        let x = schedule_values(&model, &inst, &schedule).unwrap();
        let broken = violated_constraints(&model, &x, 1e-9);
        assert!(broken.iter().any(|c| c.family == crate::milp::Family::Eq7));
    }
}
