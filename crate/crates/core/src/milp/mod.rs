//! The full mixed-integer model as an abstract container, with LP-format
//! output for external solvers.

mod build;
mod counts;
mod eval;
mod lp;

use serde::Serialize;

pub use build::build_model;
pub use counts::{count_formulas, ModelCounts};
pub use eval::{objective_value, schedule_values, violated_constraints};
pub use lp::{emit_lp, phase_paths, write_lp, LpPhase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Eq2,
    Eq3,
    Eq4,
    Eq5,
    Eq6,
    Eq7,
    Eq8,
    Eq9,
    Eq10,
    Eq11,
    Eq12,
    Eq13,
    Eq14,
    Eq15,
    /// Phase-2 throughput floor.
    Fix,
}

impl Family {
    pub const EQUATIONS: [Family; 14] = [
        Family::Eq2,
        Family::Eq3,
        Family::Eq4,
        Family::Eq5,
        Family::Eq6,
        Family::Eq7,
        Family::Eq8,
        Family::Eq9,
        Family::Eq10,
        Family::Eq11,
        Family::Eq12,
        Family::Eq13,
        Family::Eq14,
        Family::Eq15,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Family::Eq2 => "eq2",
            Family::Eq3 => "eq3",
            Family::Eq4 => "eq4",
            Family::Eq5 => "eq5",
            Family::Eq6 => "eq6",
            Family::Eq7 => "eq7",
            Family::Eq8 => "eq8",
            Family::Eq9 => "eq9",
            Family::Eq10 => "eq10",
            Family::Eq11 => "eq11",
            Family::Eq12 => "eq12",
            Family::Eq13 => "eq13",
            Family::Eq14 => "eq14",
            Family::Eq15 => "eq15",
            Family::Fix => "fix",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Family::Eq2 => "flow conservation in slot units",
            Family::Eq3 => "per-slot continuity, source to destination",
            Family::Eq4 => "per-slot continuity at transit nodes",
            Family::Eq5 => "per-mode continuity, source to destination",
            Family::Eq6 => "per-mode continuity at transit nodes",
            Family::Eq7 => "each (link, mode, slot) cell used once",
            Family::Eq8 => "contiguous slots per mode",
            Family::Eq9 => "same slots on every used mode",
            Family::Eq10 => "enough slot units on every used link",
            Family::Eq11 => "accumulated crosstalk under the threshold",
            Family::Eq12 => "theta is the OR of beta over slots",
            Family::Eq13 => "beta implies the victim cell",
            Family::Eq14 => "beta implies the aggressor cell",
            Family::Eq15 => "both cells imply beta",
            Family::Fix => "phase-1 throughput kept in phase 2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarGroup {
    Lambda,
    Rho,
    Beta,
    Theta,
    ModeTransition,
    AnyTransition,
    Occupancy,
    ModeUsed,
    LinkUsed,
}

impl VarGroup {
    pub const ALL: [VarGroup; 9] = [
        VarGroup::Lambda,
        VarGroup::Rho,
        VarGroup::Beta,
        VarGroup::Theta,
        VarGroup::ModeTransition,
        VarGroup::AnyTransition,
        VarGroup::Occupancy,
        VarGroup::ModeUsed,
        VarGroup::LinkUsed,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub group: VarGroup,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    pub fn holds(&self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Sense::Le => lhs <= rhs + tol,
            Sense::Ge => lhs >= rhs - tol,
            Sense::Eq => (lhs - rhs).abs() <= tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub family: Family,
    /// `(variable index, coefficient)`, no repeated variable, no zero coefficient.
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub sense: ObjectiveSense,
    pub terms: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Objectives {
    /// Phase 1 maximizes throughput; phase 2 keeps at least
    /// `throughput_floor` and minimizes occupied cells.
    TwoPhase {
        throughput: Objective,
        usage: Objective,
        throughput_floor: Option<f64>,
    },
    Weighted(Objective),
}

/// Positions of every variable family in the flat variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableIndex {
    pub requests: usize,
    pub links: usize,
    pub modes: usize,
    pub slots: usize,
    base: [usize; 9],
}

impl VariableIndex {
    pub fn new(requests: usize, links: usize, modes: usize, slots: usize) -> Self {
        let sizes = Self::group_sizes(requests, links, modes, slots);
        let mut base = [0; 9];
        for g in 1..9 {
            base[g] = base[g - 1] + sizes[g - 1];
        }
        Self {
            requests,
            links,
            modes,
            slots,
            base,
        }
    }

    /// Variable count per group, in `VarGroup::ALL` order.
    pub fn group_sizes(r: usize, e: usize, m: usize, t: usize) -> [usize; 9] {
        let pairs = r * r.saturating_sub(1);
        let mode_pairs = m * m.saturating_sub(1);
        [
            r * e * m * t,
            r,
            pairs * e * mode_pairs * t,
            pairs * e * mode_pairs,
            r * e * m * (t + 1),
            r * e * (t + 1),
            r * e * t,
            r * e * m,
            r * e,
        ]
    }

    pub fn total(&self) -> usize {
        Self::group_sizes(self.requests, self.links, self.modes, self.slots)
            .iter()
            .sum()
    }

    fn pair(&self, r1: usize, r2: usize) -> usize {
        debug_assert_ne!(r1, r2);
        r1 * (self.requests - 1) + r2 - usize::from(r2 > r1)
    }

    fn mode_pair(&self, m1: usize, m2: usize) -> usize {
        debug_assert_ne!(m1, m2);
        m1 * (self.modes - 1) + m2 - usize::from(m2 > m1)
    }

    pub fn lambda(&self, r: usize, e: usize, m: usize, t: usize) -> usize {
        self.base[0] + ((r * self.links + e) * self.modes + m) * self.slots + t
    }

    pub fn rho(&self, r: usize) -> usize {
        self.base[1] + r
    }

    /// Victim `r1` on `m1` and aggressor `r2` on `m2` both on link `e` in slot `t`.
    pub fn beta(&self, r1: usize, r2: usize, e: usize, m1: usize, m2: usize, t: usize) -> usize {
        let mp = self.modes * (self.modes - 1);
        self.base[2] + ((self.pair(r1, r2) * self.links + e) * mp + self.mode_pair(m1, m2)) * self.slots + t
    }

    pub fn theta(&self, r1: usize, r2: usize, e: usize, m1: usize, m2: usize) -> usize {
        let mp = self.modes * (self.modes - 1);
        self.base[3] + (self.pair(r1, r2) * self.links + e) * mp + self.mode_pair(m1, m2)
    }

    /// Transition indicator between slots `k - 1` and `k`, with virtual empty
    /// slots at `-1` and `T`.
    pub fn mode_transition(&self, r: usize, e: usize, m: usize, k: usize) -> usize {
        self.base[4] + ((r * self.links + e) * self.modes + m) * (self.slots + 1) + k
    }

    pub fn any_transition(&self, r: usize, e: usize, k: usize) -> usize {
        self.base[5] + (r * self.links + e) * (self.slots + 1) + k
    }

    /// Request `r` uses some mode of link `e` in slot `t`.
    pub fn occupancy(&self, r: usize, e: usize, t: usize) -> usize {
        self.base[6] + (r * self.links + e) * self.slots + t
    }

    /// Request `r` uses mode `m` of link `e` in some slot.
    pub fn mode_used(&self, r: usize, e: usize, m: usize) -> usize {
        self.base[7] + (r * self.links + e) * self.modes + m
    }

    pub fn link_used(&self, r: usize, e: usize) -> usize {
        self.base[8] + r * self.links + e
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objectives: Objectives,
    pub index: VariableIndex,
}

impl MilpModel {
    pub fn counts(&self) -> ModelCounts {
        let mut counts = ModelCounts::default();
        for v in &self.variables {
            *counts.variables.entry(v.group).or_default() += 1;
        }
        for c in &self.constraints {
            *counts.constraints.entry(c.family).or_default() += 1;
        }
        counts
    }

    /// Sets the phase-2 throughput floor of a two-phase model.
    pub fn set_throughput_floor(&mut self, floor: f64) {
        if let Objectives::TwoPhase { throughput_floor, .. } = &mut self.objectives {
            *throughput_floor = Some(floor);
        }
    }

    /// Names that are duplicated or constraint terms pointing past the
    /// variable list. Empty for a well-formed model.
    pub fn integrity_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                problems.push(format!("duplicate name {}", v.name));
            }
        }
        for c in &self.constraints {
            if !names.insert(c.name.as_str()) {
                problems.push(format!("duplicate name {}", c.name));
            }
            let mut seen = std::collections::HashSet::new();
            for &(v, coef) in &c.terms {
                if v >= self.variables.len() {
                    problems.push(format!("{} references undeclared variable {v}", c.name));
                } else if !seen.insert(v) {
                    problems.push(format!("{} repeats {}", c.name, self.variables[v].name));
                }
                if coef == 0.0 || !coef.is_finite() {
                    problems.push(format!("{} has coefficient {coef}", c.name));
                }
            }
        }
        problems
    }
}
