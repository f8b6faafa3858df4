//! Modal crosstalk: pairwise coupling under interchangeable accumulation
//! models, and per-request accumulation over a schedule.
//!
//! A contribution is one (shared link, aggressor request, aggressor mode,
//! victim mode) term whose two requests overlap in time on that link. The
//! victim's total is compared against the receiver threshold `X`.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CrosstalkMatrix, Instance};
use crate::solve::{LinkRef, Schedule};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccumulationModel {
    /// Sum `(d/100)·10^(Y/10)` as linear power ratios, report in dB.
    #[default]
    LinearPower,
    /// Sum `(d/100)·Y` directly in dB.
    PaperLiteralDb,
    /// `tanh(h·d)` scaled by the pair's coupling relative to the strongest pair.
    Tanh { h_per_m: f64 },
}

impl AccumulationModel {
    /// Whether adding a term can only raise the total. The literal dB sum
    /// adds negative numbers, so it is not.
    pub fn is_monotone(&self) -> bool {
        !matches!(self, AccumulationModel::PaperLiteralDb)
    }

    /// Right-hand side of the linear crosstalk constraint in the units this
    /// model's coefficients use.
    pub fn linear_threshold(&self, threshold_db: f64) -> f64 {
        match self {
            AccumulationModel::PaperLiteralDb => threshold_db,
            _ => db_to_ratio(threshold_db),
        }
    }
}

pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Fraction of power coupled after `z_m` meters with coupling parameter `h`.
pub fn coupled_power_ratio(h_per_m: f64, z_m: f64) -> f64 {
    (h_per_m * z_m).tanh()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Contribution {
    /// Linear power ratio.
    Linear(f64),
    /// Already in dB (literal model).
    Db(f64),
}

impl Contribution {
    pub fn db(&self) -> f64 {
        match *self {
            Contribution::Linear(x) => ratio_to_db(x),
            Contribution::Db(d) => d,
        }
    }

    /// Coefficient of this term in the linear crosstalk constraint.
    pub fn coefficient(&self) -> f64 {
        match *self {
            Contribution::Linear(x) | Contribution::Db(x) => x,
        }
    }
}

pub fn pairwise_contribution(
    matrix: &CrosstalkMatrix,
    aggressor_mode: usize,
    victim_mode: usize,
    length_m: f64,
    model: AccumulationModel,
) -> Result<Contribution> {
    if aggressor_mode == victim_mode {
        return Err(Error::InvalidPair(aggressor_mode));
    }
    let y = matrix
        .get(aggressor_mode, victim_mode)
        .ok_or(Error::InvalidPair(aggressor_mode))?;
    let hundreds = length_m / 100.0;
    Ok(match model {
        AccumulationModel::LinearPower => Contribution::Linear(hundreds * db_to_ratio(y)),
        AccumulationModel::PaperLiteralDb => Contribution::Db(hundreds * y),
        AccumulationModel::Tanh { h_per_m } => {
            let strongest = matrix.strongest().unwrap_or(y);
            Contribution::Linear(coupled_power_ratio(h_per_m, length_m) * db_to_ratio(y - strongest))
        }
    })
}

/// Accumulated crosstalk at a receiver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XtLevel {
    /// No overlapping aggressor anywhere on the path.
    NoCrosstalk,
    Db(f64),
}

impl XtLevel {
    pub fn within(&self, threshold_db: f64) -> bool {
        match *self {
            XtLevel::NoCrosstalk => true,
            XtLevel::Db(d) => d <= threshold_db,
        }
    }

    pub fn db(&self) -> f64 {
        match *self {
            XtLevel::NoCrosstalk => f64::NEG_INFINITY,
            XtLevel::Db(d) => d,
        }
    }
}

impl Serialize for XtLevel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            XtLevel::NoCrosstalk => s.serialize_str("-inf"),
            XtLevel::Db(d) => s.serialize_f64(d),
        }
    }
}

/// Running total for one victim.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    pub linear: f64,
    pub db: f64,
    pub terms: u32,
}

impl Accumulator {
    pub fn add(&mut self, c: Contribution) {
        match c {
            Contribution::Linear(x) => self.linear += x,
            Contribution::Db(d) => self.db += d,
        }
        self.terms += 1;
    }

    pub fn level(&self, model: AccumulationModel) -> XtLevel {
        if self.terms == 0 {
            return XtLevel::NoCrosstalk;
        }
        match model {
            AccumulationModel::PaperLiteralDb => XtLevel::Db(self.db),
            _ => XtLevel::Db(ratio_to_db(self.linear)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosstalkTerm {
    pub link: LinkRef,
    pub aggressor_request: String,
    pub aggressor_mode: usize,
    pub victim_mode: usize,
    pub contribution_db: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosstalkReport {
    pub request_id: String,
    pub total_db: XtLevel,
    pub feasible: bool,
    pub terms: Vec<CrosstalkTerm>,
}

fn link_length(instance: &Instance, link: &LinkRef) -> Result<f64> {
    let topo = &instance.topology;
    topo.node_index(&link.from)
        .zip(topo.node_index(&link.to))
        .and_then(|(f, t)| topo.link_between(f, t))
        .map(|l| topo.links()[l].length_m)
        .ok_or_else(|| Error::Structural(vec![format!("link {link} does not exist")]))
}

/// Sums every overlapping aggressor term on the victim's path.
pub fn accumulate_for_request(victim_id: &str, schedule: &Schedule, instance: &Instance) -> Result<CrosstalkReport> {
    let victim = schedule
        .assignment(victim_id)
        .ok_or_else(|| Error::NotScheduled(victim_id.to_string()))?;
    let model = instance.planner.accumulation_model;
    let mut acc = Accumulator::default();
    let mut terms = Vec::new();
    for link in &victim.path {
        let length = link_length(instance, link)?;
        for aggressor in &schedule.accepted {
            if aggressor.request_id == victim.request_id
                || !aggressor.slots.overlaps(&victim.slots)
                || !aggressor.path.contains(link)
            {
                continue;
            }
            for &am in &aggressor.modes {
                for &vm in &victim.modes {
                    if am == vm {
                        continue;
                    }
                    let c = pairwise_contribution(&instance.crosstalk, am, vm, length, model)?;
                    acc.add(c);
                    terms.push(CrosstalkTerm {
                        link: link.clone(),
                        aggressor_request: aggressor.request_id.clone(),
                        aggressor_mode: am,
                        victim_mode: vm,
                        contribution_db: c.db(),
                    });
                }
            }
        }
    }
    let total = acc.level(model);
    Ok(CrosstalkReport {
        request_id: victim.request_id.clone(),
        total_db: total,
        feasible: total.within(instance.planner.xt_threshold_db),
        terms,
    })
}
