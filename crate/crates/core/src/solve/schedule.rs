use serde::{Deserialize, Serialize};

use crate::decimal::{self, Rational};
use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinkRef {
    pub from: String,
    pub to: String,
}

impl LinkRef {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl std::fmt::Display for LinkRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Half-open slot interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SlotRange {
    pub start: usize,
    pub end: usize,
}

impl SlotRange {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn overlaps(&self, other: &SlotRange) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.start <= slot && slot < self.end
    }
}

/// One accepted request: the same modes and slot interval on every link of
/// its path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub request_id: String,
    pub path: Vec<LinkRef>,
    pub modes: Vec<usize>,
    pub slots: SlotRange,
}

impl Assignment {
    /// Occupied (link, mode, slot) cells.
    pub fn lambda_count(&self) -> u64 {
        (self.path.len() * self.modes.len() * self.slots.len()) as u64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub accepted: Vec<Assignment>,
    pub rejected: Vec<String>,
    #[serde(with = "decimal")]
    pub throughput_gbps: Rational,
    pub lambda_count: u64,
    pub optimal: bool,
}

impl Schedule {
    /// Everything rejected.
    pub fn empty(instance: &Instance) -> Self {
        Self {
            accepted: Vec::new(),
            rejected: instance.requests.iter().map(|r| r.id.clone()).collect(),
            throughput_gbps: decimal::int(0),
            lambda_count: 0,
            optimal: true,
        }
    }

    /// Assembles a schedule from per-request assignments in instance order,
    /// filling in the rejected list and the objective pair.
    pub fn from_assignments(instance: &Instance, mut accepted: Vec<Assignment>, optimal: bool) -> Self {
        let order = |id: &str| instance.request_index(id).unwrap_or(usize::MAX);
        accepted.sort_by_key(|a| order(&a.request_id));
        let mut throughput = decimal::int(0);
        for a in &accepted {
            if let Some(r) = instance.request_index(&a.request_id) {
                throughput += instance.requests[r].bandwidth_gbps;
            }
        }
        let rejected = instance
            .requests
            .iter()
            .filter(|r| !accepted.iter().any(|a| a.request_id == r.id))
            .map(|r| r.id.clone())
            .collect();
        let lambda_count = accepted.iter().map(Assignment::lambda_count).sum();
        Self {
            accepted,
            rejected,
            throughput_gbps: throughput,
            lambda_count,
            optimal,
        }
    }

    pub fn assignment(&self, request_id: &str) -> Option<&Assignment> {
        self.accepted.iter().find(|a| a.request_id == request_id)
    }

    pub fn objective(&self) -> (Rational, u64) {
        (self.throughput_gbps, self.lambda_count)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedules always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
