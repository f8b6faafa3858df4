use serde::{Deserialize, Serialize};

use super::matrix::CrosstalkMatrix;
use super::topology::{valid_identifier, Topology, TopologyDoc};
use crate::decimal::{self, Rational};
use crate::error::{Error, FieldError, Result};
use crate::xtalk::AccumulationModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    #[serde(with = "decimal")]
    pub frame_ms: Rational,
    #[serde(with = "decimal")]
    pub slice_ms: Rational,
    /// Guard interval between slices. Only the timeline renderer uses it.
    #[serde(default, with = "decimal::option", skip_serializing_if = "Option::is_none")]
    pub guard_us: Option<Rational>,
}

impl FrameConfig {
    pub fn new(frame_ms: i64, slice_ms: i64) -> Self {
        Self {
            frame_ms: decimal::int(frame_ms),
            slice_ms: decimal::int(slice_ms),
            guard_us: None,
        }
    }

    /// `T / S`. Only meaningful on a validated frame.
    pub fn slot_count(&self) -> usize {
        (self.frame_ms / self.slice_ms).to_integer() as usize
    }

    fn check(&self, errors: &mut Vec<FieldError>) {
        let zero = decimal::int(0);
        if self.frame_ms <= zero {
            errors.push(FieldError::new("frame.frame_ms", "frame length must be positive"));
        }
        if self.slice_ms <= zero {
            errors.push(FieldError::new("frame.slice_ms", "slice length must be positive"));
        }
        if self.frame_ms > zero && self.slice_ms > zero && !(self.frame_ms / self.slice_ms).is_integer() {
            errors.push(FieldError::new(
                "frame",
                format!(
                    "frame {} ms is not a whole number of {} ms slices",
                    decimal::to_f64(self.frame_ms),
                    decimal::to_f64(self.slice_ms)
                ),
            ));
        }
        if matches!(self.guard_us, Some(g) if g < zero) {
            errors.push(FieldError::new("frame.guard_us", "guard interval must be non-negative"));
        }
    }
}

/// How the throughput and resource-usage terms of the objective combine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObjectiveRepr", into = "ObjectiveRepr")]
pub enum ObjectiveMode {
    /// Maximize throughput, then minimize occupied (link, mode, slot) cells.
    Lexicographic,
    /// `eta1·throughput − eta2·cells`; unset weights get dominance-preserving defaults.
    Weighted { eta1: Option<f64>, eta2: Option<f64> },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ObjectiveRepr {
    Name(String),
    Tagged(TaggedObjective),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum TaggedObjective {
    Weighted {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta2: Option<f64>,
    },
}

impl TryFrom<ObjectiveRepr> for ObjectiveMode {
    type Error = String;

    fn try_from(repr: ObjectiveRepr) -> std::result::Result<Self, String> {
        match repr {
            ObjectiveRepr::Name(n) if n == "lexicographic" => Ok(ObjectiveMode::Lexicographic),
            ObjectiveRepr::Name(n) if n == "weighted" => Ok(ObjectiveMode::Weighted { eta1: None, eta2: None }),
            ObjectiveRepr::Name(n) => Err(format!("unknown objective mode '{n}'")),
            ObjectiveRepr::Tagged(TaggedObjective::Weighted { eta1, eta2 }) => {
                Ok(ObjectiveMode::Weighted { eta1, eta2 })
            }
        }
    }
}

impl From<ObjectiveMode> for ObjectiveRepr {
    fn from(mode: ObjectiveMode) -> Self {
        match mode {
            ObjectiveMode::Lexicographic => ObjectiveRepr::Name("lexicographic".into()),
            ObjectiveMode::Weighted { eta1: None, eta2: None } => ObjectiveRepr::Name("weighted".into()),
            ObjectiveMode::Weighted { eta1, eta2 } => ObjectiveRepr::Tagged(TaggedObjective::Weighted { eta1, eta2 }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub xt_threshold_db: f64,
    /// Capacity of one modal channel.
    #[serde(with = "decimal")]
    pub link_capacity_gbps: Rational,
    /// Big-M of the MILP linearizations. Defaults to max(slot count, largest slot demand).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_m: Option<u32>,
    pub accumulation_model: AccumulationModel,
    pub objective_mode: ObjectiveMode,
    /// Request bandwidths must be positive multiples of this.
    #[serde(with = "decimal")]
    pub granularity_gbps: Rational,
    /// Refuse to build MILP models with more variables than this.
    pub max_variables: usize,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            xt_threshold_db: -13.0,
            link_capacity_gbps: decimal::int(10),
            big_m: None,
            accumulation_model: AccumulationModel::LinearPower,
            objective_mode: ObjectiveMode::Lexicographic,
            granularity_gbps: decimal::int(1),
            max_variables: 5_000_000,
        }
    }
}

impl PlannerConfig {
    fn check(&self, errors: &mut Vec<FieldError>) {
        if !(self.xt_threshold_db.is_finite() && self.xt_threshold_db < 0.0) {
            errors.push(FieldError::new(
                "planner.xt_threshold_db",
                format!("threshold must be below 0 dB, got {}", self.xt_threshold_db),
            ));
        }
        if self.link_capacity_gbps <= decimal::int(0) {
            errors.push(FieldError::new(
                "planner.link_capacity_gbps",
                "capacity must be positive",
            ));
        }
        if self.granularity_gbps <= decimal::int(0) {
            errors.push(FieldError::new(
                "planner.granularity_gbps",
                "granularity must be positive",
            ));
        }
        if self.big_m == Some(0) {
            errors.push(FieldError::new("planner.big_m", "big-M must be positive"));
        }
        if let AccumulationModel::Tanh { h_per_m } = self.accumulation_model {
            if !(h_per_m.is_finite() && h_per_m > 0.0) {
                errors.push(FieldError::new(
                    "planner.accumulation_model.tanh.h_per_m",
                    "coupling parameter must be positive",
                ));
            }
        }
        if let ObjectiveMode::Weighted { eta1, eta2 } = self.objective_mode {
            for (name, eta) in [("eta1", eta1), ("eta2", eta2)] {
                if matches!(eta, Some(e) if !(e.is_finite() && e > 0.0)) {
                    errors.push(FieldError::new(
                        format!("planner.objective_mode.weighted.{name}"),
                        "weight must be positive",
                    ));
                }
            }
        }
    }
}

/// Bandwidth carried by one slot on one modal channel: `C·S/T`.
pub fn slot_capacity_gbps(frame: &FrameConfig, config: &PlannerConfig) -> Rational {
    config.link_capacity_gbps * frame.slice_ms / frame.frame_ms
}

/// Number of (mode, slot) cells a request occupies on each link of its path.
pub fn required_slot_units(bandwidth_gbps: Rational, slot_capacity_gbps: Rational) -> u32 {
    (bandwidth_gbps / slot_capacity_gbps).ceil().to_integer() as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub id: String,
    pub source: usize,
    pub destination: usize,
    pub bandwidth_gbps: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestDoc {
    #[serde(deserialize_with = "id_from_str_or_int")]
    pub id: String,
    pub src: String,
    pub dst: String,
    #[serde(with = "decimal")]
    pub bandwidth_gbps: Rational,
}

fn id_from_str_or_int<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Id {
        Text(String),
        Number(u64),
    }
    Ok(match Id::deserialize(d)? {
        Id::Text(s) => s,
        Id::Number(n) => n.to_string(),
    })
}

/// On-disk instance document.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub topology: TopologyDoc,
    pub modes: usize,
    #[serde(default)]
    pub crosstalk_db_per_100m: Option<Vec<Vec<Option<f64>>>>,
    pub frame: FrameConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub requests: Vec<RequestDoc>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: Option<String>,
    pub notes: Option<String>,
    pub topology: Topology,
    pub modes: usize,
    pub crosstalk: CrosstalkMatrix,
    pub frame: FrameConfig,
    pub planner: PlannerConfig,
    pub requests: Vec<Request>,
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::from_doc(&doc)
}

pub fn read_instance(path: impl AsRef<std::path::Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_instance(&text)
}

impl Instance {
    pub fn from_doc(doc: &InstanceDoc) -> Result<Self> {
        let mut errors = Vec::new();
        let topology = Topology::check_doc(&doc.topology, "topology", &mut errors);
        if doc.modes == 0 {
            errors.push(FieldError::new("modes", "at least one mode is required"));
        }
        match &doc.crosstalk_db_per_100m {
            None => errors.push(FieldError::new("crosstalk_db_per_100m", "crosstalk matrix required")),
            Some(rows) => {
                if rows.len() != doc.modes {
                    errors.push(FieldError::new(
                        "crosstalk_db_per_100m",
                        format!("matrix has {} rows but there are {} modes", rows.len(), doc.modes),
                    ));
                }
                CrosstalkMatrix::check_rows(rows, "crosstalk_db_per_100m", &mut errors);
            }
        }
        doc.frame.check(&mut errors);
        doc.planner.check(&mut errors);

        let mut requests = Vec::with_capacity(doc.requests.len());
        let mut seen = std::collections::HashSet::new();
        for (i, r) in doc.requests.iter().enumerate() {
            let path = format!("requests[{i}]");
            if !valid_identifier(&r.id) {
                errors.push(FieldError::new(
                    format!("{path}.id"),
                    format!("'{}' must be non-empty ASCII alphanumeric", r.id),
                ));
            }
            if !seen.insert(r.id.as_str()) {
                errors.push(FieldError::new(
                    format!("{path}.id"),
                    format!("duplicate request id '{}'", r.id),
                ));
            }
            if r.src == r.dst {
                errors.push(FieldError::new(
                    path.clone(),
                    format!("request '{}' has identical source and destination '{}'", r.id, r.src),
                ));
            }
            if r.bandwidth_gbps <= decimal::int(0) {
                errors.push(FieldError::new(
                    format!("{path}.bandwidth_gbps"),
                    format!("request '{}' bandwidth must be positive", r.id),
                ));
            } else if doc.planner.granularity_gbps > decimal::int(0)
                && !(r.bandwidth_gbps / doc.planner.granularity_gbps).is_integer()
            {
                errors.push(FieldError::new(
                    format!("{path}.bandwidth_gbps"),
                    format!(
                        "request '{}' bandwidth {} is not a multiple of the {} Gb/s granularity",
                        r.id,
                        decimal::to_f64(r.bandwidth_gbps),
                        decimal::to_f64(doc.planner.granularity_gbps)
                    ),
                ));
            }
            if let Some(topo) = &topology {
                let src = topo.node_index(&r.src);
                let dst = topo.node_index(&r.dst);
                if src.is_none() {
                    errors.push(FieldError::new(
                        format!("{path}.src"),
                        format!("unknown node '{}'", r.src),
                    ));
                }
                if dst.is_none() {
                    errors.push(FieldError::new(
                        format!("{path}.dst"),
                        format!("unknown node '{}'", r.dst),
                    ));
                }
                if let (Some(s), Some(d)) = (src, dst) {
                    requests.push(Request {
                        id: r.id.clone(),
                        source: s,
                        destination: d,
                        bandwidth_gbps: r.bandwidth_gbps,
                    });
                }
            }
        }

        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let instance = Self {
            name: doc.name.clone(),
            notes: doc.notes.clone(),
            topology: topology.expect("validated"),
            modes: doc.modes,
            crosstalk: CrosstalkMatrix::from_checked_rows(doc.crosstalk_db_per_100m.clone().expect("validated")),
            frame: doc.frame.clone(),
            planner: doc.planner.clone(),
            requests,
        };
        instance.check_big_m()?;
        Ok(instance)
    }

    fn check_big_m(&self) -> Result<()> {
        if let Some(m) = self.planner.big_m {
            let needed = self.minimum_big_m();
            if m < needed {
                return Err(Error::Validation(vec![FieldError::new(
                    "planner.big_m",
                    format!("big-M {m} is below the smallest valid value {needed}"),
                )]));
            }
        }
        Ok(())
    }

    fn minimum_big_m(&self) -> u32 {
        let max_units = (0..self.requests.len())
            .map(|r| self.required_units(r))
            .max()
            .unwrap_or(0);
        (self.slot_count() as u32).max(max_units)
    }

    /// Effective big-M: the configured value or the smallest valid one.
    pub fn big_m(&self) -> u32 {
        self.planner.big_m.unwrap_or_else(|| self.minimum_big_m())
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            name: self.name.clone(),
            notes: self.notes.clone(),
            topology: self.topology.to_doc(),
            modes: self.modes,
            crosstalk_db_per_100m: Some(self.crosstalk.rows().to_vec()),
            frame: self.frame.clone(),
            planner: self.planner.clone(),
            requests: self
                .requests
                .iter()
                .map(|r| RequestDoc {
                    id: r.id.clone(),
                    src: self.topology.node_id(r.source).to_string(),
                    dst: self.topology.node_id(r.destination).to_string(),
                    bandwidth_gbps: r.bandwidth_gbps,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance documents always serialize")
    }

    pub fn slot_count(&self) -> usize {
        self.frame.slot_count()
    }

    pub fn slot_capacity_gbps(&self) -> Rational {
        slot_capacity_gbps(&self.frame, &self.planner)
    }

    /// Slot units `q_r` of request index `r`.
    pub fn required_units(&self, r: usize) -> u32 {
        required_slot_units(self.requests[r].bandwidth_gbps, self.slot_capacity_gbps())
    }

    pub fn request_index(&self, id: &str) -> Option<usize> {
        self.requests.iter().position(|r| r.id == id)
    }

    /// Same network and configuration with a different request set.
    pub fn with_requests(&self, requests: Vec<RequestDoc>) -> Result<Self> {
        let mut doc = self.to_doc();
        doc.requests = requests;
        Self::from_doc(&doc)
    }

    /// The conventional-MDM view: one slot spanning the whole frame, so a
    /// slot unit carries the full channel capacity.
    pub fn collapsed_frame(&self) -> Self {
        let mut collapsed = self.clone();
        collapsed.frame = FrameConfig {
            frame_ms: self.frame.frame_ms,
            slice_ms: self.frame.frame_ms,
            guard_us: None,
        };
        collapsed.planner.big_m = None;
        collapsed
    }

    pub fn max_bandwidth_gbps(&self) -> Rational {
        self.requests
            .iter()
            .map(|r| r.bandwidth_gbps)
            .max()
            .unwrap_or_else(|| decimal::int(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(t: i64, s: i64) -> FrameConfig {
        FrameConfig::new(t, s)
    }

    #[test]
    fn slot_capacity_examples() {
        let mut cfg = PlannerConfig::default();
        assert_eq!(slot_capacity_gbps(&frame(20, 5), &cfg), Rational::new(5, 2));
        assert_eq!(slot_capacity_gbps(&frame(20, 20), &cfg), decimal::int(10));
        cfg.link_capacity_gbps = decimal::int(40);
        assert_eq!(slot_capacity_gbps(&frame(20, 5), &cfg), decimal::int(10));
    }

    #[test]
    fn required_units_examples() {
        let c = Rational::new(5, 2);
        assert_eq!(required_slot_units(decimal::int(1), c), 1);
        assert_eq!(required_slot_units(decimal::int(10), c), 4);
        assert_eq!(required_slot_units(c, c), 1);
    }

    fn base_doc() -> serde_json::Value {
        serde_json::json!({
            "topology": {
                "nodes": [{"id": "a", "tier": "edge"}, {"id": "b", "tier": "edge"}],
                "links": [{"from": "a", "to": "b", "length_m": 100}]
            },
            "modes": 2,
            "crosstalk_db_per_100m": [[null, -26.0], [-17.7, null]],
            "frame": {"frame_ms": 20, "slice_ms": 5},
            "planner": {"xt_threshold_db": -13, "link_capacity_gbps": 10,
                        "accumulation_model": "linear-power", "objective_mode": "lexicographic"},
            "requests": [{"id": "r1", "src": "a", "dst": "b", "bandwidth_gbps": 3}]
        })
    }

    #[test]
    fn loads_minimal_document() {
        let inst = load_instance(&base_doc().to_string()).unwrap();
        assert_eq!(inst.slot_count(), 4);
        assert_eq!(inst.required_units(0), 2);
        assert_eq!(inst.big_m(), 4);
    }

    #[test]
    fn request_with_same_endpoints_names_the_request() {
        let mut doc = base_doc();
        doc["requests"][0]["dst"] = "a".into();
        let err = load_instance(&doc.to_string()).unwrap_err();
        let Error::Validation(errs) = err else { panic!() };
        assert!(errs.iter().any(|e| e.message.contains("'r1'")), "{errs:?}");
    }

    #[test]
    fn missing_matrix_is_reported() {
        let mut doc = base_doc();
        doc.as_object_mut().unwrap().remove("crosstalk_db_per_100m");
        let err = load_instance(&doc.to_string()).unwrap_err();
        assert!(err.to_string().contains("crosstalk matrix required"), "{err}");
    }

    #[test]
    fn collects_every_failure() {
        let mut doc = base_doc();
        doc["frame"]["slice_ms"] = 3.into();
        doc["planner"]["xt_threshold_db"] = 2.into();
        doc["requests"][0]["bandwidth_gbps"] = 1.5.into();
        let Err(Error::Validation(errs)) = load_instance(&doc.to_string()) else {
            panic!()
        };
        let paths: Vec<_> = errs.iter().map(|e| e.path.as_str()).collect();
        assert_eq!(
            paths,
            ["frame", "planner.xt_threshold_db", "requests[0].bandwidth_gbps"]
        );
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = load_instance("{\n  \"modes\": 2,\n  oops\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn objective_and_model_spellings() {
        let mut doc = base_doc();
        doc["planner"]["objective_mode"] = serde_json::json!({"weighted": {"eta1": 1.0}});
        doc["planner"]["accumulation_model"] = serde_json::json!({"tanh": {"h_per_m": 0.0001}});
        let inst = load_instance(&doc.to_string()).unwrap();
        assert_eq!(
            inst.planner.objective_mode,
            ObjectiveMode::Weighted {
                eta1: Some(1.0),
                eta2: None
            }
        );
        assert_eq!(
            inst.planner.accumulation_model,
            AccumulationModel::Tanh { h_per_m: 0.0001 }
        );
        doc["planner"]["objective_mode"] = "bogus".into();
        assert!(load_instance(&doc.to_string()).is_err());
    }

    #[test]
    fn collapsed_frame_has_one_slot() {
        let inst = load_instance(&base_doc().to_string()).unwrap();
        let c = inst.collapsed_frame();
        assert_eq!(c.slot_count(), 1);
        assert_eq!(c.slot_capacity_gbps(), decimal::int(10));
        assert_eq!(c.required_units(0), 1);
    }

    #[test]
    fn document_round_trip() {
        let inst = load_instance(&base_doc().to_string()).unwrap();
        assert_eq!(load_instance(&inst.to_json()).unwrap(), inst);
    }

    proptest! {
        #[test]
        fn ceiling_brackets_bandwidth(bn in 1i64..10_000, bd in 1i64..100, cn in 1i64..1_000, cd in 1i64..100) {
            let b = Rational::new(bn, bd);
            let c = Rational::new(cn, cd);
            let q = required_slot_units(b, c) as i64;
            prop_assert!(decimal::int(q) * c >= b);
            prop_assert!(decimal::int(q - 1) * c < b);
        }
    }
}
