//! CPLEX LP text output.

use std::path::{Path, PathBuf};

use super::{Family, MilpModel, Objective, ObjectiveSense, Objectives, Sense, VarKind};
use crate::error::{Error, Result};

const WIDTH: usize = 78;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpPhase {
    /// The weighted single objective.
    Single,
    /// Maximize throughput.
    Phase1,
    /// Minimize occupied cells with throughput held at the floor.
    Phase2,
}

fn number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

struct Lines {
    out: String,
    line: String,
}

impl Lines {
    fn new() -> Self {
        Self {
            out: String::new(),
            line: String::new(),
        }
    }

    fn start(&mut self, head: &str) {
        self.flush();
        self.line.push_str(head);
    }

    fn token(&mut self, tok: &str) {
        if self.line.len() + 1 + tok.len() > WIDTH && !self.line.trim().is_empty() {
            self.flush();
            self.line.push_str("  ");
        }
        self.line.push(' ');
        self.line.push_str(tok);
    }

    fn flush(&mut self) {
        if !self.line.is_empty() {
            self.out.push_str(&self.line);
            self.out.push('\n');
            self.line.clear();
        }
    }

    fn raw(&mut self, text: &str) {
        self.flush();
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn terms(&mut self, model: &MilpModel, terms: &[(usize, f64)]) {
        for (i, &(v, c)) in terms.iter().enumerate() {
            let name = &model.variables[v].name;
            let sign = if c < 0.0 { "-" } else { "+" };
            let mag = c.abs();
            let body = if mag == 1.0 {
                name.clone()
            } else {
                format!("{} {name}", number(mag))
            };
            let tok = match (i, sign) {
                (0, "+") => body,
                _ => format!("{sign} {body}"),
            };
            self.token(&tok);
        }
    }
}

/// Renders one phase of `model` as LP text.
pub fn write_lp(model: &MilpModel, phase: LpPhase) -> Result<String> {
    let (objective, floor): (&Objective, Option<(&Objective, f64)>) = match (&model.objectives, phase) {
        (Objectives::Weighted(obj), LpPhase::Single) => (obj, None),
        (Objectives::TwoPhase { throughput, .. }, LpPhase::Phase1) => (throughput, None),
        (
            Objectives::TwoPhase {
                throughput,
                usage,
                throughput_floor,
            },
            LpPhase::Phase2,
        ) => {
            let floor =
                throughput_floor.ok_or_else(|| Error::InvalidParameter("phase 2 needs a throughput floor".into()))?;
            (usage, Some((throughput, floor)))
        }
        (Objectives::Weighted(_), _) => {
            return Err(Error::InvalidParameter("weighted models have a single phase".into()))
        }
        (Objectives::TwoPhase { .. }, LpPhase::Single) => {
            return Err(Error::InvalidParameter("two-phase models are written per phase".into()))
        }
    };

    let idx = &model.index;
    let mut w = Lines::new();
    w.raw(&format!("\\ Model {}", model.name));
    w.raw(&format!(
        "\\ {} requests, {} links, {} modes, {} slots",
        idx.requests, idx.links, idx.modes, idx.slots
    ));
    w.raw(match phase {
        LpPhase::Single => "\\ Weighted objective: eta1 * throughput - eta2 * occupied cells",
        LpPhase::Phase1 => "\\ Phase 1 of 2: maximize throughput",
        LpPhase::Phase2 => "\\ Phase 2 of 2: minimize occupied cells at the phase-1 throughput",
    });
    w.raw(match objective.sense {
        ObjectiveSense::Maximize => "Maximize",
        ObjectiveSense::Minimize => "Minimize",
    });
    w.start(" obj:");
    w.terms(model, &objective.terms);
    w.raw("Subject To");
    let mut current: Option<Family> = None;
    for c in &model.constraints {
        if current != Some(c.family) {
            current = Some(c.family);
            w.raw(&format!("\\ {}: {}", c.family.label(), c.family.description()));
        }
        w.start(&format!(" {}:", c.name));
        w.terms(model, &c.terms);
        w.token(&format!("{} {}", c.sense.symbol(), number(c.rhs)));
    }
    if let Some((throughput, floor)) = floor {
        w.raw(&format!("\\ {}: {}", Family::Fix.label(), Family::Fix.description()));
        w.start(" fix_throughput:");
        w.terms(model, &throughput.terms);
        w.token(&format!("{} {}", Sense::Ge.symbol(), number(floor)));
    }
    w.raw("Bounds");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
        w.raw(&format!(" {} <= {} <= {}", number(v.lower), v.name, number(v.upper)));
    }
    w.raw("Binaries");
    w.start("");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Binary) {
        w.token(&v.name);
    }
    w.raw("End");
    Ok(w.out)
}

/// `model.lp` becomes `model.phase1.lp` and `model.phase2.lp`.
pub fn phase_paths(destination: &Path) -> (PathBuf, PathBuf) {
    let stem = match destination.extension() {
        Some(ext) if ext == "lp" => destination.with_extension(""),
        _ => destination.to_path_buf(),
    };
    let with = |suffix: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".phase1.lp"), with(".phase2.lp"))
}

/// Writes the model next to `destination`: one file for a weighted model,
/// two phase files for a two-phase model. Returns the paths written.
pub fn emit_lp(model: &MilpModel, destination: &Path) -> Result<Vec<PathBuf>> {
    let outputs = match model.objectives {
        Objectives::Weighted(_) => vec![(destination.to_path_buf(), write_lp(model, LpPhase::Single)?)],
        Objectives::TwoPhase { .. } => {
            let (p1, p2) = phase_paths(destination);
            vec![
                (p1, write_lp(model, LpPhase::Phase1)?),
                (p2, write_lp(model, LpPhase::Phase2)?),
            ]
        }
    };
    let mut written = Vec::new();
    for (path, text) in outputs {
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
