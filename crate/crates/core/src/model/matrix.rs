use crate::error::FieldError;

/// Measured modal crosstalk between the four reference modes, dB per 100 m.
/// Row is the aggressor mode, column the victim.
pub const REFERENCE_XT_DB_PER_100M: [[Option<f64>; 4]; 4] = [
    [None, Some(-26.0), Some(-21.2), Some(-43.0)],
    [Some(-17.7), None, Some(-15.8), Some(-19.7)],
    [Some(-19.5), Some(-14.3), None, Some(-15.6)],
    [Some(-21.5), Some(-16.7), Some(-17.5), None],
];

/// Display labels of the reference modes, indexed like the matrix.
pub const LP_LABELS: [&str; 4] = ["LP01", "LP11", "LP02", "LP31"];

pub fn mode_label(mode: usize) -> String {
    format!("m{}", mode + 1)
}

pub fn lp_label(mode: usize) -> Option<&'static str> {
    LP_LABELS.get(mode).copied()
}

/// Square aggressor × victim coupling matrix in dB per 100 m. Not required
/// to be symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct CrosstalkMatrix {
    rows: Vec<Vec<Option<f64>>>,
}

impl CrosstalkMatrix {
    pub fn reference() -> Self {
        Self {
            rows: REFERENCE_XT_DB_PER_100M.iter().map(|r| r.to_vec()).collect(),
        }
    }

    /// The reference matrix restricted to a subset of its modes, renumbered
    /// in the given order.
    pub fn reference_subset(modes: &[usize]) -> Self {
        let rows = modes
            .iter()
            .map(|&a| modes.iter().map(|&v| REFERENCE_XT_DB_PER_100M[a][v]).collect())
            .collect();
        Self { rows }
    }

    pub fn from_rows(rows: Vec<Vec<Option<f64>>>) -> Result<Self, Vec<FieldError>> {
        let mut errors = Vec::new();
        Self::check_rows(&rows, "crosstalk_db_per_100m", &mut errors);
        if errors.is_empty() {
            Ok(Self { rows })
        } else {
            Err(errors)
        }
    }

    pub(crate) fn check_rows(rows: &[Vec<Option<f64>>], prefix: &str, errors: &mut Vec<FieldError>) {
        let n = rows.len();
        for (a, row) in rows.iter().enumerate() {
            if row.len() != n {
                errors.push(FieldError::new(
                    format!("{prefix}[{a}]"),
                    format!("row has {} entries, matrix is {n}x{n}", row.len()),
                ));
                continue;
            }
            for (v, entry) in row.iter().enumerate() {
                let path = format!("{prefix}[{a}][{v}]");
                match (a == v, entry) {
                    (true, Some(_)) => errors.push(FieldError::new(path, "diagonal must be null (no self-crosstalk)")),
                    (false, None) => errors.push(FieldError::new(path, "off-diagonal entry missing")),
                    (false, Some(y)) if !(y.is_finite() && *y < 0.0) => errors.push(FieldError::new(
                        path,
                        format!("crosstalk must be finite and below 0 dB, got {y}"),
                    )),
                    _ => {}
                }
            }
        }
    }

    pub(crate) fn from_checked_rows(rows: Vec<Vec<Option<f64>>>) -> Self {
        Self { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// Coupling from `aggressor` into `victim`; `None` on the diagonal.
    pub fn get(&self, aggressor: usize, victim: usize) -> Option<f64> {
        self.rows[aggressor][victim]
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    /// Strongest (least negative) off-diagonal coupling.
    pub fn strongest(&self) -> Option<f64> {
        self.rows
            .iter()
            .flatten()
            .flatten()
            .copied()
            .fold(None, |acc: Option<f64>, y| Some(acc.map_or(y, |m| m.max(y))))
    }
}
