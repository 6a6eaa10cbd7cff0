use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::blocks::DyadicConfig;
use crate::error::Result;
use crate::spectral::SpectralGrid;

/// The sample at which an estimate came closest to (or furthest past) its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum WorstCase {
    None,
    Config(DyadicConfig),
    Tuple(Vec<f64>),
    /// A scalar parameter such as an amplitude or a dyadic index.
    Parameter(f64),
}

/// Outcome of one empirical bound check.
///
/// `fitted_constant` is the largest observed ratio `estimate / bound`;
/// `violations_at_c` counts samples whose ratio exceeds `stored_constant`.
/// Trend-level probes carry no stored constant and never count violations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckReport {
    pub bound_id: String,
    pub seed: u64,
    pub samples: usize,
    pub fitted_constant: f64,
    pub stored_constant: Option<f64>,
    pub violations_at_c: usize,
    pub worst: WorstCase,
    pub budgets: BTreeMap<String, f64>,
    pub grid: Option<SpectralGrid>,
    pub details: BTreeMap<String, f64>,
    pub version: String,
}

impl BoundCheckReport {
    pub fn new(bound_id: impl Into<String>, seed: u64, stored_constant: f64) -> Self {
        Self::build(bound_id.into(), seed, Some(stored_constant))
    }

    /// A report for a trend-level check without an absolute constant.
    pub fn trend(bound_id: impl Into<String>, seed: u64) -> Self {
        Self::build(bound_id.into(), seed, None)
    }

    fn build(bound_id: String, seed: u64, stored_constant: Option<f64>) -> Self {
        BoundCheckReport {
            bound_id,
            seed,
            samples: 0,
            fitted_constant: 0.0,
            stored_constant,
            violations_at_c: 0,
            worst: WorstCase::None,
            budgets: BTreeMap::new(),
            grid: None,
            details: BTreeMap::new(),
            version: crate::VERSION.to_string(),
        }
    }

    /// Folds in one sample's ratio. Ties keep the earlier worst case.
    pub fn record(&mut self, ratio: f64, at: impl FnOnce() -> WorstCase) {
        self.samples += 1;
        if self.stored_constant.is_some_and(|c| ratio > c) {
            self.violations_at_c += 1;
        }
        if ratio > self.fitted_constant {
            self.fitted_constant = ratio;
            self.worst = at();
        }
    }

    pub fn with_budget(mut self, name: &str, value: f64) -> Self {
        self.budgets.insert(name.to_string(), value);
        self
    }

    pub fn with_grid(mut self, grid: &SpectralGrid) -> Self {
        self.grid = Some(grid.clone());
        self
    }

    pub fn detail(&mut self, name: &str, value: f64) {
        self.details.insert(name.to_string(), value);
    }

    /// No violations at the stored constant and a positive fitted constant.
    pub fn passed(&self) -> bool {
        self.violations_at_c == 0 && self.fitted_constant > 0.0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_tracks_max_and_violations() {
        let mut r = BoundCheckReport::new("demo", 3, 2.0);
        r.record(1.0, || WorstCase::Parameter(1.0));
        r.record(2.5, || WorstCase::Parameter(2.0));
        r.record(0.5, || WorstCase::Parameter(3.0));
        assert_eq!(r.samples, 3);
        assert_eq!(r.fitted_constant, 2.5);
        assert_eq!(r.violations_at_c, 1);
        assert_eq!(r.worst, WorstCase::Parameter(2.0));
        assert!(!r.passed());
    }

    #[test]
    fn trend_reports_never_violate() {
        let mut r = BoundCheckReport::trend("demo", 1);
        r.record(1e9, || WorstCase::None);
        assert_eq!(r.violations_at_c, 0);
        assert!(r.passed());
    }

    #[test]
    fn json_round_trip() {
        let mut r = BoundCheckReport::new("demo", 9, 1.0).with_budget("trials", 16.0);
        r.record(0.25, || WorstCase::Tuple(vec![1.0, 2.0, -3.0]));
        r.detail("slope", 3.0);
        let back: BoundCheckReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
