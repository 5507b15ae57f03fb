//! Run reports: measured metrics checked against declared thresholds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, Threshold};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub name: String,
    /// `None` when the run did not produce a value for a declared threshold.
    pub value: Option<f64>,
    pub threshold: Option<Threshold>,
    /// `None` for informational metrics without a threshold.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub version: String,
    pub config_hash: String,
    /// Sorted by name.
    pub metrics: Vec<MetricResult>,
    /// Paths relative to the scenario output directory.
    pub artifacts: Vec<String>,
    pub passed: bool,
}

impl RunReport {
    /// Checks `measured` against the scenario thresholds. A threshold on a
    /// metric the run did not produce counts as a failure.
    pub fn evaluate(scenario: &Scenario, measured: &BTreeMap<String, f64>, artifacts: Vec<String>) -> Self {
        let mut names: Vec<&String> = measured.keys().chain(scenario.thresholds.keys()).collect();
        names.sort();
        names.dedup();
        let metrics: Vec<MetricResult> = names
            .into_iter()
            .map(|name| {
                let value = measured.get(name).copied();
                let threshold = scenario.thresholds.get(name).copied();
                let pass = threshold.map(|t| value.is_some_and(|v| t.accepts(v)));
                MetricResult {
                    name: name.clone(),
                    value,
                    threshold,
                    pass,
                }
            })
            .collect();
        let passed = metrics.iter().all(|m| m.pass != Some(false));
        RunReport {
            scenario: scenario.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: scenario.config_hash(),
            metrics,
            artifacts,
            passed,
        }
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).and_then(|m| m.value)
    }

    pub fn failures(&self) -> Vec<&MetricResult> {
        self.metrics.iter().filter(|m| m.pass == Some(false)).collect()
    }

    /// One line per metric, thresholded ones marked PASS or FAIL.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} [{}] {}\n",
            self.scenario.name,
            self.scenario.module.name(),
            if self.passed { "PASS" } else { "FAIL" }
        );
        for m in &self.metrics {
            let tag = match m.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "    ",
            };
            let value = m.value.map_or("missing".to_string(), |v| format!("{v:.6e}"));
            let bound = m.threshold.map_or(String::new(), |t| {
                let lo = t.min.map_or(String::new(), |v| format!(" >= {v:e}"));
                let hi = t.max.map_or(String::new(), |v| format!(" <= {v:e}"));
                format!("  (want{lo}{hi})")
            });
            s += &format!("  {tag} {:<32} {value}{bound}\n", m.name);
        }
        s
    }
}
