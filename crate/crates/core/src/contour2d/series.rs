use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Time-stamped scalar diagnostics, `(time, name, value)` in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSeries {
    pub records: Vec<(f64, String, f64)>,
}

impl DiagnosticSeries {
    /// Appends a record. Times must not decrease within one name.
    pub fn push(&mut self, time: f64, name: &str, value: f64) {
        debug_assert!(
            self.last(name).is_none_or(|(t, _)| t <= time),
            "time decreased for series {name}"
        );
        self.records.push((time, name.to_string(), value));
    }

    pub fn extend(&mut self, other: &DiagnosticSeries) {
        for (t, n, v) in &other.records {
            self.push(*t, n, *v);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Distinct names in first-appearance order.
    pub fn names(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for (_, n, _) in &self.records {
            if !seen.contains(n) {
                seen.push(n.clone());
            }
        }
        seen
    }

    pub fn get(&self, name: &str) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|(_, n, _)| n == name)
            .map(|(t, _, v)| (*t, *v))
            .collect()
    }

    pub fn last(&self, name: &str) -> Option<(f64, f64)> {
        self.records
            .iter()
            .rev()
            .find(|(_, n, _)| n == name)
            .map(|(t, _, v)| (*t, *v))
    }

    pub fn by_name(&self) -> BTreeMap<String, Vec<(f64, f64)>> {
        let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for (t, n, v) in &self.records {
            out.entry(n.clone()).or_default().push((*t, *v));
        }
        out
    }

    pub fn times_monotone(&self) -> bool {
        self.by_name()
            .values()
            .all(|s| s.windows(2).all(|w| w[0].0 <= w[1].0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_preserves_order() {
        let mut s = DiagnosticSeries::default();
        s.push(0.0, "b", 1.0);
        s.push(0.0, "a", 2.0);
        s.push(1.0, "b", 3.0);
        assert_eq!(s.names(), vec!["b".to_string(), "a".to_string()]);
        assert_eq!(s.get("b"), vec![(0.0, 1.0), (1.0, 3.0)]);
        assert_eq!(s.last("a"), Some((0.0, 2.0)));
        assert!(s.times_monotone());
    }
}
