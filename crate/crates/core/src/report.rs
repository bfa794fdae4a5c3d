//! Named residual checks and their aggregation over sample points.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One named residual with its verdict.
///
/// `pass` is false whenever `vacuous` is set. For an expected failure (an
/// obstruction that theory says must be exhibited) `pass` means the
/// obstruction was exhibited, i.e. the class residual is large or a witness
/// demonstrates the contradiction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub anchor: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub vacuous: bool,
    #[serde(default)]
    pub expected_failure: bool,
    #[serde(default)]
    pub witnesses: BTreeMap<String, f64>,
}

fn below(residual: f64, tolerance: f64) -> bool {
    residual.is_finite() && residual < tolerance
}

impl CheckEntry {
    pub fn residual(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            max_residual: residual,
            tolerance,
            pass: below(residual, tolerance),
            vacuous: false,
            expected_failure: false,
            witnesses: BTreeMap::new(),
        }
    }

    /// Obstruction entry; `exhibited` decides `pass`.
    pub fn obstruction(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
        exhibited: bool,
    ) -> Self {
        Self {
            expected_failure: true,
            pass: exhibited,
            ..Self::residual(name, anchor, residual, tolerance)
        }
    }

    pub fn with_witness(mut self, key: impl Into<String>, value: f64) -> Self {
        self.witnesses.insert(key.into(), value);
        self
    }

    /// Marks the clause as vacuous; a vacuous clause never passes.
    pub fn into_vacuous(mut self) -> Self {
        self.vacuous = true;
        self.pass = false;
        self
    }

    /// Whether the residual itself is below tolerance, ignoring obstruction
    /// semantics.
    pub fn holds(&self) -> bool {
        below(self.max_residual, self.tolerance)
    }

    /// Verdict for exit-code purposes.
    pub fn verdict(&self, strict_obstructions: bool) -> Verdict {
        if self.vacuous {
            Verdict::Vacuous
        } else if self.expected_failure && strict_obstructions {
            if self.holds() {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        } else if self.pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Tolerance classes: pointwise algebra, finite-difference derivatives,
/// and least-squares fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub analytic: f64,
    pub fd: f64,
    pub fit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: 1e-9,
            fd: 1e-6,
            fit: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

/// Ordered collection of checks; entries with the same name are merged by
/// taking the worst residual.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `residual` for check `name`, keeping the maximum seen so far.
    pub fn record(&mut self, name: &str, anchor: &str, residual: f64, tolerance: f64) {
        self.merge_entry(CheckEntry::residual(name, anchor, residual, tolerance));
    }

    /// Adds an entry, or merges into an existing one with the same name.
    pub fn merge_entry(&mut self, entry: CheckEntry) {
        match self.entries.iter_mut().find(|e| e.name == entry.name) {
            Some(existing) => {
                let worse = !(existing.max_residual >= entry.max_residual);
                if worse || entry.max_residual.is_nan() {
                    existing.max_residual = entry.max_residual;
                }
                for (k, v) in entry.witnesses {
                    let slot = existing.witnesses.entry(k).or_insert(v);
                    if v.abs() > slot.abs() {
                        *slot = v;
                    }
                }
                existing.vacuous = existing.vacuous && entry.vacuous;
                existing.pass = if existing.expected_failure {
                    existing.pass && entry.pass
                } else {
                    !existing.vacuous && below(existing.max_residual, existing.tolerance)
                };
            }
            None => self.entries.push(entry),
        }
    }

    pub fn merge(&mut self, other: CheckReport) {
        for e in other.entries {
            self.merge_entry(e);
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Residual of a named check; panics on unknown names.
    pub fn residual_of(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("no check named `{name}`"))
            .max_residual
    }

    pub fn all_pass(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.verdict(false) != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries
            .iter()
            .filter(|e| e.verdict(false) == Verdict::Fail)
    }

    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| !e.expected_failure)
            .map(|e| e.max_residual)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_keeps_worst_residual() {
        let mut r = CheckReport::new();
        r.record("a", "x = y", 1e-12, 1e-9);
        r.record("a", "x = y", 1e-3, 1e-9);
        r.record("a", "x = y", 1e-14, 1e-9);
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.residual_of("a"), 1e-3);
        assert!(!r.all_pass());
    }

    #[test]
    fn nan_residual_fails() {
        let mut r = CheckReport::new();
        r.record("a", "", 0.0, 1e-9);
        r.record("a", "", f64::NAN, 1e-9);
        assert!(!r.all_pass());
    }

    #[test]
    fn vacuous_is_neither_pass_nor_fail() {
        let e = CheckEntry::residual("ode", "", 0.0, 1e-9).into_vacuous();
        assert!(!e.pass);
        assert_eq!(e.verdict(false), Verdict::Vacuous);
    }

    #[test]
    fn strict_mode_flips_obstructions() {
        let e = CheckEntry::obstruction("umbilic", "", 1.0, 1e-9, true);
        assert_eq!(e.verdict(false), Verdict::Pass);
        assert_eq!(e.verdict(true), Verdict::Fail);
    }
}
