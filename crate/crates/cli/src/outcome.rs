//! Assertions and the result of one experiment.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
        })
    }
}

/// One checked condition `value relation threshold`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Assertion {
    pub name: String,
    #[serde(with = "acsim_core::io::extended_f64")]
    pub value: f64,
    pub relation: Relation,
    #[serde(with = "acsim_core::io::extended_f64")]
    pub threshold: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, threshold: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= threshold,
            Relation::AtLeast => value >= threshold,
            Relation::Below => value < threshold,
            Relation::Above => value > threshold,
        };
        Assertion {
            name: name.into(),
            value,
            relation,
            threshold,
            passed,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtMost, threshold)
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value, Relation::AtLeast, threshold)
    }

    /// A boolean condition, stored as `value = 0 or 1 >= 1`.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { 1.0 } else { 0.0 }, Relation::AtLeast, 1.0)
    }
}

/// Assertions gathered by an experiment.
pub trait Checked {
    fn assertions(&self) -> &[Assertion];

    fn passed(&self) -> bool {
        self.assertions().iter().all(|a| a.passed)
    }

    fn failures(&self) -> Vec<&Assertion> {
        self.assertions().iter().filter(|a| !a.passed).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Assertion::at_most("a", 1.0, 1.0).passed);
        assert!(!Assertion::new("a", 1.0, Relation::Below, 1.0).passed);
        assert!(!Assertion::at_most("nan", f64::NAN, 1.0).passed);
        assert!(!Assertion::holds("b", false).passed);
    }
}
