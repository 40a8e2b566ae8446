//! Structured verdicts shared by every checker: a list of named checks,
//! each with an optional witness (where it fails, which monomial, which
//! coefficient). Serializes to JSON with sorted keys.

use serde_json::{json, Value};

use crate::exterior::{AltField, Variance};
use crate::poly::{Rational, TruncatedPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Where the failure sits: a basis element, a test tuple, a pair `(i, j)`.
    pub location: String,
    pub monomial: String,
    pub coefficient: Rational,
}

impl Witness {
    pub fn of_poly(location: impl Into<String>, p: &TruncatedPoly) -> Option<Witness> {
        p.leading_witness().map(|(m, c)| Witness {
            location: location.into(),
            monomial: m.to_string(),
            coefficient: c,
        })
    }

    pub fn of_field<V: Variance>(prefix: &str, f: &AltField<V>) -> Option<Witness> {
        f.witness().map(|(idx, m, c)| {
            let basis = if idx.is_empty() {
                "1".to_string()
            } else {
                idx.iter()
                    .map(|i| format!("{}{}", V::BASIS, i + 1))
                    .collect::<Vec<_>>()
                    .join("^")
            };
            let location = if prefix.is_empty() {
                basis
            } else {
                format!("{} {}", prefix, basis)
            };
            Witness {
                location,
                monomial: m.to_string(),
                coefficient: c,
            }
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "location": self.location,
            "monomial": self.monomial,
            "coefficient": self.coefficient.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: String,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Check {
    pub fn pass(id: impl Into<String>) -> Check {
        Check {
            id: id.into(),
            holds: true,
            witness: None,
        }
    }

    /// Passes iff `w` is `None`.
    pub fn from_witness(id: impl Into<String>, w: Option<Witness>) -> Check {
        Check {
            id: id.into(),
            holds: w.is_none(),
            witness: w,
        }
    }

    pub fn zero_field<V: Variance>(id: impl Into<String>, f: &AltField<V>) -> Check {
        Check::from_witness(id, Witness::of_field("", f))
    }

    pub fn zero_poly(id: impl Into<String>, p: &TruncatedPoly) -> Check {
        Check::from_witness(id, Witness::of_poly("", p))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "holds": self.holds,
            "witness": self.witness.as_ref().map(Witness::to_json),
        })
    }
}

/// Conjunction of checks. Checks stop being added after the first failure
/// only if the producer chooses so; `holds` is the conjunction of all.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Verdict {
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn new() -> Verdict {
        Verdict { checks: Vec::new() }
    }

    pub fn single(c: Check) -> Verdict {
        Verdict { checks: vec![c] }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.holds)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "verdict: {}",
            if self.holds() { "true" } else { "false" }
        )?;
        for c in &self.checks {
            write!(f, "  {}: {}", c.id, if c.holds { "ok" } else { "FAILS" })?;
            if let Some(w) = &c.witness {
                write!(
                    f,
                    " (at {}, monomial {}, coefficient {})",
                    w.location, w.monomial, w.coefficient
                )?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
