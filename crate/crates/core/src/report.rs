//! Report fields shared by the modules and the CLI.

use serde::Serialize;

/// A finite-section value at truncation `N` together with its value at
/// `2N`; `delta` is the truncation evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Refined {
    pub value: f64,
    pub at_2n: f64,
    pub delta: f64,
}

impl Refined {
    pub fn new(value: f64, at_2n: f64) -> Self {
        Refined {
            value,
            at_2n,
            delta: (at_2n - value).abs(),
        }
    }
}

/// Where a reported number comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "provenance", rename_all = "snake_case")]
pub enum Tagged {
    /// A closed-form value that holds under the stated hypotheses.
    TheoremCertified { value: f64, formula: String },
    /// A numerical estimate from finite sections or grids.
    FiniteSection { value: f64, at_2n: f64, delta: f64 },
}

impl Tagged {
    pub fn certified(value: f64, formula: impl Into<String>) -> Self {
        Tagged::TheoremCertified {
            value,
            formula: formula.into(),
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Tagged::TheoremCertified { value, .. } | Tagged::FiniteSection { value, .. } => *value,
        }
    }
}

impl From<Refined> for Tagged {
    fn from(r: Refined) -> Self {
        Tagged::FiniteSection {
            value: r.value,
            at_2n: r.at_2n,
            delta: r.delta,
        }
    }
}
