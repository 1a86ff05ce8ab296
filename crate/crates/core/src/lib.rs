//! Weyl-algebra and dense functional-calculus engines for checking the
//! logarithmic representation of rotation generators on periodic grids.
//!
//! * [`symop`] — exact symbolic operators, normal ordering, expression parser.
//! * [`gridops`] — periodic grids, sampled fields, operator matrices.
//! * [`funcalc`] — `expm`, two principal `logm` algorithms, resolvents, spectra.
//! * [`logrep`] — evolution families and the logarithmic-representation identities.
//! * [`verify`] — suites, configuration and JSON records.

pub mod funcalc;
pub mod gridops;
pub mod linalg;
pub mod logrep;
pub mod symop;
pub mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Option<Axis> {
        Axis::ALL.get(k).copied()
    }

    /// `(j, k)` such that `(self, j, k)` is a cyclic permutation of `(x, y, z)`.
    pub fn cyclic_successors(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(format!("unknown axis '{s}' (expected x, y or z)")),
        }
    }
}
