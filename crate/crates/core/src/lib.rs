//! Literal-closure reduction for prenex CNF quantified boolean formulas.
//!
//! The crate implements a polynomial-time reduction procedure ([`reducer`])
//! over a closure operator on literals ([`closure`]), two exact exponential
//! oracles ([`oracle`]), and a differential harness ([`fuzz`]) that checks the
//! procedure and the properties it relies on against those oracles,
//! shrinking and banking every disagreement it finds.

pub mod bench;
pub mod closure;
pub mod error;
pub mod formula;
pub mod fuzz;
pub mod oracle;
pub mod qdimacs;
pub mod reducer;
pub mod trace;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use formula::{negate, ClauseId, Formula, Literal, Prefix, Quantifier};
pub use reducer::{decide, ScanPolicy};

/// Truth value of a closed formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    True,
    False,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Verdict::True
    }

    /// `1` for TRUE, `0` for FALSE.
    pub fn digit(self) -> u8 {
        self.is_true() as u8
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::True => f.write_str("TRUE"),
            Verdict::False => f.write_str("FALSE"),
        }
    }
}
