//! Truncated Fock-space linear algebra.
//!
//! A single bosonic mode is represented on the number states `|0⟩ … |n_max⟩`.
//! States ([`StateVector`]) and operators ([`ModeOperator`]) carry their
//! [`FockCutoff`] so that mixing truncations is caught at run time, and
//! [`MultiModeState`] holds tensor products over labeled modes.

mod displacement;
mod multimode;
mod operator;
mod state;

pub use displacement::{displacement_block, displacement_matrix};
pub use multimode::{tensor_product, MultiModeState};
pub use operator::ModeOperator;
pub use state::{
    coherent_state, coherent_state_with, fidelity, inner_product, number_state, StateVector,
    TruncationWarning, COHERENT_TAIL_TOLERANCE,
};

use crate::error::{Error, Result};

/// Cutoff used for closed-form cross-checks.
pub const DEFAULT_CUTOFF: usize = 32;

/// Cutoff used when comparing against numerical oracles.
pub const ORACLE_CUTOFF: usize = 64;

/// Relative tail mass `|a_{n_max}|² / ‖a‖²` above which a state is flagged.
pub const TAIL_WARNING_THRESHOLD: f64 = 1e-9;

/// Highest retained Fock level of a truncated mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidCutoff(n_max));
        }
        Ok(Self(n_max))
    }

    #[inline]
    pub fn n_max(self) -> usize {
        self.0
    }

    /// Hilbert-space dimension `n_max + 1`.
    #[inline]
    pub fn dim(self) -> usize {
        self.0 + 1
    }

    pub(crate) fn ensure_same(self, other: FockCutoff) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::CutoffMismatch {
                left: self.0,
                right: other.0,
            })
        }
    }

    pub(crate) fn ensure_level(self, level: usize) -> Result<()> {
        if level > self.0 {
            Err(Error::CutoffViolation {
                level,
                n_max: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for FockCutoff {
    fn default() -> Self {
        Self(DEFAULT_CUTOFF)
    }
}

impl std::fmt::Display for FockCutoff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for FockCutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a cutoff")))?;
        Self::new(n)
    }
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}
