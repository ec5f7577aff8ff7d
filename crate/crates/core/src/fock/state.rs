use num_complex::Complex64;

use super::{ln_factorials, FockCutoff, TAIL_WARNING_THRESHOLD};
use crate::error::{Error, Result};

/// Default bound on the probability mass a coherent state may lose to truncation.
pub const COHERENT_TAIL_TOLERANCE: f64 = 1e-12;

const NORMALIZED_TOL: f64 = 1e-12;

/// Amplitudes of a single bosonic mode on `|0⟩ … |n_max⟩`.
///
/// Teleportation outputs are left unnormalized on purpose: their squared
/// norm is the probability density of the measurement result that produced
/// them. Use [`StateVector::normalized`] to obtain a unit vector explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    cutoff: FockCutoff,
    normalized: bool,
}

/// Raised (non-fatally) when a state has too much weight on the highest
/// retained level for the truncation to be trusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWarning {
    pub relative_tail: f64,
    pub threshold: f64,
}

impl StateVector {
    /// Wraps raw amplitudes; the result is flagged unnormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, cutoff: FockCutoff) -> Result<Self> {
        if amplitudes.len() != cutoff.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes given for a cutoff of dimension {}",
                amplitudes.len(),
                cutoff.dim()
            )));
        }
        Ok(Self {
            amplitudes,
            cutoff,
            normalized: false,
        })
    }

    pub(crate) fn from_raw(amplitudes: Vec<Complex64>, cutoff: FockCutoff) -> Self {
        debug_assert_eq!(amplitudes.len(), cutoff.dim());
        Self {
            amplitudes,
            cutoff,
            normalized: false,
        }
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Amplitude `⟨n|ψ⟩`; zero above the cutoff.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Photon-number probabilities `|aₙ|²` (not divided by the norm).
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mean photon number `⟨n⟩` of the normalized state.
    pub fn mean_photon_number(&self) -> Result<f64> {
        let norm = self.norm_sqr();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let weighted: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum();
        Ok(weighted / norm)
    }

    /// `|a_{n_max}|² / ‖a‖²`, or zero for the null vector.
    pub fn tail_mass(&self) -> f64 {
        let norm = self.norm_sqr();
        if norm == 0.0 {
            0.0
        } else {
            self.amplitudes[self.cutoff.n_max()].norm_sqr() / norm
        }
    }

    pub fn truncation_warning(&self) -> Option<TruncationWarning> {
        let relative_tail = self.tail_mass();
        (relative_tail > TAIL_WARNING_THRESHOLD).then_some(TruncationWarning {
            relative_tail,
            threshold: TAIL_WARNING_THRESHOLD,
        })
    }

    /// Logs a warning when the tail mass is above threshold and passes the state through.
    pub(crate) fn checked(self, context: &str) -> Self {
        if let Some(w) = self.truncation_warning() {
            log::warn!(
                "{context}: relative tail mass {:.3e} at n_max = {} exceeds {:.1e}",
                w.relative_tail,
                self.cutoff,
                w.threshold
            );
        }
        self
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = norm.sqrt().recip();
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|a| a * scale).collect(),
            cutoff: self.cutoff,
            normalized: true,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_raw(
            self.amplitudes.iter().map(|a| a * factor).collect(),
            self.cutoff,
        )
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.cutoff.ensure_same(other.cutoff)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// True if this is exactly the number state `|n⟩` (up to normalization flag).
    pub fn is_number_state(&self, n: usize) -> bool {
        self.amplitudes.iter().enumerate().all(|(k, a)| {
            if k == n {
                *a == Complex64::new(1.0, 0.0)
            } else {
                *a == Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// The number state `|n⟩`.
pub fn number_state(n: usize, cutoff: FockCutoff) -> Result<StateVector> {
    cutoff.ensure_level(n)?;
    let mut amplitudes = vec![Complex64::default(); cutoff.dim()];
    amplitudes[n] = Complex64::new(1.0, 0.0);
    Ok(StateVector {
        amplitudes,
        cutoff,
        normalized: true,
    })
}

/// Coherent state `|α⟩` with the default tail tolerance, not renormalized.
pub fn coherent_state(alpha: Complex64, cutoff: FockCutoff) -> Result<StateVector> {
    coherent_state_with(alpha, cutoff, COHERENT_TAIL_TOLERANCE, false)
}

/// Coherent state `|α⟩ = e^{−|α|²/2} Σ αⁿ/√n! |n⟩` on the truncated basis.
///
/// Fails when the probability mass lost above the cutoff exceeds `tolerance`.
/// With `renormalize` the retained amplitudes are rescaled to unit norm.
pub fn coherent_state_with(
    alpha: Complex64,
    cutoff: FockCutoff,
    tolerance: f64,
    renormalize: bool,
) -> Result<StateVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "non-finite amplitude {alpha}"
        )));
    }
    let dim = cutoff.dim();
    let mut amplitudes = Vec::with_capacity(dim);
    if alpha == Complex64::default() {
        amplitudes.push(Complex64::new(1.0, 0.0));
        amplitudes.resize(dim, Complex64::default());
    } else {
        let lf = ln_factorials(cutoff.n_max());
        let (r, phase) = alpha.to_polar();
        let x = r * r;
        for (n, lnf) in lf.iter().enumerate() {
            let mag = (-0.5 * x + n as f64 * r.ln() - 0.5 * lnf).exp();
            amplitudes.push(Complex64::from_polar(mag, n as f64 * phase));
        }
    }
    let retained: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let tail = (1.0 - retained).max(0.0);
    if tail > tolerance {
        return Err(Error::Truncation { tail, tolerance });
    }
    let mut state = StateVector {
        amplitudes,
        cutoff,
        normalized: (1.0 - retained).abs() < NORMALIZED_TOL,
    };
    if renormalize {
        state = state.normalized()?;
    }
    Ok(state)
}

/// `⟨x|y⟩`, conjugate-linear in `x`.
pub fn inner_product(x: &StateVector, y: &StateVector) -> Result<Complex64> {
    x.cutoff.ensure_same(y.cutoff)?;
    Ok(x.amplitudes
        .iter()
        .zip(&y.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// `|⟨x|y⟩|² / (‖x‖² ‖y‖²)`.
pub fn fidelity(x: &StateVector, y: &StateVector) -> Result<f64> {
    let overlap = inner_product(x, y)?;
    let denom = x.norm_sqr() * y.norm_sqr();
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(overlap.norm_sqr() / denom)
}
