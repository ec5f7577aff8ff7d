use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::{FockCutoff, StateVector};
use crate::error::{Error, Result};

/// Dense operator on a single truncated mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    matrix: Array2<Complex64>,
    cutoff: FockCutoff,
}

impl ModeOperator {
    pub fn from_matrix(matrix: Array2<Complex64>, cutoff: FockCutoff) -> Result<Self> {
        let dim = cutoff.dim();
        if matrix.dim() != (dim, dim) {
            return Err(Error::InvalidArgument(format!(
                "matrix of shape {:?} does not match cutoff dimension {dim}",
                matrix.dim()
            )));
        }
        Ok(Self { matrix, cutoff })
    }

    pub(crate) fn from_raw(matrix: Array2<Complex64>, cutoff: FockCutoff) -> Self {
        debug_assert_eq!(matrix.dim(), (cutoff.dim(), cutoff.dim()));
        Self { matrix, cutoff }
    }

    pub fn identity(cutoff: FockCutoff) -> Self {
        Self::from_raw(Array2::eye(cutoff.dim()), cutoff)
    }

    pub fn diagonal(
        values: impl IntoIterator<Item = Complex64>,
        cutoff: FockCutoff,
    ) -> Result<Self> {
        let diag: Array1<Complex64> = values.into_iter().collect();
        if diag.len() != cutoff.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} diagonal entries for dimension {}",
                diag.len(),
                cutoff.dim()
            )));
        }
        Ok(Self::from_raw(Array2::from_diag(&diag), cutoff))
    }

    /// `â†â`, i.e. `diag(0, 1, …, n_max)`.
    pub fn number(cutoff: FockCutoff) -> Self {
        let diag: Array1<Complex64> = (0..cutoff.dim())
            .map(|n| Complex64::new(n as f64, 0.0))
            .collect();
        Self::from_raw(Array2::from_diag(&diag), cutoff)
    }

    /// Truncated annihilation operator, `â|n⟩ = √n |n−1⟩`.
    pub fn annihilation(cutoff: FockCutoff) -> Self {
        let dim = cutoff.dim();
        let mut m = Array2::zeros((dim, dim));
        for n in 1..dim {
            m[[n - 1, n]] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Self::from_raw(m, cutoff)
    }

    /// Truncated creation operator, `â†|n⟩ = √(n+1) |n+1⟩`.
    pub fn creation(cutoff: FockCutoff) -> Self {
        Self::annihilation(cutoff).adjoint()
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    /// Matrix element `⟨m|Ô|n⟩`.
    pub fn element(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[[m, n]]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_raw(self.matrix.t().mapv(|z| z.conj()), self.cutoff)
    }

    pub fn compose(&self, rhs: &ModeOperator) -> Result<Self> {
        self.cutoff.ensure_same(rhs.cutoff)?;
        Ok(Self::from_raw(self.matrix.dot(&rhs.matrix), self.cutoff))
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.cutoff.ensure_same(state.cutoff())?;
        Ok(StateVector::from_raw(
            self.apply_slice(state.amplitudes()),
            self.cutoff,
        ))
    }

    pub(crate) fn apply_slice(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_raw(self.matrix.mapv(|z| z * factor), self.cutoff)
    }

    /// Largest elementwise modulus of `self − other` over the leading `block × block` entries.
    pub fn max_abs_diff_block(&self, other: &ModeOperator, block: usize) -> Result<f64> {
        self.cutoff.ensure_same(other.cutoff)?;
        let block = block.min(self.cutoff.dim());
        let mut worst: f64 = 0.0;
        for m in 0..block {
            for n in 0..block {
                worst = worst.max((self.matrix[[m, n]] - other.matrix[[m, n]]).norm());
            }
        }
        Ok(worst)
    }

    pub fn max_abs_diff(&self, other: &ModeOperator) -> Result<f64> {
        self.max_abs_diff_block(other, self.cutoff.dim())
    }

    /// `max |Ô − Ô†|` elementwise.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.cutoff.dim();
        let mut worst: f64 = 0.0;
        for m in 0..dim {
            for n in m..dim {
                worst = worst.max((self.matrix[[m, n]] - self.matrix[[n, m]].conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        self.matrix
            .indexed_iter()
            .filter(|((m, n), _)| m != n)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}
