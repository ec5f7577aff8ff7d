use ndarray::{ArrayD, Axis, IxDyn};
use num_complex::Complex64;

use super::{FockCutoff, ModeOperator, StateVector};
use crate::error::{Error, Result};

/// Pure state of several labeled modes sharing one cutoff.
///
/// Axis `i` of the amplitude tensor belongs to `labels()[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    labels: Vec<String>,
    amplitudes: ArrayD<Complex64>,
    cutoff: FockCutoff,
}

impl MultiModeState {
    /// Wraps a tensor of rank `labels.len()` with every axis of length `n_max + 1`.
    pub fn from_tensor(
        labels: Vec<String>,
        amplitudes: ArrayD<Complex64>,
        cutoff: FockCutoff,
    ) -> Result<Self> {
        check_unique(&labels)?;
        let shape = vec![cutoff.dim(); labels.len()];
        if amplitudes.shape() != shape.as_slice() {
            return Err(Error::InvalidArgument(format!(
                "tensor shape {:?} does not match {} modes of dimension {}",
                amplitudes.shape(),
                labels.len(),
                cutoff.dim()
            )));
        }
        Ok(Self {
            labels,
            amplitudes,
            cutoff,
        })
    }

    /// All-zero tensor over the given modes.
    pub fn zeros(labels: Vec<String>, cutoff: FockCutoff) -> Result<Self> {
        let shape = vec![cutoff.dim(); labels.len()];
        Self::from_tensor(labels, ArrayD::zeros(IxDyn(&shape)), cutoff)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn tensor(&self) -> &ArrayD<Complex64> {
        &self.amplitudes
    }

    pub fn tensor_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.amplitudes
    }

    pub fn num_modes(&self) -> usize {
        self.labels.len()
    }

    /// Amplitude at the Fock indices `idx` (one per mode, in label order).
    pub fn amplitude(&self, idx: &[usize]) -> Complex64 {
        self.amplitudes[IxDyn(idx)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn axis_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Applies `op` to the mode `label`, leaving the other axes untouched.
    pub fn apply_to_mode(&self, op: &ModeOperator, label: &str) -> Result<Self> {
        self.cutoff.ensure_same(op.cutoff())?;
        let axis = self.axis_of(label)?;
        let mut out = self.amplitudes.clone();
        let mut buf = Vec::with_capacity(self.cutoff.dim());
        for mut lane in out.lanes_mut(Axis(axis)) {
            buf.clear();
            buf.extend(lane.iter().copied());
            let new = op.apply_slice(&buf);
            for (dst, src) in lane.iter_mut().zip(new) {
                *dst = src;
            }
        }
        Ok(Self {
            labels: self.labels.clone(),
            amplitudes: out,
            cutoff: self.cutoff,
        })
    }

    /// Partial inner product `⟨bra| self⟩` over the modes of `bra`.
    ///
    /// The result lives on the remaining modes of `self`, in their original order.
    pub fn project_onto(&self, bra: &MultiModeState) -> Result<Self> {
        self.cutoff.ensure_same(bra.cutoff)?;
        let contracted: Vec<usize> = bra
            .labels
            .iter()
            .map(|l| self.axis_of(l))
            .collect::<Result<_>>()?;
        let kept: Vec<usize> = (0..self.num_modes())
            .filter(|a| !contracted.contains(a))
            .collect();
        if kept.is_empty() {
            return Err(Error::InvalidArgument(
                "projection would contract every mode; use `overlap`".into(),
            ));
        }
        let order: Vec<usize> = contracted.iter().chain(&kept).copied().collect();
        let dim = self.cutoff.dim();
        let bra_len = dim.pow(contracted.len() as u32);
        let rest_len = dim.pow(kept.len() as u32);
        let permuted = self
            .amplitudes
            .view()
            .permuted_axes(IxDyn(&order))
            .as_standard_layout()
            .into_owned();
        let flat = permuted
            .into_shape_with_order((bra_len, rest_len))
            .expect("standard layout reshape");
        let bra_flat: Vec<Complex64> = bra.amplitudes.iter().map(|z| z.conj()).collect();
        let mut out = vec![Complex64::default(); rest_len];
        for (i, b) in bra_flat.iter().enumerate() {
            if *b == Complex64::default() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(flat.row(i)) {
                *o += b * v;
            }
        }
        let labels = kept.iter().map(|&a| self.labels[a].clone()).collect();
        let tensor = ArrayD::from_shape_vec(IxDyn(&vec![dim; kept.len()]), out)
            .expect("shape matches length");
        Ok(Self {
            labels,
            amplitudes: tensor,
            cutoff: self.cutoff,
        })
    }

    /// Outer product `|self⟩ ⊗ |other⟩`; the labels of `other` follow those of `self`.
    pub fn outer(&self, other: &MultiModeState) -> Result<Self> {
        self.cutoff.ensure_same(other.cutoff)?;
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        let mut data = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in self.amplitudes.iter() {
            data.extend(other.amplitudes.iter().map(|b| a * b));
        }
        let shape = vec![self.cutoff.dim(); labels.len()];
        let tensor = ArrayD::from_shape_vec(IxDyn(&shape), data).expect("shape matches length");
        Ok(Self {
            labels,
            amplitudes: tensor,
            cutoff: self.cutoff,
        })
    }

    /// Lifts a single-mode state to a one-axis tensor.
    pub fn from_single_mode(label: impl Into<String>, state: &StateVector) -> Self {
        let dim = state.cutoff().dim();
        Self {
            labels: vec![label.into()],
            amplitudes: ArrayD::from_shape_vec(IxDyn(&[dim]), state.amplitudes().to_vec())
                .expect("shape matches length"),
            cutoff: state.cutoff(),
        }
    }

    /// Full overlap `⟨other|self⟩` over identical mode sets (label order may differ).
    pub fn overlap(&self, other: &MultiModeState) -> Result<Complex64> {
        self.cutoff.ensure_same(other.cutoff)?;
        if self.num_modes() != other.num_modes() {
            return Err(Error::InvalidArgument("mode sets differ".into()));
        }
        let order: Vec<usize> = other
            .labels
            .iter()
            .map(|l| self.axis_of(l))
            .collect::<Result<_>>()?;
        let aligned = self.amplitudes.view().permuted_axes(IxDyn(&order));
        Ok(aligned
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| b.conj() * a)
            .sum())
    }

    /// Collapses a one-mode tensor into a [`StateVector`].
    pub fn into_single_mode(self) -> Result<StateVector> {
        if self.num_modes() != 1 {
            return Err(Error::InvalidArgument(format!(
                "expected one mode, found {}",
                self.num_modes()
            )));
        }
        Ok(StateVector::from_raw(
            self.amplitudes.into_iter().collect(),
            self.cutoff,
        ))
    }

    /// Largest elementwise modulus of `self − other`; label order must agree.
    pub fn max_abs_diff(&self, other: &MultiModeState) -> Result<f64> {
        self.cutoff.ensure_same(other.cutoff)?;
        if self.labels != other.labels {
            return Err(Error::InvalidArgument("label order differs".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

fn check_unique(labels: &[String]) -> Result<()> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// Product state `⊗ᵢ |ψᵢ⟩` over labeled modes.
pub fn tensor_product<L: Into<String>>(
    states: impl IntoIterator<Item = (L, StateVector)>,
) -> Result<MultiModeState> {
    let mut labels = Vec::new();
    let mut factors: Vec<StateVector> = Vec::new();
    for (label, state) in states {
        let label = label.into();
        if let Some(first) = factors.first() {
            first.cutoff().ensure_same(state.cutoff())?;
        }
        if labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        labels.push(label);
        factors.push(state);
    }
    let Some(cutoff) = factors.first().map(StateVector::cutoff) else {
        return Err(Error::InvalidArgument(
            "tensor product of zero modes".into(),
        ));
    };
    let shape = vec![cutoff.dim(); factors.len()];
    let tensor = ArrayD::from_shape_fn(IxDyn(&shape), |idx| {
        factors
            .iter()
            .enumerate()
            .map(|(axis, f)| f.amplitudes()[idx[axis]])
            .product()
    });
    Ok(MultiModeState {
        labels,
        amplitudes: tensor,
        cutoff,
    })
}
