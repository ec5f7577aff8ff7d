//! Transfer-operator description of continuous-variable teleportation.
//!
//! Alice mixes the input mode `A` with the reference beam `R` of the shared
//! two-mode squeezed state `|q⟩_{R,B}` and measures `β = x₋ + i y₊`; Bob
//! displaces his beam `B` by `β`. The whole protocol acts on the input as
//!
//! ```text
//! |ψ_out(β)⟩ = T_q(β)|ψ⟩,   T_q(β) = √((1−q²)/π) D(β) q^{n̂} D(−β)
//! ```
//!
//! and `‖T_q(β)|ψ⟩‖²` is the probability density of the measurement result.
//! [`end_to_end_projection`] builds the same output from the three-mode
//! state directly and serves as the oracle for [`teleport_output`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    displacement_block, displacement_matrix, tensor_product, FockCutoff, ModeOperator,
    MultiModeState, StateVector,
};

/// Densities whose Gaussian envelope `e^{−(1−q²)|β|²}` falls below this are returned as 0.
pub const DENSITY_UNDERFLOW: f64 = 1e-300;

/// EPR norm defect `1 − ‖|q⟩‖²` tolerated by [`end_to_end_projection`] without a warning.
pub const EPR_NORM_DEFECT_LIMIT: f64 = 1e-10;

/// Intermediate levels `k` are dropped once `q^k` falls below this.
pub const INTERMEDIATE_DAMPING: f64 = 1e-16;
/// Extra `√n` headroom above `|β| + √n_in` for the support of `D(−β)|ψ⟩`.
const INTERMEDIATE_HEADROOM: f64 = 6.0;

/// Degree of two-mode squeezing of the shared EPR beams, `0 ≤ q < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntanglementParam(f64);

impl EntanglementParam {
    /// Rejects `q ≥ 1` (maximal entanglement needs infinite energy) and anything non-finite.
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && (0.0..1.0).contains(&q) {
            Ok(Self(q))
        } else {
            Err(Error::InvalidEntanglement(q))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 − q²`
    #[inline]
    pub fn one_minus_q_sq(self) -> f64 {
        1.0 - self.0 * self.0
    }

    /// `√((1−q²)/π)`
    #[inline]
    pub fn prefactor(self) -> f64 {
        (self.one_minus_q_sq() / PI).sqrt()
    }
}

impl std::fmt::Display for EntanglementParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::str::FromStr for EntanglementParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number")))?;
        Self::new(v)
    }
}

impl TryFrom<f64> for EntanglementParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

/// Joint homodyne result `β = x₋ + i y₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    x_minus: f64,
    y_plus: f64,
}

impl MeasurementOutcome {
    pub fn new(x_minus: f64, y_plus: f64) -> Self {
        Self { x_minus, y_plus }
    }

    pub fn from_beta(beta: Complex64) -> Self {
        Self::new(beta.re, beta.im)
    }

    #[inline]
    pub fn beta(self) -> Complex64 {
        Complex64::new(self.x_minus, self.y_plus)
    }

    pub fn x_minus(self) -> f64 {
        self.x_minus
    }

    pub fn y_plus(self) -> f64 {
        self.y_plus
    }
}

impl From<Complex64> for MeasurementOutcome {
    fn from(beta: Complex64) -> Self {
        Self::from_beta(beta)
    }
}

/// Label of Alice's input mode.
pub const MODE_A: &str = "A";
/// Label of the reference EPR beam.
pub const MODE_R: &str = "R";
/// Label of Bob's EPR beam.
pub const MODE_B: &str = "B";

/// `|q⟩_{R,B} = √(1−q²) Σ qⁿ |n⟩_R |n⟩_B`, truncated at the cutoff.
pub fn epr_state(q: EntanglementParam, cutoff: FockCutoff) -> MultiModeState {
    let mut s =
        MultiModeState::zeros(vec![MODE_R.into(), MODE_B.into()], cutoff).expect("distinct labels");
    let norm = q.one_minus_q_sq().sqrt();
    let t = s.tensor_mut();
    for n in 0..cutoff.dim() {
        t[[n, n].as_slice()] = Complex64::new(norm * q.value().powi(n as i32), 0.0);
    }
    s
}

/// Eigenstate `|β⟩_{A,R} = (1/√π) Σ D_A(β)|n⟩_A|n⟩_R` of the joint measurement
/// (continuum-normalized, so not unit norm).
pub fn measurement_eigenstate(beta: MeasurementOutcome, cutoff: FockCutoff) -> MultiModeState {
    let d = displacement_matrix(beta.beta(), cutoff);
    let mut s =
        MultiModeState::zeros(vec![MODE_A.into(), MODE_R.into()], cutoff).expect("distinct labels");
    let scale = PI.sqrt().recip();
    let t = s.tensor_mut();
    // component (a, r) = ⟨a|D(β)|r⟩/√π
    for a in 0..cutoff.dim() {
        for r in 0..cutoff.dim() {
            t[[a, r].as_slice()] = d.element(a, r) * scale;
        }
    }
    s
}

fn q_powers(q: EntanglementParam, cutoff: FockCutoff) -> Vec<f64> {
    (0..cutoff.dim())
        .map(|n| q.value().powi(n as i32))
        .collect()
}

/// Dense `T_q(β) = √((1−q²)/π) D(β) diag(qⁿ) D(−β)`.
pub fn transfer_operator(
    q: EntanglementParam,
    beta: MeasurementOutcome,
    cutoff: FockCutoff,
) -> ModeOperator {
    let b = beta.beta();
    let weights = q_powers(q, cutoff);
    let pref = q.prefactor();
    if b == Complex64::default() {
        return ModeOperator::diagonal(
            weights.iter().map(|w| Complex64::new(pref * w, 0.0)),
            cutoff,
        )
        .expect("dimension matches");
    }
    let fwd = displacement_matrix(b, cutoff);
    let back = displacement_matrix(-b, cutoff);
    let mut middle = fwd.matrix().clone();
    for (mut col, w) in middle.columns_mut().into_iter().zip(&weights) {
        col.mapv_inplace(|z| z * (pref * w));
    }
    ModeOperator::from_raw(middle.dot(back.matrix()), cutoff)
}

/// `T_q(β)|ψ⟩`, unnormalized; its squared norm is the density of `β`.
pub fn teleport_output(
    input: &StateVector,
    q: EntanglementParam,
    beta: MeasurementOutcome,
) -> StateVector {
    let cutoff = input.cutoff();
    let b = beta.beta();
    let pref = q.prefactor();
    let weights = q_powers(q, cutoff);
    let out = if b == Complex64::default() {
        input
            .amplitudes()
            .iter()
            .zip(&weights)
            .map(|(a, w)| a * (pref * w))
            .collect()
    } else {
        let mut v = displacement_matrix(-b, cutoff).apply_slice(input.amplitudes());
        for (a, w) in v.iter_mut().zip(&weights) {
            *a *= pref * w;
        }
        displacement_matrix(b, cutoff).apply_slice(&v)
    };
    StateVector::from_raw(out, cutoff).checked("teleport_output")
}

/// Number of intermediate levels needed to resolve `q^{n̂} D(−β)|ψ⟩` for an
/// input supported on `0..=top`: enough to hold `D(−β)|ψ⟩`, but no more than
/// the point where `q^k` is negligible.
fn intermediate_levels(q: EntanglementParam, beta: Complex64, top: usize, floor: usize) -> usize {
    let reach = beta.norm() + (top as f64).sqrt() + INTERMEDIATE_HEADROOM;
    let spread = reach * reach;
    let damped = if q.value() == 0.0 {
        0.0
    } else {
        INTERMEDIATE_DAMPING.ln() / q.value().ln()
    };
    floor.max(spread.min(damped).ceil() as usize)
}

fn support_top(input: &StateVector) -> usize {
    input
        .amplitudes()
        .iter()
        .rposition(|a| *a != Complex64::default())
        .unwrap_or(0)
}

/// `q^k ⟨k|D(−β)|ψ⟩` for `k < block.ncols()`, with `block = ⟨j|D(β)|k⟩`.
fn damped_intermediate(
    input: &[Complex64],
    q: EntanglementParam,
    block: &ndarray::Array2<Complex64>,
) -> Vec<Complex64> {
    let mut weight = 1.0;
    (0..block.ncols())
        .map(|k| {
            // ⟨k|D(−β)|j⟩ = ⟨j|D(β)|k⟩*
            let v: Complex64 = input
                .iter()
                .enumerate()
                .map(|(j, a)| block[[j, k]].conj() * a)
                .sum();
            let out = v * weight;
            weight *= q.value();
            out
        })
        .collect()
}

/// `T_q(β)|ψ⟩` on the levels of `output_cutoff`, with the intermediate sum in
/// `D(β) q^{n̂} D(−β)` carried past the cutoff until it has converged.
///
/// [`teleport_output`] multiplies truncated matrices, which loses accuracy
/// once `D(−β)|ψ⟩` spills over the cutoff while `q^{n_max}` is not yet small
/// (large `|β|` with strong entanglement). The retained levels here are
/// accurate regardless; only mass above `output_cutoff` is absent.
///
/// Does not log truncation; callers summing many outputs check the total.
pub fn converged_output(
    input: &StateVector,
    q: EntanglementParam,
    beta: MeasurementOutcome,
    output_cutoff: FockCutoff,
) -> StateVector {
    let b = beta.beta();
    let top = support_top(input);
    let levels = intermediate_levels(q, b, top, output_cutoff.n_max().max(top)) + 1;
    let rows = output_cutoff.dim().max(top + 1);
    let block = displacement_block(b, rows, levels);
    let v = damped_intermediate(&input.amplitudes()[..=top], q, &block);
    let pref = q.prefactor();
    let out = (0..output_cutoff.dim())
        .map(|n| {
            let z: Complex64 = v.iter().enumerate().map(|(k, vk)| block[[n, k]] * vk).sum();
            z * pref
        })
        .collect();
    StateVector::from_raw(out, output_cutoff)
}

/// Teleported single photon in closed form,
/// `√((1−q²)/π) e^{−(1−q²)|β|²/2} D((1−q)β) ((1−q²)β*|0⟩ + q|1⟩)`.
pub fn single_photon_output_closed_form(
    q: EntanglementParam,
    beta: MeasurementOutcome,
    cutoff: FockCutoff,
) -> StateVector {
    let b = beta.beta();
    let qv = q.value();
    let a = q.one_minus_q_sq();
    let amp = q.prefactor() * (-a * b.norm_sqr() / 2.0).exp();
    let c0 = b.conj() * (a * amp);
    let c1 = Complex64::new(qv * amp, 0.0);
    let d = displacement_matrix(b * (1.0 - qv), cutoff);
    let out = (0..cutoff.dim())
        .map(|n| d.element(n, 0) * c0 + d.element(n, 1) * c1)
        .collect();
    StateVector::from_raw(out, cutoff).checked("single_photon_output_closed_form")
}

/// Teleported vacuum in closed form, `√((1−q²)/π) e^{−(1−q²)|β|²/2} D((1−q)β)|0⟩`.
pub fn vacuum_output_closed_form(
    q: EntanglementParam,
    beta: MeasurementOutcome,
    cutoff: FockCutoff,
) -> StateVector {
    let b = beta.beta();
    let amp = q.prefactor() * (-q.one_minus_q_sq() * b.norm_sqr() / 2.0).exp();
    let d = displacement_matrix(b * (1.0 - q.value()), cutoff);
    let out = (0..cutoff.dim()).map(|n| d.element(n, 0) * amp).collect();
    StateVector::from_raw(out, cutoff).checked("vacuum_output_closed_form")
}

fn underflows(q: EntanglementParam, beta: Complex64) -> bool {
    let exponent = -q.one_minus_q_sq() * beta.norm_sqr();
    if exponent < DENSITY_UNDERFLOW.ln() {
        log::warn!(
            "density at |β| = {:.3} underflows for q = {}; returning 0",
            beta.norm(),
            q.value()
        );
        true
    } else {
        false
    }
}

/// Single-photon density `P_q(β) = ((1−q²)/π) e^{−(1−q²)|β|²} ((1−q²)²|β|² + q²)`.
pub fn single_photon_density(q: EntanglementParam, beta: MeasurementOutcome) -> f64 {
    let b = beta.beta();
    if underflows(q, b) {
        return 0.0;
    }
    let a = q.one_minus_q_sq();
    let r2 = b.norm_sqr();
    let qv = q.value();
    a / PI * (-a * r2).exp() * (a * a * r2 + qv * qv)
}

/// Probability density `‖T_q(β)|ψ⟩‖²` of measuring `β` for the given input.
///
/// The single-photon input `|1⟩` takes the closed-form path; other inputs
/// sum the damped intermediate levels without truncating at the cutoff.
pub fn beta_density(input: &StateVector, q: EntanglementParam, beta: MeasurementOutcome) -> f64 {
    if input.is_number_state(1) {
        return single_photon_density(q, beta);
    }
    if underflows(q, beta.beta()) {
        return 0.0;
    }
    // D(β) is unitary, so ‖T_q(β)ψ‖² = ((1−q²)/π) Σ_k q^{2k} |⟨k|D(−β)|ψ⟩|²
    let b = beta.beta();
    let top = support_top(input);
    let levels = intermediate_levels(q, b, top, top) + 1;
    let block = displacement_block(b, top + 1, levels);
    let v = damped_intermediate(&input.amplitudes()[..=top], q, &block);
    q.one_minus_q_sq() / PI * v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Bob's output built from the full three-mode state: project
/// `|ψ⟩_A |q⟩_{R,B}` onto `⟨β|_{A,R}`, then displace `B` by `β`.
///
/// Independent of [`transfer_operator`]; used to check it.
pub fn end_to_end_projection(
    input: &StateVector,
    q: EntanglementParam,
    beta: MeasurementOutcome,
    cutoff: FockCutoff,
) -> Result<StateVector> {
    cutoff.ensure_same(input.cutoff())?;
    let epr = epr_state(q, cutoff);
    let defect = 1.0 - epr.norm_sqr();
    if defect > EPR_NORM_DEFECT_LIMIT {
        log::warn!(
            "EPR state at n_max = {cutoff} misses {defect:.3e} of its norm (q = {})",
            q.value()
        );
    }
    let joint = tensor_product([(MODE_A, input.clone())])?.outer(&epr)?;
    let bob = joint.project_onto(&measurement_eigenstate(beta, cutoff))?;
    let bob = bob.apply_to_mode(&displacement_matrix(beta.beta(), cutoff), MODE_B)?;
    Ok(bob.into_single_mode()?.checked("end_to_end_projection"))
}
