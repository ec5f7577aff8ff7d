//! Teleportation of a polarization qubit carried by one photon in the
//! modes `H` and `V`, each teleported by its own transfer operator.

use num_complex::Complex64;

use crate::error::Result;
use crate::fock::{number_state, tensor_product, FockCutoff, MultiModeState};
use crate::statistics::{photon_statistics_quadrature, QuadratureGrid};
use crate::teleport::{
    single_photon_output_closed_form, transfer_operator, vacuum_output_closed_form,
    EntanglementParam, MeasurementOutcome,
};

pub const MODE_H: &str = "H";
pub const MODE_V: &str = "V";

/// Measured amplitudes `(β_H, β_V)` of the two polarization teleporters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualModeMeasurement {
    pub beta_h: Complex64,
    pub beta_v: Complex64,
}

impl DualModeMeasurement {
    pub fn new(beta_h: Complex64, beta_v: Complex64) -> Self {
        Self { beta_h, beta_v }
    }
}

impl Default for DualModeMeasurement {
    fn default() -> Self {
        Self::new(Complex64::default(), Complex64::default())
    }
}

/// Error budget for teleporting an `H` photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationOutcomeBudget {
    /// One photon, correct polarization.
    pub p_trans: f64,
    /// One photon, flipped polarization.
    pub p_flip: f64,
    /// No photon.
    pub p_zero: f64,
    /// More than one photon.
    pub p_multi: f64,
}

impl PolarizationOutcomeBudget {
    pub fn sum(&self) -> f64 {
        self.p_trans + self.p_flip + self.p_zero + self.p_multi
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_trans, self.p_flip, self.p_zero, self.p_multi]
    }
}

/// Applies `T_{Hq}(β_H) ⊗ T_{Vq}(β_V)` to an arbitrary `(H, V)` state.
pub fn teleport_polarized(
    input: &MultiModeState,
    q: EntanglementParam,
    meas: DualModeMeasurement,
) -> Result<MultiModeState> {
    let cutoff = input.cutoff();
    let th = transfer_operator(q, MeasurementOutcome::from_beta(meas.beta_h), cutoff);
    let tv = transfer_operator(q, MeasurementOutcome::from_beta(meas.beta_v), cutoff);
    input.apply_to_mode(&th, MODE_H)?.apply_to_mode(&tv, MODE_V)
}

/// Unnormalized two-mode output for the input `|1⟩_H|0⟩_V`.
pub fn polarized_output(
    q: EntanglementParam,
    meas: DualModeMeasurement,
    cutoff: FockCutoff,
) -> Result<MultiModeState> {
    let input = tensor_product([
        (MODE_H, number_state(1, cutoff)?),
        (MODE_V, number_state(0, cutoff)?),
    ])?;
    teleport_polarized(&input, q, meas)
}

/// Product of the closed-form single-photon (`H`) and vacuum (`V`) outputs.
pub fn polarized_output_closed_form(
    q: EntanglementParam,
    meas: DualModeMeasurement,
    cutoff: FockCutoff,
) -> Result<MultiModeState> {
    let h = single_photon_output_closed_form(q, MeasurementOutcome::from_beta(meas.beta_h), cutoff);
    let v = vacuum_output_closed_form(q, MeasurementOutcome::from_beta(meas.beta_v), cutoff);
    tensor_product([(MODE_H, h), (MODE_V, v)])
}

/// Closed-form budget:
///
/// ```text
/// p_trans = ((1+q)/2)² (1+q²)/2
/// p_flip  = ((1+q)/2)² ((1−q)/2)²
/// p_zero  = ((1+q)/2)² (1−q)/2
/// p_multi = 1 − ((1+q)/2)² (5 − 4q + 3q²)/4
/// ```
pub fn polarization_budget(q: EntanglementParam) -> PolarizationOutcomeBudget {
    let qv = q.value();
    let up2 = ((1.0 + qv) / 2.0).powi(2);
    PolarizationOutcomeBudget {
        p_trans: up2 * (1.0 + qv * qv) / 2.0,
        p_flip: up2 * ((1.0 - qv) / 2.0).powi(2),
        p_zero: up2 * (1.0 - qv) / 2.0,
        p_multi: 1.0 - up2 * (5.0 - 4.0 * qv + 3.0 * qv * qv) / 4.0,
    }
}

/// Single-mode transfer probabilities `∫ |⟨m|T_q(β)|n⟩|² d²β` for `m, n ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferIntegrals {
    /// `|1⟩ → |1⟩`
    pub one_to_one: f64,
    /// `|0⟩ → |0⟩`, the vacuum (coherent-state) fidelity
    pub zero_to_zero: f64,
    /// `|1⟩ → |0⟩`
    pub one_to_zero: f64,
    /// `|0⟩ → |1⟩`
    pub zero_to_one: f64,
}

pub fn transfer_integrals(
    q: EntanglementParam,
    cutoff: FockCutoff,
    grid: &QuadratureGrid,
) -> Result<TransferIntegrals> {
    let one = photon_statistics_quadrature(&number_state(1, cutoff)?, q, grid)?;
    let zero = photon_statistics_quadrature(&number_state(0, cutoff)?, q, grid)?;
    Ok(TransferIntegrals {
        one_to_one: one.probability(1),
        zero_to_zero: zero.probability(0),
        one_to_zero: one.probability(0),
        zero_to_one: zero.probability(1),
    })
}

/// Budget assembled from numerically integrated single-mode factors;
/// `p_multi` is the complement.
pub fn polarization_budget_numerical(
    q: EntanglementParam,
    cutoff: FockCutoff,
    grid: &QuadratureGrid,
) -> Result<PolarizationOutcomeBudget> {
    let t = transfer_integrals(q, cutoff, grid)?;
    let p_trans = t.one_to_one * t.zero_to_zero;
    let p_flip = t.one_to_zero * t.zero_to_one;
    let p_zero = t.one_to_zero * t.zero_to_zero;
    Ok(PolarizationOutcomeBudget {
        p_trans,
        p_flip,
        p_zero,
        p_multi: 1.0 - p_trans - p_flip - p_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::{loss_gain_split, photon_statistics_closed_form};
    use crate::teleport::teleport_output;
    use std::f64::consts::PI;

    fn q(v: f64) -> EntanglementParam {
        EntanglementParam::new(v).unwrap()
    }

    fn k(n: usize) -> FockCutoff {
        FockCutoff::new(n).unwrap()
    }

    #[test]
    fn output_at_origin() {
        for qv in [0.0, 0.4, 0.8] {
            let out = polarized_output(q(qv), DualModeMeasurement::default(), k(8)).unwrap();
            let a = (1.0 - qv * qv) / PI;
            let expected = a.sqrt() * qv * a.sqrt();
            assert!((out.amplitude(&[1, 0]).re - expected).abs() < 1e-16);
            assert!((out.norm_sqr() - expected * expected).abs() < 1e-16);
        }
    }

    #[test]
    fn output_is_product_of_single_mode_outputs() {
        let cut = k(32);
        let meas = DualModeMeasurement::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5));
        let generic = polarized_output(q(0.5), meas, cut).unwrap();
        let h = teleport_output(
            &number_state(1, cut).unwrap(),
            q(0.5),
            MeasurementOutcome::from_beta(meas.beta_h),
        );
        let v = teleport_output(
            &number_state(0, cut).unwrap(),
            q(0.5),
            MeasurementOutcome::from_beta(meas.beta_v),
        );
        let product = tensor_product([(MODE_H, h), (MODE_V, v)]).unwrap();
        assert!(generic.max_abs_diff(&product).unwrap() < 1e-10);
        let closed = polarized_output_closed_form(q(0.5), meas, cut).unwrap();
        assert!(generic.max_abs_diff(&closed).unwrap() < 1e-10);
    }

    #[test]
    fn budget_examples() {
        let b = polarization_budget(q(0.5));
        let expect = [0.3515625, 0.03515625, 0.140625, 0.47265625];
        for (v, e) in b.as_array().iter().zip(expect) {
            assert!((v - e).abs() < 1e-15);
        }
        let t7 = polarization_budget(q(0.7)).p_trans;
        assert!(t7 > 0.5 && (t7 - 0.538).abs() < 5e-4);
        let t8 = polarization_budget(q(0.8)).p_trans;
        assert!((t8 - 0.664).abs() < 5e-4);
        assert!((polarization_budget(q(0.0)).p_flip - 0.0625).abs() < 1e-16);
    }

    #[test]
    fn budget_factorizes() {
        for i in 0..100 {
            let qv = i as f64 / 100.0;
            let b = polarization_budget(q(qv));
            let split = loss_gain_split(q(qv));
            let vac = (1.0 + qv) / 2.0;
            assert!((b.p_trans - split.p_success * vac).abs() < 1e-15);
            assert!((b.p_flip - split.p_loss.powi(2)).abs() < 1e-15);
            assert!((b.p_zero - split.p_loss * vac).abs() < 1e-15);
            assert!((b.sum() - 1.0).abs() < 1e-12);
            assert!((photon_statistics_closed_form(q(qv), 0) - split.p_loss).abs() < 1e-15);
        }
    }

    #[test]
    fn superposition_input_through_generic_path() {
        let cut = k(24);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut input = MultiModeState::zeros(vec![MODE_H.into(), MODE_V.into()], cut).unwrap();
        input.tensor_mut()[[1, 0].as_slice()] = Complex64::new(s, 0.0);
        input.tensor_mut()[[0, 1].as_slice()] = Complex64::new(0.0, s);
        let meas = DualModeMeasurement::new(Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4));
        let out = teleport_polarized(&input, q(0.6), meas).unwrap();
        // linearity: superposition of the two basis outputs
        let h_in = tensor_product([
            (MODE_H, number_state(1, cut).unwrap()),
            (MODE_V, number_state(0, cut).unwrap()),
        ])
        .unwrap();
        let v_in = tensor_product([
            (MODE_H, number_state(0, cut).unwrap()),
            (MODE_V, number_state(1, cut).unwrap()),
        ])
        .unwrap();
        let oh = teleport_polarized(&h_in, q(0.6), meas).unwrap();
        let ov = teleport_polarized(&v_in, q(0.6), meas).unwrap();
        let mut expect = oh.clone();
        for ((e, a), b) in expect
            .tensor_mut()
            .iter_mut()
            .zip(oh.tensor().iter())
            .zip(ov.tensor().iter())
        {
            *e = a * s + b * Complex64::new(0.0, s);
        }
        assert!(out.max_abs_diff(&expect).unwrap() < 1e-14);
    }
}
