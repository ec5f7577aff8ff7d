use std::f64::consts::PI;

use cvtele_core::fock::{coherent_state, displacement_matrix, number_state};
use cvtele_core::teleport::{
    beta_density, end_to_end_projection, epr_state, single_photon_density,
    single_photon_output_closed_form, teleport_output, transfer_operator,
    vacuum_output_closed_form,
};
use cvtele_core::{Complex64, EntanglementParam, FockCutoff, MeasurementOutcome, ModeOperator};
use proptest::prelude::*;

fn q(v: f64) -> EntanglementParam {
    EntanglementParam::new(v).unwrap()
}

fn k(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

fn m(re: f64, im: f64) -> MeasurementOutcome {
    MeasurementOutcome::new(re, im)
}

#[test]
fn projection_agrees_with_transfer_operator_on_small_grid() {
    let cut = k(24);
    let inputs = [
        number_state(0, cut).unwrap(),
        number_state(1, cut).unwrap(),
        coherent_state(Complex64::new(0.3, -0.2), cut).unwrap(),
    ];
    for qv in [0.0, 0.4] {
        for beta in [m(0.0, 0.0), m(0.5, 0.5), m(-0.9, 0.1)] {
            for input in &inputs {
                let direct = teleport_output(input, q(qv), beta);
                let projected = end_to_end_projection(input, q(qv), beta, cut).unwrap();
                assert!(direct.max_abs_diff(&projected).unwrap() < 1e-10);
            }
        }
    }
}

#[test]
fn closed_form_outputs_match_operator_path() {
    let cut = k(40);
    for qv in [0.0, 0.3, 0.7] {
        for beta in [m(0.0, 0.0), m(1.0, -0.5), m(-1.5, 1.2)] {
            let one = teleport_output(&number_state(1, cut).unwrap(), q(qv), beta);
            let one_cf = single_photon_output_closed_form(q(qv), beta, cut);
            assert!(one.max_abs_diff(&one_cf).unwrap() < 1e-12);
            let zero = teleport_output(&number_state(0, cut).unwrap(), q(qv), beta);
            let zero_cf = vacuum_output_closed_form(q(qv), beta, cut);
            assert!(zero.max_abs_diff(&zero_cf).unwrap() < 1e-12);
        }
    }
}

#[test]
fn coherent_density_is_shifted_gaussian() {
    let cut = k(48);
    let alpha = Complex64::new(0.5, 0.25);
    let input = coherent_state(alpha, cut).unwrap();
    for qv in [0.2, 0.6] {
        let a = 1.0 - qv * qv;
        for beta in [m(0.0, 0.0), m(1.0, 0.0), m(-0.7, 1.1)] {
            let got = beta_density(&input, q(qv), beta);
            let want = a / PI * (-a * (alpha - beta.beta()).norm_sqr()).exp();
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "{got} {want}");
        }
    }
}

#[test]
fn displacement_shifts_annihilation() {
    // D(β)† a D(β) = a + β on the well-resolved block
    let cut = k(48);
    let beta = Complex64::new(0.6, -0.8);
    let d = displacement_matrix(beta, cut);
    let a = ModeOperator::annihilation(cut);
    let lhs = d.adjoint().compose(&a).unwrap().compose(&d).unwrap();
    let rhs_diag = ModeOperator::diagonal(vec![beta; cut.dim()], cut).unwrap();
    let mut rhs = a.matrix().clone();
    rhs += rhs_diag.matrix();
    let rhs = ModeOperator::from_matrix(rhs, cut).unwrap();
    assert!(lhs.max_abs_diff_block(&rhs, 16).unwrap() < 1e-10);
}

#[test]
fn transfer_operator_at_origin_is_diagonal_geometric() {
    let cut = k(16);
    for qv in [0.0, 0.5, 0.9] {
        let t = transfer_operator(q(qv), m(0.0, 0.0), cut);
        assert_eq!(t.off_diagonal_max(), 0.0);
        let pref = ((1.0 - qv * qv) / PI).sqrt();
        for n in 0..cut.dim() {
            let want = pref * qv.powi(n as i32);
            assert!((t.element(n, n).re - want).abs() < 1e-15);
        }
    }
}

#[test]
fn epr_state_tail_shrinks_with_cutoff() {
    let small = 1.0 - epr_state(q(0.82), k(24)).norm_sqr();
    let large = 1.0 - epr_state(q(0.82), k(48)).norm_sqr();
    let exact = 0.82f64.powi(2 * 49);
    assert!((large - exact).abs() < 1e-14);
    assert!(small > large);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transfer_operator_is_hermitian(qv in 0.0..0.95f64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let t = transfer_operator(q(qv), m(re, im), k(20));
        prop_assert!(t.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn operator_and_fast_path_densities_agree(qv in 0.0..0.9f64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let cut = k(64);
        let beta = m(re, im);
        // unit-modulus phase keeps the state off the exact |1⟩ fast path
        let phased = number_state(1, cut).unwrap().scaled(Complex64::new(0.0, 1.0));
        let generic = teleport_output(&phased, q(qv), beta).norm_sqr();
        let closed = single_photon_density(q(qv), beta);
        prop_assert!((generic - closed).abs() <= 1e-9 * closed.max(1e-300));
        prop_assert!(generic >= 0.0);
    }
}
