use cvtele_core::fock::{coherent_state, number_state};
use cvtele_core::statistics::{
    conditional_beta_density, crossing_radius, loss_gain_split, photon_statistics_closed_form,
    photon_statistics_quadrature, q_to_squeezing_db, squeezing_db_to_q, sweep_q, QuadratureCheck,
    SweepQuantity,
};
use cvtele_core::teleport::single_photon_density;
use cvtele_core::{
    Complex64, EntanglementParam, Error, FockCutoff, MeasurementOutcome, PhotonCategory,
    QuadratureGrid, RangeSpec,
};
use proptest::prelude::*;

fn q(v: f64) -> EntanglementParam {
    EntanglementParam::new(v).unwrap()
}

fn k(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

#[test]
fn quadrature_reproduces_closed_form_distribution() {
    for qv in [0.2, 0.5, 0.8] {
        let dist = photon_statistics_quadrature(
            &number_state(1, k(32)).unwrap(),
            q(qv),
            &QuadratureGrid::for_q(q(qv)),
        )
        .unwrap();
        for n in 0..=6 {
            let err = (dist.probability(n) - photon_statistics_closed_form(q(qv), n)).abs();
            assert!(err < 1e-6, "q={qv} n={n} err={err:e}");
        }
        assert!((dist.total() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn closed_form_values_at_half() {
    let want = [0.1875, 0.46875, 0.22265625, 0.08203125];
    for (n, w) in want.iter().enumerate() {
        assert!((photon_statistics_closed_form(q(0.5), n) - w).abs() < 1e-15);
    }
    let s = loss_gain_split(q(0.5));
    assert!((s.p_loss - 0.1875).abs() < 1e-12);
    assert!((s.p_success - 0.46875).abs() < 1e-12);
    assert!((s.p_gain - 0.34375).abs() < 1e-12);
}

#[test]
fn closed_form_distribution_sums_to_split() {
    for qv in [0.0, 0.3, 0.9] {
        let s = loss_gain_split(q(qv));
        let gain: f64 = (2..2000)
            .map(|n| photon_statistics_closed_form(q(qv), n))
            .sum();
        assert!((gain - s.p_gain).abs() < 1e-12, "q={qv}");
        assert!((s.sum() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn conditional_densities_integrate_to_split() {
    for qv in [0.0, 0.33, 0.5, 0.82] {
        let grid = QuadratureGrid::for_q(q(qv));
        let s = loss_gain_split(q(qv));
        let integral = |c| {
            grid.integrate_radial(|r| {
                conditional_beta_density(c, q(qv), MeasurementOutcome::new(r, 0.0))
            })
        };
        assert!((integral(PhotonCategory::Loss) - s.p_loss).abs() < 1e-9);
        assert!((integral(PhotonCategory::Success) - s.p_success).abs() < 1e-9);
        assert!((integral(PhotonCategory::Gain) - s.p_gain).abs() < 1e-9);
    }
}

#[test]
fn conditional_densities_match_operator_path() {
    let cut = k(48);
    let one = number_state(1, cut).unwrap();
    for qv in [0.2, 0.5, 0.8] {
        for r in [0.0, 0.4, 1.0, 2.3] {
            let beta = MeasurementOutcome::new(r * 0.6, r * 0.8);
            let out = cvtele_core::teleport::teleport_output(&one, q(qv), beta);
            let p = out.populations();
            let loss = conditional_beta_density(PhotonCategory::Loss, q(qv), beta);
            let success = conditional_beta_density(PhotonCategory::Success, q(qv), beta);
            let gain = conditional_beta_density(PhotonCategory::Gain, q(qv), beta);
            assert!((loss - p[0]).abs() < 1e-13);
            assert!((success - p[1]).abs() < 1e-13);
            assert!((gain - p[2..].iter().sum::<f64>()).abs() < 1e-12);
            assert!((loss + success + gain - single_photon_density(q(qv), beta)).abs() < 1e-15);
        }
    }
}

#[test]
fn vacuum_and_coherent_inputs_lose_nothing_to_normalization() {
    let cut = k(32);
    for input in [
        number_state(0, cut).unwrap(),
        coherent_state(Complex64::new(0.5, 0.0), cut).unwrap(),
    ] {
        let dist =
            photon_statistics_quadrature(&input, q(0.5), &QuadratureGrid::for_q(q(0.5))).unwrap();
        assert!((dist.total() - 1.0).abs() < 1e-9);
        assert!(dist.residual < 1e-9);
    }
}

#[test]
fn undersized_grid_is_rejected() {
    let grid = QuadratureGrid::new(32, 16, 4.0).unwrap();
    let r = photon_statistics_quadrature(&number_state(1, k(8)).unwrap(), q(0.5), &grid);
    assert!(matches!(r, Err(Error::GridMismatch { .. })));
}

#[test]
fn crossing_radius_values() {
    assert!((crossing_radius(q(0.5)).unwrap() - 1.070993638874729).abs() < 1e-12);
    assert!((crossing_radius(q(0.2)).unwrap() - 1.09676721569397).abs() < 1e-12);
    assert!((crossing_radius(q(1e-6)).unwrap() - 1.0706041381484487).abs() < 1e-5);
    assert!(matches!(
        crossing_radius(q(0.8)),
        Err(Error::NoCrossing { .. })
    ));
    assert!(crossing_radius(q(0.0)).is_err());
}

#[test]
fn squeezing_conversion() {
    assert!((squeezing_db_to_q(3.0).unwrap().value() - 0.33228).abs() < 5e-5);
    assert!((squeezing_db_to_q(10.0).unwrap().value() - 0.81818).abs() < 5e-5);
    assert!(squeezing_db_to_q(-1.0).is_err());
    assert!((q_to_squeezing_db(squeezing_db_to_q(6.5).unwrap()) - 6.5).abs() < 1e-12);
}

#[test]
fn sweep_with_quadrature_check_agrees() {
    let range: RangeSpec = "0.1:0.9:0.4".parse().unwrap();
    let table = sweep_q(
        SweepQuantity::LossGain,
        &range,
        Some(&QuadratureCheck::default()),
    )
    .unwrap();
    assert_eq!(table.rows.len(), 3);
    assert_eq!(table.columns.len(), 6);
    assert!(table.column("p_loss_quad").is_some());
    assert!(!table.any_disagreement());
}

#[test]
fn gain_exceeds_loss_across_sweep() {
    let range: RangeSpec = "0:0.99:0.01".parse().unwrap();
    let table = sweep_q(SweepQuantity::LossGain, &range, None).unwrap();
    let (l, g) = (
        table.column("p_loss").unwrap(),
        table.column("p_gain").unwrap(),
    );
    for row in &table.rows {
        assert!(row.values[g] >= row.values[l], "q={}", row.q);
    }
    let first = &table.rows[0].values;
    assert_eq!(first, &vec![0.25, 0.25, 0.5]);
}

proptest! {
    #[test]
    fn conditional_densities_are_nonnegative(qv in 0.0..0.99f64, r in 0.0..12.0f64) {
        for c in [PhotonCategory::Loss, PhotonCategory::Success, PhotonCategory::Gain] {
            prop_assert!(conditional_beta_density(c, q(qv), MeasurementOutcome::new(r, 0.0)) >= 0.0);
        }
    }

    #[test]
    fn split_is_normalized(qv in 0.0..0.999f64) {
        let s = loss_gain_split(q(qv));
        prop_assert!((s.sum() - 1.0).abs() < 1e-15);
        prop_assert!(s.p_gain >= s.p_loss);
    }
}
