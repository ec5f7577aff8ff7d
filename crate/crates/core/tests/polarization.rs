use cvtele_core::polarization::{
    polarization_budget, polarization_budget_numerical, polarized_output, transfer_integrals,
};
use cvtele_core::{DualModeMeasurement, EntanglementParam, FockCutoff, QuadratureGrid};
use rayon::prelude::*;

fn q(v: f64) -> EntanglementParam {
    EntanglementParam::new(v).unwrap()
}

fn k(n: usize) -> FockCutoff {
    FockCutoff::new(n).unwrap()
}

#[test]
fn numerical_budget_matches_closed_form() {
    for qv in [0.33, 0.5, 0.82] {
        let num =
            polarization_budget_numerical(q(qv), k(32), &QuadratureGrid::for_q(q(qv))).unwrap();
        let closed = polarization_budget(q(qv));
        for (a, b) in num.as_array().iter().zip(closed.as_array()) {
            assert!((a - b).abs() < 1e-6, "q={qv}: {a} vs {b}");
        }
    }
}

#[test]
fn cross_transfers_are_symmetric() {
    // T_q(β) is hermitian, so |⟨1|T|0⟩| = |⟨0|T|1⟩| pointwise
    for qv in [0.1, 0.6, 0.9] {
        let t = transfer_integrals(q(qv), k(32), &QuadratureGrid::for_q(q(qv))).unwrap();
        assert!((t.one_to_zero - t.zero_to_one).abs() < 1e-8, "q={qv}");
        assert!((t.zero_to_zero - (1.0 + qv) / 2.0).abs() < 1e-8);
    }
}

#[test]
fn budget_trends_with_entanglement() {
    let qs: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
    let budgets: Vec<_> = qs.iter().map(|&v| polarization_budget(q(v))).collect();
    for w in budgets.windows(2) {
        assert!(w[1].p_trans > w[0].p_trans);
        assert!(w[1].p_multi < w[0].p_multi);
        assert!(w[1].p_flip < w[0].p_flip);
    }
    for (qv, b) in qs.iter().zip(&budgets).skip(1) {
        assert!(b.p_flip < b.p_zero.min(b.p_trans).min(b.p_multi), "q={qv}");
    }
}

#[test]
fn two_mode_output_norm_integrates_to_one() {
    let qq = q(0.3);
    let cut = k(16);
    let grid = QuadratureGrid::with_nodes_for_q(qq, 24, 8);
    let points: Vec<_> = grid.points().collect();
    let total: f64 = points
        .par_iter()
        .map(|&(bh, wh)| {
            points
                .iter()
                .map(|&(bv, wv)| {
                    let out = polarized_output(qq, DualModeMeasurement::new(bh, bv), cut).unwrap();
                    wh * wv * out.norm_sqr()
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    assert!((total - 1.0).abs() < 1e-6, "{total}");
}
