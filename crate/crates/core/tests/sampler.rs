use std::f64::consts::PI;

use cvtele_core::fock::number_state;
use cvtele_core::quadrature::gauss_legendre;
use cvtele_core::sampler::{run_shots, shot_rng, single_photon_radial_cdf, BetaSampler};
use cvtele_core::statistics::{
    conditional_beta_density, loss_gain_split, photon_statistics_quadrature,
};
use cvtele_core::{
    Complex64, EntanglementParam, FockCutoff, InputDescriptor, MeasurementOutcome, PhotonCategory,
    QuadratureGrid, SamplerConfig,
};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SHOTS: u64 = 100_000;
const SIGNIFICANCE: f64 = 1e-3;

fn q(v: f64) -> EntanglementParam {
    EntanglementParam::new(v).unwrap()
}

/// Upper-tail p-value of Pearson's statistic over `(observed, expected)` cells.
fn chi_square_p(cells: &[(f64, f64)]) -> f64 {
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dist = ChiSquared::new((cells.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Merges every cell with expected count below 5 into one pooled cell.
fn pool_small(cells: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let (mut kept, small): (Vec<_>, Vec<_>) = cells.into_iter().partition(|c| c.1 >= 5.0);
    let pooled = small
        .iter()
        .fold((0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    if pooled.1 > 0.0 {
        kept.push(pooled);
    }
    kept
}

fn within_sigmas(freq: f64, p: f64, n: u64, sigmas: f64) -> bool {
    (freq - p).abs() <= sigmas * (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn category_frequencies_at_half() {
    let run = run_shots(&SamplerConfig::single_photon(20240601, SHOTS, q(0.5))).unwrap();
    let s = &run.summary;
    assert_eq!(s.shots, SHOTS);
    for (c, p) in [
        (PhotonCategory::Loss, 0.1875),
        (PhotonCategory::Success, 0.46875),
        (PhotonCategory::Gain, 0.34375),
    ] {
        assert!(
            within_sigmas(s.frequency(c), p, SHOTS, 3.0),
            "{c:?}: {}",
            s.frequency(c)
        );
    }
}

#[test]
fn success_frequency_at_strong_entanglement() {
    let run = run_shots(&SamplerConfig::single_photon(7, SHOTS, q(0.82))).unwrap();
    let p = loss_gain_split(q(0.82)).p_success;
    assert!((p - 0.760942).abs() < 1e-6);
    let f = run.summary.frequency(PhotonCategory::Success);
    assert!(within_sigmas(f, p, SHOTS, 3.0), "{f}");
}

#[test]
fn joint_category_radius_histogram_matches_conditional_densities() {
    for (qv, seed) in [(0.33, 11u64), (0.5, 12), (0.82, 13)] {
        let qq = q(qv);
        let a = qq.one_minus_q_sq();
        // radial edges at deciles of the total density
        let mut edges = vec![0.0];
        for i in 1..10 {
            let target = i as f64 / 10.0;
            let (mut lo, mut hi) = (0.0, 60.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if single_photon_radial_cdf(qq, mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            edges.push((0.5 * (lo + hi) / a).sqrt());
        }
        edges.push((60.0 / a).sqrt());

        let run = run_shots(&SamplerConfig::single_photon(seed, SHOTS, qq)).unwrap();
        let bins = edges.len() - 1;
        let mut observed = vec![[0.0; 3]; bins];
        for r in &run.records {
            let radius = r.beta.norm();
            let bin = edges.partition_point(|&e| e <= radius).clamp(1, bins) - 1;
            observed[bin][r.category.index()] += 1.0;
        }

        let (x, w) = gauss_legendre(48);
        let mut cells = Vec::new();
        for (bin, obs) in observed.iter().enumerate() {
            let (lo, hi) = (edges[bin], edges[bin + 1]);
            for c in [
                PhotonCategory::Loss,
                PhotonCategory::Success,
                PhotonCategory::Gain,
            ] {
                let mass: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(t, wt)| {
                        let r = lo + (hi - lo) * (t + 1.0) / 2.0;
                        let p = conditional_beta_density(c, qq, MeasurementOutcome::new(r, 0.0));
                        wt * (hi - lo) / 2.0 * 2.0 * PI * r * p
                    })
                    .sum();
                cells.push((obs[c.index()], mass * SHOTS as f64));
            }
        }
        let expected_total: f64 = cells.iter().map(|c| c.1).sum();
        assert!((expected_total - SHOTS as f64).abs() < 1e-6 * SHOTS as f64);
        let p = chi_square_p(&pool_small(cells));
        assert!(p > SIGNIFICANCE, "q={qv}: p={p}");
    }
}

#[test]
fn first_radial_moment_and_isotropy() {
    let qq = q(0.5);
    let run = run_shots(&SamplerConfig::single_photon(99, SHOTS, qq)).unwrap();
    // E|β|² = (2a + q²)/a, E|β|⁴ = (6a + 2q²)/a² with a = 1 − q²
    let a = qq.one_minus_q_sq();
    let m1 = (2.0 * a + 0.25) / a;
    let m2 = (6.0 * a + 0.5) / (a * a);
    assert!((m1 - 7.0 / 3.0).abs() < 1e-15);
    let mean = run.records.iter().map(|r| r.beta.norm_sqr()).sum::<f64>() / SHOTS as f64;
    let se = ((m2 - m1 * m1) / SHOTS as f64).sqrt();
    assert!(
        (mean - m1).abs() < 3.0 * se,
        "mean {mean} vs {m1} (se {se})"
    );

    let mut bins = [0.0; 16];
    for r in &run.records {
        let t = r.beta.arg().rem_euclid(2.0 * PI);
        bins[((t / (2.0 * PI) * 16.0) as usize).min(15)] += 1.0;
    }
    let cells: Vec<_> = bins.iter().map(|&o| (o, SHOTS as f64 / 16.0)).collect();
    assert!(chi_square_p(&cells) > SIGNIFICANCE);
}

#[test]
fn vacuum_at_zero_entanglement_is_gaussian() {
    let sampler =
        BetaSampler::new(&number_state(0, FockCutoff::default()).unwrap(), q(0.0)).unwrap();
    let n = 50_000;
    let mut rng = shot_rng(3, 0);
    let draws: Vec<Complex64> = (0..n).map(|_| sampler.sample(&mut rng).unwrap()).collect();
    // density e^{−|β|²}/π: |β|² ~ Exp(1), Re β ~ N(0, 1/2)
    let nf = n as f64;
    let r2 = draws.iter().map(|b| b.norm_sqr()).sum::<f64>() / nf;
    assert!((r2 - 1.0).abs() < 3.0 * (1.0 / nf).sqrt(), "{r2}");
    let re = draws.iter().map(|b| b.re).sum::<f64>() / nf;
    assert!(re.abs() < 3.0 * (0.5 / nf).sqrt(), "{re}");
    let re2 = draws.iter().map(|b| b.re * b.re).sum::<f64>() / nf;
    // Var(X²) = 2σ⁴ = 1/2
    assert!((re2 - 0.5).abs() < 3.0 * (0.5 / nf).sqrt(), "{re2}");
}

#[test]
fn coherent_input_counts_match_quadrature() {
    let qq = q(0.5);
    let alpha = Complex64::new(0.5, 0.0);
    let shots = 20_000;
    let config = SamplerConfig {
        master_seed: 5,
        shots,
        q: qq,
        input: InputDescriptor::Coherent(alpha),
        cutoff: FockCutoff::default(),
    };
    let run = run_shots(&config).unwrap();
    let input = InputDescriptor::Coherent(alpha)
        .state(FockCutoff::default())
        .unwrap();
    let dist = photon_statistics_quadrature(&input, qq, &QuadratureGrid::for_q(qq)).unwrap();
    let mut cells = Vec::new();
    let mut tail_obs = run.summary.overflow as f64;
    let mut tail_exp = dist.residual;
    for (n, &count) in run.summary.counts.iter().enumerate() {
        if n < 4 {
            cells.push((count as f64, dist.probability(n) * shots as f64));
        } else {
            tail_obs += count as f64;
            tail_exp += dist.probability(n);
        }
    }
    cells.push((tail_obs, tail_exp * shots as f64));
    assert!(chi_square_p(&pool_small(cells)) > SIGNIFICANCE);
}

#[test]
fn bit_identical_across_thread_counts() {
    let config = SamplerConfig::single_photon(0xC0FFEE, 20_000, q(0.5));
    let run_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_shots(&config).unwrap())
    };
    let one = run_with(1);
    let four = run_with(4);
    assert_eq!(one, four);
    for (i, r) in one.records.iter().enumerate() {
        assert_eq!(r.seed_lineage.shot_index, i as u64);
        assert_eq!(r.seed_lineage.master_seed, 0xC0FFEE);
    }
    let other = run_shots(&SamplerConfig::single_photon(0xC0FFEF, 20_000, q(0.5))).unwrap();
    assert_ne!(one.records, other.records);
}

#[test]
fn overflow_stays_negligible() {
    for qv in [0.0, 0.5, 0.9] {
        let run = run_shots(&SamplerConfig::single_photon(17, SHOTS, q(qv))).unwrap();
        assert!(
            run.summary.mean_overflow_mass < 1e-6,
            "q={qv}: {}",
            run.summary.mean_overflow_mass
        );
        assert!(run.summary.overflow_frequency() < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn records_are_consistent(seed in any::<u64>(), qv in 0.0..0.95f64) {
        let run = run_shots(&SamplerConfig::single_photon(seed, 64, q(qv))).unwrap();
        for r in &run.records {
            prop_assert_eq!(r.category, r.photon_count.category());
            if let Some(n) = r.photon_count.count() {
                prop_assert_eq!(r.category, PhotonCategory::of_count(n));
            }
        }
        let total: u64 = run.summary.categories.iter().sum();
        prop_assert_eq!(total, 64);
    }
}
