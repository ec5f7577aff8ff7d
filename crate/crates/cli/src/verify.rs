//! Oracle-equivalence and closed-form cross-checks behind `cvtele verify`.

use std::fmt;

use cvtele_core::fock::{coherent_state, number_state};
use cvtele_core::polarization::{polarization_budget, polarization_budget_numerical};
use cvtele_core::sampler::run_shots;
use cvtele_core::statistics::{
    conditional_beta_density, loss_gain_split, photon_statistics_closed_form,
    photon_statistics_quadrature,
};
use cvtele_core::teleport::{
    end_to_end_projection, single_photon_density, teleport_output, transfer_operator,
};
use cvtele_core::{
    Complex64, EntanglementParam, FockCutoff, MeasurementOutcome, PhotonCategory, QuadratureGrid,
    RangeSpec, SamplerConfig,
};

use crate::args::Level;

/// One check: passes when `observed ≤ tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub observed: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.observed.is_finite() && self.observed <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let verdict = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict}  {:<44} observed {:>10.3e}  tolerance {:>9.1e}",
                c.name, c.observed, c.tolerance
            )?;
        }
        write!(
            f,
            "{} checks, {} failed",
            self.checks.len(),
            self.failures()
        )
    }
}

fn q(v: f64) -> EntanglementParam {
    EntanglementParam::new(v).expect("hard-coded q in range")
}

fn k(n: usize) -> FockCutoff {
    FockCutoff::new(n).expect("hard-coded cutoff")
}

fn q_sweep() -> Vec<EntanglementParam> {
    "0:0.99:0.01"
        .parse::<RangeSpec>()
        .expect("literal range")
        .values()
        .into_iter()
        .map(q)
        .collect()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn count_true(flags: impl IntoIterator<Item = bool>) -> f64 {
    flags.into_iter().filter(|&b| b).count() as f64
}

fn projection_grid() -> f64 {
    // large enough that q = 0.82 keeps the EPR norm defect below the warning limit
    let cut = k(60);
    let inputs = [
        number_state(0, cut).expect("level in range"),
        number_state(1, cut).expect("level in range"),
        number_state(2, cut).expect("level in range"),
        coherent_state(Complex64::new(0.5, 0.0), cut).expect("small amplitude"),
    ];
    let betas = [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.7, 0.3)];
    let mut worst: f64 = 0.0;
    for qv in [0.0, 0.33, 0.5, 0.82] {
        for &(re, im) in &betas {
            let beta = MeasurementOutcome::new(re, im);
            for input in &inputs {
                let a = teleport_output(input, q(qv), beta);
                match end_to_end_projection(input, q(qv), beta, cut) {
                    Ok(b) => worst = worst.max(a.max_abs_diff(&b).unwrap_or(f64::INFINITY)),
                    Err(_) => return f64::INFINITY,
                }
            }
        }
    }
    worst
}

fn density_closed_form() -> f64 {
    let one = number_state(1, k(64)).expect("level in range");
    let mut worst: f64 = 0.0;
    for qv in [0.2, 0.5, 0.8] {
        for i in 0..=16 {
            let beta = MeasurementOutcome::from_beta(Complex64::from_polar(0.25 * i as f64, 0.7));
            let numeric = teleport_output(&one, q(qv), beta).norm_sqr();
            let closed = single_photon_density(q(qv), beta);
            worst = worst.max((numeric - closed).abs() / closed);
        }
    }
    worst
}

fn hermiticity() -> f64 {
    let mut worst: f64 = 0.0;
    for qv in [0.0, 0.33, 0.5, 0.82, 0.95] {
        for (re, im) in [(0.0, 0.0), (1.0, -0.5), (-2.0, 1.5), (0.7, 0.3)] {
            let t = transfer_operator(q(qv), MeasurementOutcome::new(re, im), k(32));
            worst = worst.max(t.hermiticity_defect());
        }
    }
    worst
}

fn fast_checks() -> Vec<Check> {
    let sweep = q_sweep();
    vec![
        Check {
            name: "transfer operator vs three-mode projection",
            tolerance: 1e-9,
            observed: projection_grid(),
        },
        Check {
            name: "single-photon density closed form (relative)",
            tolerance: 1e-9,
            observed: density_closed_form(),
        },
        Check {
            name: "transfer operator hermiticity",
            tolerance: 1e-12,
            observed: hermiticity(),
        },
        Check {
            name: "T_q(0) off-diagonal magnitude",
            tolerance: 0.0,
            observed: max_of([0.0, 0.5, 0.9].map(|v| {
                transfer_operator(q(v), MeasurementOutcome::new(0.0, 0.0), k(32)).off_diagonal_max()
            })),
        },
        Check {
            name: "loss + success + gain = 1",
            tolerance: 1e-12,
            observed: max_of(
                sweep
                    .iter()
                    .map(|&v| (loss_gain_split(v).sum() - 1.0).abs()),
            ),
        },
        Check {
            name: "photon distribution tail = gain",
            tolerance: 1e-12,
            observed: max_of([0.0, 0.5, 0.9].map(|v| {
                let tail: f64 = (2..4000)
                    .map(|n| photon_statistics_closed_form(q(v), n))
                    .sum();
                (tail - loss_gain_split(q(v)).p_gain).abs()
            })),
        },
        Check {
            name: "polarization budget sums to 1",
            tolerance: 1e-12,
            observed: max_of(
                sweep
                    .iter()
                    .map(|&v| (polarization_budget(v).sum() - 1.0).abs()),
            ),
        },
        Check {
            name: "q values with gain below loss",
            tolerance: 0.0,
            observed: count_true(sweep.iter().map(|&v| {
                let s = loss_gain_split(v);
                s.p_gain < s.p_loss
            })),
        },
        Check {
            name: "q values where flip is not the smallest",
            tolerance: 0.0,
            observed: count_true(sweep.iter().skip(1).map(|&v| {
                let b = polarization_budget(v);
                b.p_flip >= b.p_trans.min(b.p_zero).min(b.p_multi)
            })),
        },
    ]
}

fn quadrature_statistics() -> f64 {
    let one = number_state(1, k(32)).expect("level in range");
    let mut worst: f64 = 0.0;
    for qv in [0.2, 0.5, 0.8] {
        let Ok(d) = photon_statistics_quadrature(&one, q(qv), &QuadratureGrid::for_q(q(qv))) else {
            return f64::INFINITY;
        };
        for n in 0..=6 {
            worst = worst.max((d.probability(n) - photon_statistics_closed_form(q(qv), n)).abs());
        }
    }
    worst
}

fn conditional_integrals() -> f64 {
    let mut worst: f64 = 0.0;
    for qv in [0.2, 0.33, 0.5, 0.82] {
        let grid = QuadratureGrid::for_q(q(qv));
        let s = loss_gain_split(q(qv));
        for (c, want) in [
            (PhotonCategory::Loss, s.p_loss),
            (PhotonCategory::Success, s.p_success),
            (PhotonCategory::Gain, s.p_gain),
        ] {
            let got = grid.integrate_radial(|r| {
                conditional_beta_density(c, q(qv), MeasurementOutcome::new(r, 0.0))
            });
            worst = worst.max((got - want).abs());
        }
    }
    worst
}

fn numerical_budget() -> f64 {
    let mut worst: f64 = 0.0;
    for qv in [0.33, 0.5, 0.82] {
        let Ok(num) = polarization_budget_numerical(q(qv), k(32), &QuadratureGrid::for_q(q(qv)))
        else {
            return f64::INFINITY;
        };
        let closed = polarization_budget(q(qv));
        for (a, b) in num.as_array().iter().zip(closed.as_array()) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

fn vacuum_fidelity() -> f64 {
    let vac = number_state(0, k(32)).expect("level in range");
    let mut worst: f64 = 0.0;
    for qv in [0.0, 0.33, 0.5, 0.82] {
        let Ok(d) = photon_statistics_quadrature(&vac, q(qv), &QuadratureGrid::for_q(q(qv))) else {
            return f64::INFINITY;
        };
        worst = worst.max((d.probability(0) - (1.0 + qv) / 2.0).abs());
    }
    worst
}

/// Largest deviation, in binomial standard deviations, of the q = 1/2
/// category frequencies.
fn monte_carlo_sigmas() -> f64 {
    let shots = 100_000;
    let Ok(run) = run_shots(&SamplerConfig::single_photon(1, shots, q(0.5))) else {
        return f64::INFINITY;
    };
    max_of(
        [
            (PhotonCategory::Loss, 0.1875),
            (PhotonCategory::Success, 0.46875),
            (PhotonCategory::Gain, 0.34375),
        ]
        .map(|(c, p)| {
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            (run.summary.frequency(c) - p).abs() / sigma
        }),
    )
}

fn monte_carlo_thread_mismatch() -> f64 {
    let config = SamplerConfig::single_photon(2, 20_000, q(0.5));
    let run_on = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .ok()
            .and_then(|pool| pool.install(|| run_shots(&config).ok()))
    };
    match (run_on(1), run_on(3)) {
        (Some(a), Some(b)) if a == b => 0.0,
        _ => 1.0,
    }
}

fn full_checks() -> Vec<Check> {
    vec![
        Check {
            name: "quadrature P_q(n) vs closed form, n <= 6",
            tolerance: 1e-6,
            observed: quadrature_statistics(),
        },
        Check {
            name: "conditional densities integrate to split",
            tolerance: 1e-6,
            observed: conditional_integrals(),
        },
        Check {
            name: "numerical polarization budget",
            tolerance: 1e-6,
            observed: numerical_budget(),
        },
        Check {
            name: "vacuum success probability (1+q)/2",
            tolerance: 1e-6,
            observed: vacuum_fidelity(),
        },
        Check {
            name: "Monte Carlo categories at q = 0.5 (sigmas)",
            tolerance: 3.0,
            observed: monte_carlo_sigmas(),
        },
        Check {
            name: "Monte Carlo depends on thread count",
            tolerance: 0.0,
            observed: monte_carlo_thread_mismatch(),
        },
    ]
}

pub fn run(level: Level) -> Report {
    let mut checks = fast_checks();
    if level == Level::Full {
        checks.extend(full_checks());
    }
    Report { level, checks }
}
