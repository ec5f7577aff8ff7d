//! Photon-number statistics of teleported states.
//!
//! For a single-photon input the output photon distribution, its
//! loss/success/gain split and the joint densities `P_q(n, β)` are known in
//! closed form; [`photon_statistics_quadrature`] recomputes them for any
//! input by integrating `|⟨n|T_q(β)|ψ⟩|²` over the β-plane.

use std::f64::consts::{LN_10, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{number_state, FockCutoff, StateVector, TAIL_WARNING_THRESHOLD};
use crate::polarization;
use crate::range::RangeSpec;
use crate::teleport::{converged_output, EntanglementParam, MeasurementOutcome, DENSITY_UNDERFLOW};

pub use crate::quadrature::QuadratureGrid;

/// Distribution over output photon counts, with the mass lost above the cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub probabilities: Vec<f64>,
    pub residual: f64,
}

impl PhotonDistribution {
    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    /// `Σ pₙ + residual`
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum::<f64>() + self.residual
    }

    /// Collapses to loss (0), success (1) and gain (≥ 2, including the residual).
    pub fn split(&self) -> LossGainSplit {
        LossGainSplit {
            p_loss: self.probability(0),
            p_success: self.probability(1),
            p_gain: self.probabilities.iter().skip(2).sum::<f64>() + self.residual,
        }
    }
}

/// Probabilities of losing the photon, transferring it, or gaining photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossGainSplit {
    pub p_loss: f64,
    pub p_success: f64,
    pub p_gain: f64,
}

impl LossGainSplit {
    pub fn sum(&self) -> f64 {
        self.p_loss + self.p_success + self.p_gain
    }
}

/// Output photon-count category for a single-photon input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhotonCategory {
    /// `n = 0`
    Loss,
    /// `n = 1`
    Success,
    /// `n ≥ 2`
    Gain,
}

impl PhotonCategory {
    pub fn of_count(n: usize) -> Self {
        match n {
            0 => Self::Loss,
            1 => Self::Success,
            _ => Self::Gain,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// `∫ |⟨n|T_q(β)|ψ⟩|² d²β` for every retained `n`.
///
/// The input is normalized first; whatever the truncated output misses is
/// reported as `residual`.
pub fn photon_statistics_quadrature(
    input: &StateVector,
    q: EntanglementParam,
    grid: &QuadratureGrid,
) -> Result<PhotonDistribution> {
    grid.validate_for(q)?;
    let input = input.normalized()?;
    let dim = input.cutoff().dim();
    let probabilities = grid.integrate_vec(dim, |beta, acc| {
        let out = converged_output(
            &input,
            q,
            MeasurementOutcome::from_beta(beta),
            input.cutoff(),
        );
        for (a, z) in acc.iter_mut().zip(out.amplitudes()) {
            *a += z.norm_sqr();
        }
    });
    let captured: f64 = probabilities.iter().sum();
    let top = probabilities[dim - 1] / captured;
    if top > TAIL_WARNING_THRESHOLD {
        log::warn!(
            "photon statistics: P(n_max = {}) = {top:.3e} of the captured mass exceeds {TAIL_WARNING_THRESHOLD:.1e}",
            input.cutoff()
        );
    }
    Ok(PhotonDistribution {
        probabilities,
        residual: (1.0 - captured).max(0.0),
    })
}

/// `((1+q)/2) ((1−q)/2)^{n+1} (1 + ((1+q)/(1−q))² n)`: probability of
/// counting `n` photons after teleporting `|1⟩`.
pub fn photon_statistics_closed_form(q: EntanglementParam, n: usize) -> f64 {
    let qv = q.value();
    let up = (1.0 + qv) / 2.0;
    let down = (1.0 - qv) / 2.0;
    let ratio = (1.0 + qv) / (1.0 - qv);
    up * down.powi(n as i32 + 1) * (1.0 + ratio * ratio * n as f64)
}

/// Closed-form loss/success/gain probabilities for a single-photon input.
pub fn loss_gain_split(q: EntanglementParam) -> LossGainSplit {
    let qv = q.value();
    let q2 = qv * qv;
    let q3 = q2 * qv;
    LossGainSplit {
        p_loss: 0.25 * (1.0 - q2),
        p_success: 0.25 * (1.0 + qv + q2 + q3),
        p_gain: 0.25 * (2.0 - qv - q3),
    }
}

/// Negative gain densities down to this magnitude are rounding and clamp to 0.
pub const GAIN_CLAMP: f64 = 1e-12;

/// Joint density `P_q(n, β)` of measuring `β` and counting photons in `category`.
///
/// ```text
/// P_q(0, β)  = ((1−q²)/π) e^{−2(1−q)|β|²} (1−q)² |β|²
/// P_q(1, β)  = ((1−q²)/π) e^{−2(1−q)|β|²} (q + (1−q)²|β|²)²
/// P_q(≥2, β) = P_q(β) − P_q(0, β) − P_q(1, β)
/// ```
pub fn conditional_beta_density(
    category: PhotonCategory,
    q: EntanglementParam,
    beta: MeasurementOutcome,
) -> f64 {
    let r2 = beta.beta().norm_sqr();
    let a = q.one_minus_q_sq();
    if -a * r2 < DENSITY_UNDERFLOW.ln() {
        return 0.0;
    }
    let qv = q.value();
    let pref = a / PI;
    let sq = (1.0 - qv) * (1.0 - qv);
    let inner = (-2.0 * (1.0 - qv) * r2).exp();
    let amp = qv + sq * r2;
    match category {
        PhotonCategory::Loss => pref * inner * (sq * r2),
        PhotonCategory::Success => pref * inner * (amp * amp),
        PhotonCategory::Gain => {
            // one bracket, so the q² terms cancel exactly at β = 0
            let total = (-a * r2).exp() * (a * a * r2 + qv * qv);
            let g = pref * (total - inner * (sq * r2 + amp * amp));
            if g < 0.0 && g > -GAIN_CLAMP {
                0.0
            } else {
                g
            }
        }
    }
}

const CROSSING_SCAN_STEP: f64 = 1e-2;

/// Radius `|β|` where the loss and gain conditional densities cross.
///
/// Loss dominates near the origin for moderate `q`; the first sign change of
/// `P_q(≥2, β) − P_q(0, β)` is bracketed on a fine scan of `(0, R]` and
/// refined by bisection. For strong entanglement (q above roughly 0.71) gain
/// dominates everywhere and [`Error::NoCrossing`] is returned.
pub fn crossing_radius(q: EntanglementParam) -> Result<f64> {
    if q.value() <= 0.0 {
        return Err(Error::InvalidArgument(
            "crossing radius requires q > 0".into(),
        ));
    }
    let diff = |r: f64| {
        let m = MeasurementOutcome::new(r, 0.0);
        conditional_beta_density(PhotonCategory::Gain, q, m)
            - conditional_beta_density(PhotonCategory::Loss, q, m)
    };
    let radius = (crate::quadrature::DEFAULT_RADIUS_EXPONENT / q.one_minus_q_sq()).sqrt();
    let steps = (radius / CROSSING_SCAN_STEP).ceil() as usize;
    let mut lo = CROSSING_SCAN_STEP;
    let mut f_lo = diff(lo);
    for i in 2..=steps {
        let hi = i as f64 * CROSSING_SCAN_STEP;
        let f_hi = diff(hi);
        if f_lo < 0.0 && f_hi >= 0.0 {
            return Ok(bisect(diff, lo, hi));
        }
        if f_lo > 0.0 && f_hi <= 0.0 {
            return Ok(bisect(|r| -diff(r), lo, hi));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::NoCrossing { q: q.value() })
}

/// Root of an increasing sign change of `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-15 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-mode squeezing `db` (in dB) to `q = tanh(db · ln10 / 20)`.
pub fn squeezing_db_to_q(db: f64) -> Result<EntanglementParam> {
    if !(db.is_finite() && db >= 0.0) {
        return Err(Error::InvalidSqueezing(db));
    }
    EntanglementParam::new((db * LN_10 / 20.0).tanh())
}

/// Inverse of [`squeezing_db_to_q`].
pub fn q_to_squeezing_db(q: EntanglementParam) -> f64 {
    20.0 * q.value().atanh() / LN_10
}

/// Which closed-form family a q-sweep tabulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    /// `P_q(0)`, `P_q(1)`, `P_q(n ≥ 2)`
    LossGain,
    /// `p_trans`, `p_flip`, `p_zero`, `p_multi`
    Polarization,
    /// `P_q(n)` for `n = 0..=max_n`
    PhotonStats { max_n: usize },
}

/// Numerical cross-check added to each sweep row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureCheck {
    pub cutoff: FockCutoff,
    pub tolerance: f64,
}

impl Default for QuadratureCheck {
    fn default() -> Self {
        Self {
            cutoff: FockCutoff::default(),
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    /// Closed-form values, followed by the quadrature values when requested.
    pub values: Vec<f64>,
    /// Set when a quadrature column differs from its closed form beyond tolerance.
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub quantity: SweepQuantity,
    /// Value columns (the `q` column is implicit).
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn any_disagreement(&self) -> bool {
        self.rows.iter().any(|r| r.disagreement)
    }
}

fn closed_form_columns(quantity: SweepQuantity) -> Vec<String> {
    match quantity {
        SweepQuantity::LossGain => vec!["p_loss".into(), "p_success".into(), "p_gain".into()],
        SweepQuantity::Polarization => vec![
            "p_trans".into(),
            "p_flip".into(),
            "p_zero".into(),
            "p_multi".into(),
        ],
        SweepQuantity::PhotonStats { max_n } => (0..=max_n).map(|n| format!("p_{n}")).collect(),
    }
}

fn closed_form_values(quantity: SweepQuantity, q: EntanglementParam) -> Vec<f64> {
    match quantity {
        SweepQuantity::LossGain => {
            let s = loss_gain_split(q);
            vec![s.p_loss, s.p_success, s.p_gain]
        }
        SweepQuantity::Polarization => {
            let b = polarization::polarization_budget(q);
            vec![b.p_trans, b.p_flip, b.p_zero, b.p_multi]
        }
        SweepQuantity::PhotonStats { max_n } => (0..=max_n)
            .map(|n| photon_statistics_closed_form(q, n))
            .collect(),
    }
}

fn quadrature_values(
    quantity: SweepQuantity,
    q: EntanglementParam,
    check: &QuadratureCheck,
) -> Result<Vec<f64>> {
    let grid = QuadratureGrid::for_q(q);
    match quantity {
        SweepQuantity::LossGain => {
            let one = number_state(1, check.cutoff)?;
            let s = photon_statistics_quadrature(&one, q, &grid)?.split();
            Ok(vec![s.p_loss, s.p_success, s.p_gain])
        }
        SweepQuantity::Polarization => {
            let b = polarization::polarization_budget_numerical(q, check.cutoff, &grid)?;
            Ok(vec![b.p_trans, b.p_flip, b.p_zero, b.p_multi])
        }
        SweepQuantity::PhotonStats { max_n } => {
            let one = number_state(1, check.cutoff)?;
            let d = photon_statistics_quadrature(&one, q, &grid)?;
            Ok((0..=max_n).map(|n| d.probability(n)).collect())
        }
    }
}

/// Tabulates `quantity` for every `q` in `range`.
///
/// Rows are computed in parallel and returned in range order.
pub fn sweep_q(
    quantity: SweepQuantity,
    range: &RangeSpec,
    quadrature: Option<&QuadratureCheck>,
) -> Result<SweepTable> {
    if range.start < 0.0 || range.end >= 1.0 {
        return Err(Error::InvalidRange(format!(
            "q range {range} must satisfy 0 ≤ start ≤ end < 1"
        )));
    }
    let mut columns = closed_form_columns(quantity);
    if quadrature.is_some() {
        let quad: Vec<String> = columns.iter().map(|c| format!("{c}_quad")).collect();
        columns.extend(quad);
    }
    let rows = range
        .values()
        .into_par_iter()
        .map(|qv| {
            let q = EntanglementParam::new(qv)?;
            let mut values = closed_form_values(quantity, q);
            let mut disagreement = false;
            if let Some(check) = quadrature {
                let quad = quadrature_values(quantity, q, check)?;
                disagreement = values
                    .iter()
                    .zip(&quad)
                    .any(|(c, n)| (c - n).abs() > check.tolerance);
                values.extend(quad);
            }
            Ok(SweepRow {
                q: qv,
                values,
                disagreement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        quantity,
        columns,
        rows,
    })
}
