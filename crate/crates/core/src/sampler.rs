//! Seeded Monte Carlo of individual teleportation shots.
//!
//! Each shot draws `β` from `P_q(β)`, forms the conditional output
//! `T_q(β)|ψ⟩` and counts its photons. Shot `i` owns a ChaCha8 stream keyed by
//! the master seed with stream id `i`, so a run is bit-identical whatever the
//! thread count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{coherent_state, number_state, FockCutoff, StateVector};
use crate::statistics::PhotonCategory;
use crate::teleport::{
    beta_density, converged_output, single_photon_density, single_photon_output_closed_form,
    EntanglementParam, MeasurementOutcome,
};

/// Input states the sampler knows how to prepare.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputDescriptor {
    /// `|n⟩`
    Fock(usize),
    /// `|α⟩`
    Coherent(Complex64),
}

impl InputDescriptor {
    pub fn state(&self, cutoff: FockCutoff) -> Result<StateVector> {
        match *self {
            Self::Fock(n) => number_state(n, cutoff),
            Self::Coherent(alpha) => coherent_state(alpha, cutoff),
        }
    }

    pub fn mean_photon_number(&self) -> f64 {
        match *self {
            Self::Fock(n) => n as f64,
            Self::Coherent(alpha) => alpha.norm_sqr(),
        }
    }

    /// Square root of the largest photon number carrying appreciable weight.
    fn amplitude_scale(&self) -> f64 {
        match *self {
            Self::Fock(n) => (n as f64).sqrt(),
            Self::Coherent(alpha) => alpha.norm(),
        }
    }

    /// `‖T_q(β)|ψ⟩‖²` without truncation, where a closed form is available.
    fn exact_density(&self, q: EntanglementParam, beta: MeasurementOutcome) -> Option<f64> {
        match *self {
            Self::Fock(1) => Some(single_photon_density(q, beta)),
            Self::Fock(0) => Some(coherent_density(Complex64::default(), q, beta)),
            Self::Coherent(alpha) => Some(coherent_density(alpha, q, beta)),
            Self::Fock(_) => None,
        }
    }
}

/// `((1−q²)/π) e^{−(1−q²)|α−β|²}`
fn coherent_density(alpha: Complex64, q: EntanglementParam, beta: MeasurementOutcome) -> f64 {
    let a = q.one_minus_q_sq();
    a / PI * (-a * (alpha - beta.beta()).norm_sqr()).exp()
}

impl fmt::Display for InputDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fock(n) => write!(f, "fock:{n}"),
            Self::Coherent(a) => write!(f, "coherent:{},{}", a.re, a.im),
        }
    }
}

/// Parses `fock:N` or `coherent:RE,IM` (`coherent:RE` for real amplitudes).
impl FromStr for InputDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::InvalidArgument(format!("expected fock:N or coherent:RE,IM, got `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "fock" => rest.trim().parse().map(Self::Fock).map_err(|_| bad()),
            "coherent" => {
                let mut parts = rest.split(',').map(|t| t.trim().parse::<f64>());
                let re = parts.next().ok_or_else(bad)?.map_err(|_| bad())?;
                let im = match parts.next() {
                    Some(v) => v.map_err(|_| bad())?,
                    None => 0.0,
                };
                if parts.next().is_some() || !(re.is_finite() && im.is_finite()) {
                    return Err(bad());
                }
                Ok(Self::Coherent(Complex64::new(re, im)))
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub master_seed: u64,
    pub shots: u64,
    pub q: EntanglementParam,
    pub input: InputDescriptor,
    pub cutoff: FockCutoff,
}

impl SamplerConfig {
    pub fn single_photon(master_seed: u64, shots: u64, q: EntanglementParam) -> Self {
        Self {
            master_seed,
            shots,
            q,
            input: InputDescriptor::Fock(1),
            cutoff: FockCutoff::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(())
    }
}

/// RNG stream of one shot.
pub fn shot_rng(master_seed: u64, shot_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(shot_index);
    rng
}

/// Photon count outcome; counts above the cutoff land in `Overflow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhotonCount {
    Count(usize),
    Overflow,
}

impl PhotonCount {
    pub fn category(self) -> PhotonCategory {
        match self {
            Self::Count(n) => PhotonCategory::of_count(n),
            Self::Overflow => PhotonCategory::Gain,
        }
    }

    pub fn count(self) -> Option<usize> {
        match self {
            Self::Count(n) => Some(n),
            Self::Overflow => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub shot_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    pub beta: Complex64,
    pub photon_count: PhotonCount,
    pub category: PhotonCategory,
    /// Probability mass of this shot's output above the cutoff.
    pub overflow_mass: f64,
    pub seed_lineage: SeedLineage,
}

const INVERSE_CDF_TOLERANCE: f64 = 1e-12;
const ENVELOPE_MARGIN: f64 = 1.25;
const ENVELOPE_SCAN_RADII: usize = 256;
const ENVELOPE_SCAN_ANGLES: usize = 32;
/// Extra `√n` headroom when sizing the basis of a conditional output.
const OUTPUT_HEADROOM: f64 = 6.0;

/// Draws measurement outcomes `β ~ ‖T_q(β)|ψ⟩‖²` for a fixed input.
///
/// `|1⟩` uses the exact radial inverse CDF; other inputs use rejection from
/// an isotropic Gaussian envelope of rate `(1−q²)/(1+n̄)`.
#[derive(Debug, Clone)]
pub struct BetaSampler {
    q: EntanglementParam,
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    SinglePhoton,
    Rejection {
        input: StateVector,
        rate: f64,
        bound: f64,
    },
}

impl BetaSampler {
    pub fn new(input: &StateVector, q: EntanglementParam) -> Result<Self> {
        let input = input.normalized()?;
        if input.is_number_state(1) {
            return Ok(Self {
                q,
                kind: SamplerKind::SinglePhoton,
            });
        }
        let rate = q.one_minus_q_sq() / (1.0 + input.mean_photon_number()?);
        let bound = ENVELOPE_MARGIN * envelope_scan(&input, q, rate);
        Ok(Self {
            q,
            kind: SamplerKind::Rejection { input, rate, bound },
        })
    }

    /// Bound `M` on density / envelope, if rejection is used.
    pub fn envelope_bound(&self) -> Option<f64> {
        match &self.kind {
            SamplerKind::SinglePhoton => None,
            SamplerKind::Rejection { bound, .. } => Some(*bound),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Complex64> {
        match &self.kind {
            SamplerKind::SinglePhoton => Ok(single_photon_beta(self.q, rng)),
            SamplerKind::Rejection { input, rate, bound } => loop {
                let beta = gaussian_beta(*rate, rng);
                let density = beta_density(input, self.q, MeasurementOutcome::from_beta(beta));
                let ratio = density / envelope(*rate, beta);
                if ratio > *bound {
                    return Err(Error::EnvelopeViolated {
                        ratio,
                        bound: *bound,
                    });
                }
                if rng.random::<f64>() * bound < ratio {
                    return Ok(beta);
                }
            },
        }
    }
}

/// One draw of `β` for `input`; builds a fresh [`BetaSampler`], so reuse one
/// when drawing repeatedly.
pub fn sample_beta<R: Rng + ?Sized>(
    input: &StateVector,
    q: EntanglementParam,
    rng: &mut R,
) -> Result<Complex64> {
    BetaSampler::new(input, q)?.sample(rng)
}

fn envelope(rate: f64, beta: Complex64) -> f64 {
    rate / PI * (-rate * beta.norm_sqr()).exp()
}

fn gaussian_beta<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Complex64 {
    // 1 − U lies in (0, 1], keeping the logarithm finite
    let r2 = -(1.0 - rng.random::<f64>()).ln() / rate;
    Complex64::from_polar(r2.sqrt(), 2.0 * PI * rng.random::<f64>())
}

fn envelope_scan(input: &StateVector, q: EntanglementParam, rate: f64) -> f64 {
    let radius = (40.0 / rate).sqrt();
    let mut worst: f64 = 0.0;
    for i in 0..=ENVELOPE_SCAN_RADII {
        let r = radius * i as f64 / ENVELOPE_SCAN_RADII as f64;
        for j in 0..ENVELOPE_SCAN_ANGLES {
            let beta = Complex64::from_polar(r, 2.0 * PI * j as f64 / ENVELOPE_SCAN_ANGLES as f64);
            let density = beta_density(input, q, MeasurementOutcome::from_beta(beta));
            worst = worst.max(density / envelope(rate, beta));
        }
    }
    worst
}

/// Radial CDF of the single-photon density in `u = (1−q²)|β|²`:
/// `F(u) = 1 − e^{−u}(1 + (1−q²)u)`.
pub fn single_photon_radial_cdf(q: EntanglementParam, u: f64) -> f64 {
    1.0 - (-u).exp() * (1.0 + q.one_minus_q_sq() * u)
}

fn single_photon_beta<R: Rng + ?Sized>(q: EntanglementParam, rng: &mut R) -> Complex64 {
    let target: f64 = rng.random();
    let theta = 2.0 * PI * rng.random::<f64>();
    let cdf = |u| single_photon_radial_cdf(q, u);
    let mut hi = 1.0;
    while cdf(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > INVERSE_CDF_TOLERANCE * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = 0.5 * (lo + hi);
    Complex64::from_polar((u / q.one_minus_q_sq()).sqrt(), theta)
}

/// Draws `n` with probability `|aₙ|²/N`.
///
/// `N` is `reference_norm` when given (the untruncated squared norm of the
/// state), otherwise the retained norm. Mass the retained levels miss goes to
/// [`PhotonCount::Overflow`]. Returns the count and the overflow mass
/// fraction.
pub fn sample_photon_count<R: Rng + ?Sized>(
    output: &StateVector,
    reference_norm: Option<f64>,
    rng: &mut R,
) -> Result<(PhotonCount, f64)> {
    let captured = output.norm_sqr();
    let total = reference_norm.unwrap_or(captured).max(captured);
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let overflow = (total - captured) / total;
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (n, a) in output.amplitudes().iter().enumerate() {
        acc += a.norm_sqr();
        if target < acc {
            return Ok((PhotonCount::Count(n), overflow));
        }
    }
    if overflow > 0.0 {
        Ok((PhotonCount::Overflow, overflow))
    } else {
        // target landed on the rounding edge of the last populated level
        let last = output
            .amplitudes()
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .ok_or(Error::ZeroNorm)?;
        Ok((PhotonCount::Count(last), overflow))
    }
}

/// Conditional output restricted to `cutoff`, with its untruncated squared norm.
fn conditional_output(
    input: InputDescriptor,
    q: EntanglementParam,
    beta: MeasurementOutcome,
    cutoff: FockCutoff,
) -> Result<(StateVector, f64)> {
    if input == InputDescriptor::Fock(1) {
        let out = single_photon_output_closed_form(q, beta, cutoff);
        return Ok((out, single_photon_density(q, beta)));
    }
    // the output sits near (1−q)β + q·(input amplitude); size a basis that holds it
    let reach = (1.0 - q.value()) * beta.beta().norm() + input.amplitude_scale() + OUTPUT_HEADROOM;
    let wide = FockCutoff::new(cutoff.n_max().max((reach * reach).ceil() as usize))?;
    let full = converged_output(&input.state(cutoff)?, q, beta, wide);
    let reference = input
        .exact_density(q, beta)
        .unwrap_or(0.0)
        .max(full.norm_sqr());
    let kept = full.amplitudes()[..cutoff.dim()].to_vec();
    Ok((StateVector::from_raw(kept, cutoff), reference))
}

fn run_shot(config: &SamplerConfig, sampler: &BetaSampler, shot_index: u64) -> Result<ShotRecord> {
    let mut rng = shot_rng(config.master_seed, shot_index);
    let beta = sampler.sample(&mut rng)?;
    let (output, reference) = conditional_output(
        config.input,
        config.q,
        MeasurementOutcome::from_beta(beta),
        config.cutoff,
    )?;
    let (photon_count, overflow_mass) = sample_photon_count(&output, Some(reference), &mut rng)?;
    Ok(ShotRecord {
        beta,
        photon_count,
        category: photon_count.category(),
        overflow_mass,
        seed_lineage: SeedLineage {
            master_seed: config.master_seed,
            shot_index,
        },
    })
}

/// Photon-count histogram of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotSummary {
    pub shots: u64,
    /// `counts[n]` for `n ≤ n_max`.
    pub counts: Vec<u64>,
    pub overflow: u64,
    /// Shots per loss / success / gain.
    pub categories: [u64; 3],
    /// Average per-shot probability of landing in the overflow bucket.
    pub mean_overflow_mass: f64,
}

impl ShotSummary {
    fn from_records(records: &[ShotRecord], cutoff: FockCutoff) -> Self {
        let mut counts = vec![0; cutoff.dim()];
        let mut overflow = 0;
        let mut categories = [0; 3];
        let mut overflow_mass = 0.0;
        for r in records {
            match r.photon_count {
                PhotonCount::Count(n) => counts[n] += 1,
                PhotonCount::Overflow => overflow += 1,
            }
            categories[r.category.index()] += 1;
            overflow_mass += r.overflow_mass;
        }
        Self {
            shots: records.len() as u64,
            counts,
            overflow,
            categories,
            mean_overflow_mass: overflow_mass / records.len() as f64,
        }
    }

    pub fn frequency(&self, category: PhotonCategory) -> f64 {
        self.categories[category.index()] as f64 / self.shots as f64
    }

    pub fn overflow_frequency(&self) -> f64 {
        self.overflow as f64 / self.shots as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotRun {
    pub records: Vec<ShotRecord>,
    pub summary: ShotSummary,
}

/// Runs every shot of `config` in parallel; records come back in shot order.
///
/// The first failing shot (by index) is reported as [`Error::Shot`].
pub fn run_shots(config: &SamplerConfig) -> Result<ShotRun> {
    config.validate()?;
    let input = config.input.state(config.cutoff)?;
    let sampler = BetaSampler::new(&input, config.q)?;
    let results: Vec<Result<ShotRecord>> = (0..config.shots)
        .into_par_iter()
        .map(|i| run_shot(config, &sampler, i))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for (index, r) in results.into_iter().enumerate() {
        records.push(r.map_err(|e| Error::Shot {
            index: index as u64,
            source: Box::new(e),
        })?);
    }
    let summary = ShotSummary::from_records(&records, config.cutoff);
    Ok(ShotRun { records, summary })
}
