//! Polar quadrature over the complex `β` plane.
//!
//! Radial Gauss–Legendre nodes on `[0, R]` (weights include the `r` of
//! `d²β = r dr dθ`) combined with the uniform trapezoid rule in angle, which
//! is spectrally accurate for smooth periodic integrands.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::teleport::EntanglementParam;

/// Default number of radial Gauss–Legendre nodes.
pub const DEFAULT_RADIAL_NODES: usize = 128;
/// Default number of angular nodes.
pub const DEFAULT_ANGULAR_NODES: usize = 64;
/// `(1−q²) R²` used by [`QuadratureGrid::for_q`].
pub const DEFAULT_RADIUS_EXPONENT: f64 = 40.0;
/// Largest admissible `e^{−(1−q²)R²}(1+R²)` for a grid to be valid at `q`.
pub const TAIL_BOUND: f64 = 1e-14;

/// Gauss–Legendre nodes and weights on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product polar grid on the disk `|β| ≤ R`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    radius: f64,
    radial_nodes: Vec<f64>,
    /// Gauss–Legendre weights times the Jacobian `r`.
    radial_weights: Vec<f64>,
    angular_nodes: usize,
}

impl QuadratureGrid {
    pub fn new(radial: usize, angular: usize, radius: f64) -> Result<Self> {
        if radial == 0 || angular == 0 {
            return Err(Error::InvalidArgument(
                "quadrature needs at least one radial and one angular node".into(),
            ));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("bad radius {radius}")));
        }
        let (x, w) = gauss_legendre(radial);
        let half = radius / 2.0;
        let radial_nodes: Vec<f64> = x.iter().map(|t| half * (t + 1.0)).collect();
        let radial_weights = radial_nodes
            .iter()
            .zip(&w)
            .map(|(r, wi)| wi * half * r)
            .collect();
        Ok(Self {
            radius,
            radial_nodes,
            radial_weights,
            angular_nodes: angular,
        })
    }

    /// Default grid for `q`: 128 × 64 nodes, `R = √(40/(1−q²))`.
    pub fn for_q(q: EntanglementParam) -> Self {
        Self::with_nodes_for_q(q, DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES)
    }

    pub fn with_nodes_for_q(q: EntanglementParam, radial: usize, angular: usize) -> Self {
        let radius = (DEFAULT_RADIUS_EXPONENT / q.one_minus_q_sq()).sqrt();
        Self::new(radial, angular, radius).expect("positive node counts and radius")
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    pub fn radial_len(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    /// `e^{−(1−q²)R²}(1+R²)`, the Gaussian tail left outside the disk.
    pub fn tail_estimate(&self, q: EntanglementParam) -> f64 {
        let r2 = self.radius * self.radius;
        (-q.one_minus_q_sq() * r2).exp() * (1.0 + r2)
    }

    pub fn validate_for(&self, q: EntanglementParam) -> Result<()> {
        if self.tail_estimate(q) < TAIL_BOUND {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                q: q.value(),
                radius: self.radius,
            })
        }
    }

    /// All `(β, weight)` pairs; weights sum to `π R²`.
    pub fn points(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        let m = self.angular_nodes;
        let dtheta = 2.0 * PI / m as f64;
        self.radial_nodes
            .iter()
            .zip(&self.radial_weights)
            .flat_map(move |(&r, &w)| {
                (0..m).map(move |j| (Complex64::from_polar(r, j as f64 * dtheta), w * dtheta))
            })
    }

    /// `∫ f(β) d²β` over the disk.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        self.integrate_vec(1, |beta, acc| acc[0] += f(beta))[0]
    }

    /// Componentwise `∫ f(β) d²β` for a vector-valued integrand of length `len`.
    ///
    /// `f` adds its values into the provided accumulator. Rings are evaluated
    /// in parallel and combined in radial order, so the result does not
    /// depend on the thread count.
    pub fn integrate_vec<F>(&self, len: usize, f: F) -> Vec<f64>
    where
        F: Fn(Complex64, &mut [f64]) + Sync,
    {
        let m = self.angular_nodes;
        let dtheta = 2.0 * PI / m as f64;
        let rings: Vec<Vec<f64>> = self
            .radial_nodes
            .par_iter()
            .zip(self.radial_weights.par_iter())
            .map(|(&r, &w)| {
                let mut ring = vec![0.0; len];
                let mut scratch = vec![0.0; len];
                for j in 0..m {
                    scratch.iter_mut().for_each(|s| *s = 0.0);
                    f(Complex64::from_polar(r, j as f64 * dtheta), &mut scratch);
                    for (acc, s) in ring.iter_mut().zip(&scratch) {
                        *acc += s;
                    }
                }
                ring.iter_mut().for_each(|v| *v *= w * dtheta);
                ring
            })
            .collect();
        let mut total = vec![0.0; len];
        for ring in rings {
            for (t, v) in total.iter_mut().zip(ring) {
                *t += v;
            }
        }
        total
    }

    /// `∫ f(|β|) d²β = 2π ∫ f(r) r dr` for a radially symmetric integrand.
    pub fn integrate_radial<F>(&self, f: F) -> f64
    where
        F: Fn(f64) -> f64,
    {
        2.0 * PI
            * self
                .radial_nodes
                .iter()
                .zip(&self.radial_weights)
                .map(|(&r, &w)| w * f(r))
                .sum::<f64>()
    }
}
