use ndarray::Array2;
use num_complex::Complex64;

use super::{ln_factorials, FockCutoff, ModeOperator};

/// Matrix of the displacement operator `D(α) = exp(α â† − α* â)` on the
/// truncated basis.
///
/// Entries are the exact infinite-dimensional matrix elements restricted to
/// levels `0..=n_max`, so the result is unitary only away from the cutoff.
/// For `m ≥ n`
///
/// ```text
/// ⟨m|D(α)|n⟩ = e^{−|α|²/2} √(n!/m!) α^{m−n} L_n^{(m−n)}(|α|²)
/// ```
///
/// while for `m < n` the roles of `m` and `n` swap and `α^{m−n}` becomes
/// `(−α*)^{n−m}`. Along each diagonal `d = m − n` the Laguerre
/// recurrence is run on the prefactor-scaled values, so no factorial ratios
/// are formed and nothing overflows even for large cutoffs.
pub fn displacement_matrix(alpha: Complex64, cutoff: FockCutoff) -> ModeOperator {
    if alpha == Complex64::default() {
        return ModeOperator::identity(cutoff);
    }
    ModeOperator::from_raw(
        displacement_block(alpha, cutoff.dim(), cutoff.dim()),
        cutoff,
    )
}

/// Rectangular block `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`.
///
/// Costs `O(min(rows, cols) · (rows + cols))`, so a few output levels can be
/// paired with a long run of intermediate levels cheaply.
pub fn displacement_block(alpha: Complex64, rows: usize, cols: usize) -> Array2<Complex64> {
    let mut m = Array2::<Complex64>::zeros((rows, cols));
    if rows == 0 || cols == 0 {
        return m;
    }
    if alpha == Complex64::default() {
        for k in 0..rows.min(cols) {
            m[[k, k]] = Complex64::new(1.0, 0.0);
        }
        return m;
    }
    let (r, theta) = alpha.to_polar();
    let x = r * r;
    let ln_r = r.ln();
    let lf = ln_factorials(rows.max(cols));
    let lower_phase = Complex64::from_polar(1.0, theta);
    // −α*/|α|
    let upper_phase = -Complex64::from_polar(1.0, -theta);

    let mut diag = Vec::with_capacity(rows.min(cols));
    for d in 0..rows.max(cols) {
        // lower: (k + d, k); upper: (k, k + d)
        let lower_len = if d < rows { (rows - d).min(cols) } else { 0 };
        let upper_len = if d > 0 && d < cols {
            (cols - d).min(rows)
        } else {
            0
        };
        scaled_laguerre_diagonal(d, lower_len.max(upper_len), x, ln_r, lf[d], &mut diag);
        let lower = lower_phase.powu(d as u32);
        let upper = upper_phase.powu(d as u32);
        for (k, g) in diag.iter().take(lower_len).enumerate() {
            m[[k + d, k]] = lower * g;
        }
        for (k, g) in diag.iter().take(upper_len).enumerate() {
            m[[k, k + d]] = upper * g;
        }
    }
    m
}

/// Fills `out` with `g_k = e^{−x/2} √(k!/(k+d)!) r^d L_k^{(d)}(x)` for `k < len`.
fn scaled_laguerre_diagonal(
    d: usize,
    len: usize,
    x: f64,
    ln_r: f64,
    ln_d_fact: f64,
    out: &mut Vec<f64>,
) {
    out.clear();
    if len == 0 {
        return;
    }
    let df = d as f64;
    // ρ_k = s_{k+1}/s_k = √((k+1)/(k+1+d))
    let rho = |k: f64| ((k + 1.0) / (k + 1.0 + df)).sqrt();
    let g0 = (-0.5 * x + df * ln_r - 0.5 * ln_d_fact).exp();
    out.push(g0);
    if len == 1 {
        return;
    }
    out.push(rho(0.0) * (1.0 + df - x) * g0);
    for k in 1..len - 1 {
        let kf = k as f64;
        let rk = rho(kf);
        let next = ((2.0 * kf + 1.0 + df - x) * rk * out[k]
            - (kf + df) * rk * rho(kf - 1.0) * out[k - 1])
            / (kf + 1.0);
        out.push(next);
    }
}
