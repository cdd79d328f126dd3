//! Finite-size scaling of the half-chain entropy of Krawtchouk chains.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::chain::{krawtchouk_chain, KrawtchoukParams};
use crate::correlation::{entropy_profile, FillingRule, Route};
use crate::error::{invalid, Result};

/// Smallest number of sizes accepted by [`fit_scaling`].
pub const MIN_FIT_POINTS: usize = 5;
/// Required ratio between the largest and smallest N + 1 in a fit.
pub const MIN_GRID_SPAN: f64 = 10.0;

/// Period parameter of the oscillating correction,
/// m(p) = ½(1 − ln p + (1 − ln 2)/(2p)).
pub fn m_of_p(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return invalid(format!("p must lie in (0, 1), got {p}"));
    }
    Ok(0.5 * (1.0 - p.ln() + (1.0 - LN_2) / (2.0 * p)))
}

/// Signed finite-size correction −cos(π(N+1)/(2m)) / (2(N+1) sin(π/(2m))).
pub fn oscillatory_term(n: usize, m: f64) -> f64 {
    let sites = (n + 1) as f64;
    -(PI * sites / (2.0 * m)).cos() / (2.0 * sites * (PI / (2.0 * m)).sin())
}

fn log_size(n: usize) -> f64 {
    ((n + 1) as f64 / 2.0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    /// Largest site index; the chain has N + 1 sites.
    pub n: usize,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub p: f64,
    pub log_coefficient: f64,
    /// Non-universal constant a(p).
    pub constant: f64,
    pub m_p: f64,
    /// Measured minus fitted model, in input order.
    pub residuals: Vec<f64>,
    pub rms: f64,
    pub n_points: usize,
    pub n_range: (usize, usize),
}

impl ScalingFit {
    /// c·ln((N+1)/2) + a, without the oscillating term.
    pub fn smooth_part(&self, n: usize) -> f64 {
        self.log_coefficient * log_size(n) + self.constant
    }

    pub fn model(&self, n: usize) -> f64 {
        self.smooth_part(n) + oscillatory_term(n, self.m_p)
    }
}

/// Least squares for S(N) = c·ln((N+1)/2) + a + oscillatory_term(N) with the
/// correction amplitude and m(p) held fixed.
pub fn fit_scaling(points: &[ScalingPoint], p: f64) -> Result<ScalingFit> {
    let m = m_of_p(p)?;
    if points.len() < MIN_FIT_POINTS {
        return invalid(format!("need at least {MIN_FIT_POINTS} sizes, got {}", points.len()));
    }
    let mut sizes: Vec<usize> = points.iter().map(|q| q.n).collect();
    sizes.sort_unstable();
    if sizes.windows(2).any(|w| w[0] == w[1]) {
        return invalid("duplicate chain sizes in fit input");
    }
    let (lo, hi) = (sizes[0], sizes[sizes.len() - 1]);
    if ((hi + 1) as f64) < MIN_GRID_SPAN * (lo + 1) as f64 {
        return invalid(format!("N + 1 must span a factor {MIN_GRID_SPAN}, got {}..{}", lo + 1, hi + 1));
    }
    if let Some(q) = points.iter().find(|q| !q.entropy.is_finite()) {
        return invalid(format!("non-finite entropy at N = {}", q.n));
    }
    let count = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|q| log_size(q.n)).collect();
    let ys: Vec<f64> = points.iter().map(|q| q.entropy - oscillatory_term(q.n, m)).collect();
    let x_mean = xs.iter().sum::<f64>() / count;
    let y_mean = ys.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residuals: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - slope * x - intercept).collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / count).sqrt();
    Ok(ScalingFit {
        p,
        log_coefficient: slope,
        constant: intercept,
        m_p: m,
        residuals,
        rms,
        n_points: points.len(),
        n_range: (lo, hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionRow {
    pub n: usize,
    /// Measured entropy minus the fitted smooth part.
    pub residual: f64,
    /// Closed-form oscillating term.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    pub rows: Vec<CorrectionRow>,
    /// Pearson correlation between residual and prediction; NaN when either
    /// column is constant.
    pub correlation: f64,
}

impl CorrectionTable {
    pub const CSV_HEADER: &'static str = "N,residual,predicted";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", r.n, r.residual, r.predicted));
        }
        out
    }
}

pub fn correction_residual(points: &[ScalingPoint], fit: &ScalingFit) -> CorrectionTable {
    let rows: Vec<CorrectionRow> = points
        .iter()
        .map(|q| CorrectionRow {
            n: q.n,
            residual: q.entropy - fit.smooth_part(q.n),
            predicted: oscillatory_term(q.n, fit.m_p),
        })
        .collect();
    let correlation = pearson(
        &rows.iter().map(|r| r.residual).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.predicted).collect::<Vec<_>>(),
    );
    CorrectionTable { rows, correlation }
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Entropies generated exactly from the scaling model.
pub fn synthetic_points(sizes: &[usize], p: f64, log_coefficient: f64, constant: f64) -> Result<Vec<ScalingPoint>> {
    let m = m_of_p(p)?;
    Ok(sizes
        .iter()
        .map(|&n| ScalingPoint {
            n,
            entropy: log_coefficient * log_size(n) + constant + oscillatory_term(n, m),
        })
        .collect())
}

/// Index ⌊(N−1)/2⌋ used for both the cut and the Fermi level.
pub fn half_index(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

/// Entropy of sites 0..=⌊(N−1)/2⌋ with levels 0..=⌊(N−1)/2⌋ occupied.
pub fn half_chain_entropy(n: usize, p: f64) -> Result<f64> {
    if n % 2 == 0 {
        return invalid(format!("half-chain sizes need an even site count, got N = {n}"));
    }
    let params = KrawtchoukParams::new(n, p)?;
    let spec = krawtchouk_chain(&params);
    let h = half_index(n);
    let rows = entropy_profile(&spec, FillingRule::FermiIndex(h), h..=h, &Route::Direct)?;
    Ok(rows[0].entropy)
}

/// Half-chain entropies over a grid of odd N, computed in parallel and
/// returned in grid order.
pub fn half_chain_profile(sizes: &[usize], p: f64) -> Result<Vec<ScalingPoint>> {
    sizes
        .par_iter()
        .map(|&n| half_chain_entropy(n, p).map(|entropy| ScalingPoint { n, entropy }))
        .collect()
}
