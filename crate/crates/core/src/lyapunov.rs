//! Finite-scale Lyapunov exponents, the avalanche principle, and the
//! convergence and positivity experiments built on them.
//!
//! `L_n(E)` is the phase average of `(1/n)·log‖M_n(x, E)‖`. Sample loops run
//! in parallel; per-sample values are collected in sample order and summed
//! sequentially so the result does not depend on the thread count.

use rand::Rng;
use rayon::prelude::*;

use crate::cocycle::Cocycle;
use crate::dynamics::Phase;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, ScaledProduct};
use crate::sampling::{grid_phase, Sampler};

/// Default avalanche-principle gate constant.
pub const DEFAULT_AP_GATE: f64 = 100.0;
/// Default constant for the `(log N)/N` convergence envelope.
pub const DEFAULT_SCAN_CONSTANT: f64 = 5.0;
/// Default exponent in the positivity probe's initial condition.
pub const DEFAULT_SIGMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub sampler: Sampler,
    /// `mean < −3·stderr`: impossible for exact averages of a unit-determinant
    /// cocycle, so it signals a sampling problem.
    pub negative_flag: bool,
}

/// Mean and standard error (sample standard deviation over `√m`), summed in
/// slice order.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// `log‖M_n(x, E)‖` for every phase, in input order.
pub fn log_norms(cocycle: &Cocycle, e: f64, n: usize, phases: &[Phase]) -> Result<Vec<f64>> {
    phases
        .par_iter()
        .map(|x| Ok(cocycle.transfer_product(x, e, n)?.log_norm()))
        .collect()
}

pub fn finite_lyapunov(
    cocycle: &Cocycle,
    e: f64,
    n: usize,
    sampler: &Sampler,
    m_samples: usize,
) -> Result<LyapunovEstimate> {
    if n == 0 || m_samples == 0 {
        return Err(Error::Domain("finite_lyapunov needs n ≥ 1 and at least one sample".into()));
    }
    let phases = sampler.phases(cocycle.dynamics(), n, m_samples)?;
    let per_sample: Vec<f64> = log_norms(cocycle, e, n, &phases)?
        .into_iter()
        .map(|u| u / n as f64)
        .collect();
    let (mean, stderr) = mean_stderr(&per_sample);
    Ok(LyapunovEstimate {
        n,
        mean,
        stderr,
        samples: m_samples,
        sampler: sampler.clone(),
        negative_flag: mean < -3.0 * stderr,
    })
}

/// Scale-doubling extrapolation `2·L_{2k} − L_k`.
pub fn ap_extrapolate(l_k: f64, l_2k: f64) -> f64 {
    2.0 * l_2k - l_k
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApReport {
    pub n: usize,
    pub mu: f64,
    pub hyp_det_ok: bool,
    pub hyp_large_ok: bool,
    pub hyp_diff_ok: bool,
    /// `|log‖A_n···A_1‖ + Σ_{j=2}^{n−1} log‖A_j‖ − Σ_{j=1}^{n−1} log‖A_{j+1}A_j‖|`
    pub lhs_discrepancy: f64,
    pub bound: f64,
    /// `None` when a hypothesis fails.
    pub passed: Option<bool>,
}

impl ApReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hyp_det_ok && self.hyp_large_ok && self.hyp_diff_ok
    }
}

/// Checks the avalanche-principle hypotheses on `A_1, …, A_n` (in product
/// order, `A_1` applied first) and compares the telescoped log-norm identity
/// against `c_gate · n / μ`.
pub fn avalanche_check(mats: &[Mat2<f64>], mu: f64, c_gate: f64) -> Result<ApReport> {
    let n = mats.len();
    if n < 2 {
        return Err(Error::Domain("avalanche check needs at least two matrices".into()));
    }
    if !mats.iter().all(Mat2::is_finite) {
        return Err(Error::NumericOverflow);
    }
    let singles: Vec<ScaledProduct<f64>> = mats.iter().map(|m| ScaledProduct::from_matrix(*m)).collect();
    let log_single: Vec<f64> = singles.iter().map(ScaledProduct::log_norm).collect();
    let log_pair: Vec<f64> = singles
        .windows(2)
        .map(|w| w[1].compose(&w[0]).log_norm())
        .collect();

    // Computing a·d − b·c loses about ‖A‖²·ε to cancellation.
    let hyp_det_ok = mats
        .iter()
        .all(|m| m.det().abs() <= 1.0 + 1e-12_f64.max(16.0 * f64::EPSILON * m.norm().powi(2)));
    let hyp_large_ok = mu > n as f64 && log_single.iter().all(|&l| l >= mu.ln() - 1e-12);
    let max_cancel = (0..n - 1)
        .map(|j| log_single[j + 1] + log_single[j] - log_pair[j])
        .fold(f64::NEG_INFINITY, f64::max);
    let hyp_diff_ok = max_cancel < 0.5 * mu.ln();

    let mut prod = ScaledProduct::identity();
    for m in &singles {
        prod = m.compose(&prod);
    }
    let inner: f64 = log_single[1..n - 1].iter().sum();
    let pairs: f64 = log_pair.iter().sum();
    let lhs_discrepancy = (prod.log_norm() + inner - pairs).abs();
    let bound = c_gate * n as f64 / mu;
    let hyps = hyp_det_ok && hyp_large_ok && hyp_diff_ok;
    Ok(ApReport {
        n,
        mu,
        hyp_det_ok,
        hyp_large_ok,
        hyp_diff_ok,
        lhs_discrepancy,
        bound,
        passed: hyps.then_some(lhs_discrepancy <= bound),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub n: usize,
    pub l_n: f64,
    pub stderr: f64,
    /// `|L_{2N} − L_N|`
    pub diff: f64,
    /// `(log N)/N`
    pub envelope: f64,
    /// `diff > c_scan · envelope`
    pub flagged: bool,
}

/// `L_N` along a doubling chain together with `|L_{2N} − L_N|` against the
/// `(log N)/N` envelope.
pub fn convergence_scan(
    cocycle: &Cocycle,
    e: f64,
    n_list: &[usize],
    sampler: &Sampler,
    m_samples: usize,
    c_scan: f64,
) -> Result<Vec<ScanRow>> {
    let mut scales: Vec<usize> = n_list.to_vec();
    for w in n_list.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::Domain(format!("scan scales must double: {} then {}", w[0], w[1])));
        }
    }
    match n_list.last() {
        Some(&last) => scales.push(2 * last),
        None => return Ok(Vec::new()),
    }
    let estimates = scales
        .iter()
        .map(|&n| finite_lyapunov(cocycle, e, n, sampler, m_samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(estimates
        .windows(2)
        .map(|w| {
            let n = w[0].n;
            let diff = (w[1].mean - w[0].mean).abs();
            let envelope = (n as f64).ln() / n as f64;
            ScanRow {
                n,
                l_n: w[0].mean,
                stderr: w[0].stderr,
                diff,
                envelope,
                flagged: diff > c_scan * envelope,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityReport {
    pub ell: usize,
    pub sigma: f64,
    /// `sup_x sup_{n ≤ ℓ} (1/n) log‖M_n(x, E)‖` over a 256-point grid.
    pub s: f64,
    pub l_ell: f64,
    pub l_2ell: f64,
    /// `L_ℓ > S·ℓ^{−σ/4}`
    pub cond1: bool,
    /// `L_ℓ − L_{2ℓ} < L_ℓ/8`
    pub cond2: bool,
    /// `L_ℓ/2` when both conditions hold.
    pub predicted_lower_bound: Option<f64>,
}

const SUP_GRID: usize = 256;

/// Largest `(1/n) log‖M_n(x, E)‖` over a 256-point grid and all `n ≤ ℓ`.
pub fn sup_growth(cocycle: &Cocycle, e: f64, ell: usize) -> Result<f64> {
    let d = cocycle.dynamics().dim();
    let per_phase = (0..SUP_GRID)
        .into_par_iter()
        .map(|j| {
            let x = grid_phase(j, SUP_GRID, d);
            let mut p = ScaledProduct::<f64>::identity();
            let mut best = f64::NEG_INFINITY;
            for (k, v) in cocycle.sites(&x)?.take(ell).enumerate() {
                p.push_left(&Mat2::transfer(v - e));
                best = best.max(p.log_norm() / (k + 1) as f64);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_phase.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

pub fn positivity_probe(
    cocycle: &Cocycle,
    e: f64,
    ell: usize,
    sampler: &Sampler,
    m_samples: usize,
    sigma: f64,
) -> Result<PositivityReport> {
    if ell == 0 {
        return Err(Error::Domain("positivity probe needs ℓ ≥ 1".into()));
    }
    let s = sup_growth(cocycle, e, ell)?;
    let l_ell = finite_lyapunov(cocycle, e, ell, sampler, m_samples)?.mean;
    let l_2ell = finite_lyapunov(cocycle, e, 2 * ell, sampler, m_samples)?.mean;
    let cond1 = l_ell > s * (ell as f64).powf(-sigma / 4.0);
    let cond2 = l_ell - l_2ell < l_ell / 8.0;
    Ok(PositivityReport {
        ell,
        sigma,
        s,
        l_ell,
        l_2ell,
        cond1,
        cond2,
        predicted_lower_bound: (cond1 && cond2).then_some(l_ell / 2.0),
    })
}

/// `n` matrices `R(θ_j)·diag(s_j, 1/s_j)·R(φ_j)` with `s_j ∈ [μ, 2μ)` and
/// both angles uniform in `[−width, width]`: unit determinant, norms at
/// least `μ`, and little cancellation between neighbours for small widths.
pub fn hyperbolic_sequence<R: Rng>(rng: &mut R, n: usize, mu: f64, width: f64) -> Vec<Mat2<f64>> {
    (0..n)
        .map(|_| {
            let s = mu * (1.0 + rng.gen::<f64>());
            let theta = rng.gen_range(-width..=width);
            let phi = rng.gen_range(-width..=width);
            Mat2::rotation(theta) * Mat2::diag(s, 1.0 / s) * Mat2::rotation(phi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Dynamics;
    use crate::potential::Potential;

    #[test]
    fn free_operator_has_zero_exponent() {
        let c = Cocycle::new(Potential::constant(0.0, 1.0), Dynamics::rotation(0.3));
        let est = finite_lyapunov(&c, 0.0, 1001, &Sampler::Grid, 8).unwrap();
        assert!(est.mean.abs() < 1e-12);
    }

    #[test]
    fn constant_potential_closed_form() {
        let c = Cocycle::new(Potential::constant(10.0, 1.0), Dynamics::rotation(0.3));
        let expected = ((10.0 + 96f64.sqrt()) / 2.0).ln();
        let est = finite_lyapunov(&c, 0.0, 20_000, &Sampler::Random(1), 4).unwrap();
        // (1/n)·log‖A^n‖ = log ρ + O(1/n)
        assert!((est.mean - expected).abs() < 1e-3, "{} vs {expected}", est.mean);
    }

    #[test]
    fn extrapolation() {
        assert_eq!(ap_extrapolate(0.37, 0.37), 0.37);
        assert!((ap_extrapolate(1.0, 0.9) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn adjacent_cancellation_breaks_diff_hypothesis() {
        let a = Mat2::rotation(0.2) * Mat2::diag(50.0, 0.02);
        let mats = vec![a, a.inverse(), a];
        let r = avalanche_check(&mats, 40.0, DEFAULT_AP_GATE).unwrap();
        assert!(!r.hyp_diff_ok);
        assert_eq!(r.passed, None);
    }

    #[test]
    fn scan_needs_doubling_chain() {
        let c = Cocycle::new(Potential::constant(0.0, 1.0), Dynamics::rotation(0.3));
        assert!(convergence_scan(&c, 0.0, &[10, 30], &Sampler::Grid, 2, 5.0).is_err());
    }

    #[test]
    fn free_positivity_fails() {
        let c = Cocycle::new(Potential::almost_mathieu(0.0), Dynamics::rotation(0.3));
        let r = positivity_probe(&c, 0.0, 20, &Sampler::Grid, 16, DEFAULT_SIGMA).unwrap();
        assert!(!r.cond1);
        assert_eq!(r.predicted_lower_bound, None);
    }
}
