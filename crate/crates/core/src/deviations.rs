//! Empirical deviation statistics for `u_n(x) = log‖M_n(x, E)‖` and
//! `log|f_n(x, E)|`: deviation measures, a dyadic BMO proxy, Fourier
//! coefficients, and deviations of sums of shifts.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::cocycle::Cocycle;
use crate::dynamics::{frac, Phase};
use crate::error::{Error, Result};
use crate::lyapunov::{log_norms, mean_stderr};
use crate::sampling::Sampler;
use crate::spectrum::log_dets;

/// Default constant in the BMO splitting bound.
pub const DEFAULT_C_RHO: f64 = 10.0;
/// Smallest dyadic interval used by [`bmo_estimate`].
pub const BMO_MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    /// `log‖M_n(x, E)‖`
    TransferNorm,
    /// `log|f_n(x, E)|`
    Det,
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::TransferNorm => "transfer_norm",
            Statistic::Det => "det",
        }
    }
}

/// `u(x)` for each phase, in input order.
pub fn sample_statistic(cocycle: &Cocycle, e: f64, n: usize, phases: &[Phase], statistic: Statistic) -> Result<Vec<f64>> {
    match statistic {
        Statistic::TransferNorm => log_norms(cocycle, e, n, phases),
        Statistic::Det => log_dets(cocycle, e, n, phases),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationProfile {
    pub n: usize,
    pub threshold: f64,
    pub measure: f64,
    pub x_samples: usize,
    pub statistic: Statistic,
    /// Sample mean of `u`, i.e. `n·L̂_n` for the transfer-norm statistic.
    pub mean: f64,
}

/// Fraction of `values` with `|u − mean(u)| > threshold`, and the mean.
pub fn deviation_fraction(values: &[f64], threshold: f64) -> (f64, f64) {
    let (mean, _) = mean_stderr(values);
    let hits = values.iter().filter(|&&u| (u - mean).abs() > threshold).count();
    (hits as f64 / values.len().max(1) as f64, mean)
}

/// Empirical measure of `{x : |u_n(x) − n·L̂_n| > threshold}` where `L̂_n` is
/// the mean over the same samples.
pub fn deviation_measure(
    cocycle: &Cocycle,
    e: f64,
    n: usize,
    threshold: f64,
    sampler: &Sampler,
    x_samples: usize,
    statistic: Statistic,
) -> Result<DeviationProfile> {
    if threshold <= 0.0 {
        return Err(Error::Domain("deviation threshold must be positive".into()));
    }
    let phases = sampler.phases(cocycle.dynamics(), n, x_samples)?;
    let values = sample_statistic(cocycle, e, n, &phases, statistic)?;
    let (measure, mean) = deviation_fraction(&values, threshold);
    Ok(DeviationProfile {
        n,
        threshold,
        measure,
        x_samples,
        statistic,
        mean,
    })
}

/// `⟨log|f_n|⟩ − ⟨log‖M_n‖⟩` over the same phases.
pub fn det_mean_gap(cocycle: &Cocycle, e: f64, n: usize, sampler: &Sampler, m: usize) -> Result<f64> {
    let phases = sampler.phases(cocycle.dynamics(), n, m)?;
    let (det_mean, _) = mean_stderr(&log_dets(cocycle, e, n, &phases)?);
    let (norm_mean, _) = mean_stderr(&log_norms(cocycle, e, n, &phases)?);
    Ok(det_mean - norm_mean)
}

/// Values of a function on the uniform grid `x_j = (j + offset)/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    offset: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, offset: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty grid".into()));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(format!("grid value {j}")));
        }
        Ok(Self { offset, values })
    }

    pub fn sample(m: usize, offset: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..m).map(|j| f((j as f64 + offset) / m as f64)).collect(), offset)
    }

    /// `u = statistic(·, E)` at `n` on the grid, evaluated in parallel.
    pub fn from_statistic(cocycle: &Cocycle, e: f64, n: usize, m: usize, offset: f64, statistic: Statistic) -> Result<Self> {
        let phases: Vec<Phase> = (0..m).map(|j| Phase::circle((j as f64 + offset) / m as f64)).collect();
        Self::new(sample_statistic(cocycle, e, n, &phases, statistic)?, offset)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Periodic piecewise-linear interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let m = self.values.len();
        let t = frac(x) * m as f64 - self.offset;
        let i = t.floor();
        let w = t - i;
        let i0 = (i as i64).rem_euclid(m as i64) as usize;
        let i1 = (i0 + 1) % m;
        (1.0 - w) * self.values[i0] + w * self.values[i1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BmoEstimate {
    pub value: f64,
    pub grid_size: usize,
    /// Deepest dyadic level used; level `ℓ` has `2^ℓ` intervals.
    pub max_interval_level: usize,
}

/// Maximum over dyadic subintervals (down to 8 points) of the mean absolute
/// deviation from the interval mean.
pub fn bmo_estimate(values: &[f64]) -> Result<BmoEstimate> {
    let m = values.len();
    if m < 256 || !m.is_power_of_two() {
        return Err(Error::Domain(format!("BMO grid size must be a power of two ≥ 256, got {m}")));
    }
    let max_level = (m / BMO_MIN_POINTS).trailing_zeros() as usize;
    let mut value = 0.0_f64;
    for level in 0..=max_level {
        let width = m >> level;
        for chunk in values.chunks(width) {
            let mean = chunk.iter().sum::<f64>() / width as f64;
            let osc = chunk.iter().map(|u| (u - mean).abs()).sum::<f64>() / width as f64;
            value = value.max(osc);
        }
    }
    Ok(BmoEstimate {
        value,
        grid_size: m,
        max_interval_level: max_level,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub nu: i64,
    pub modulus: f64,
    /// `|û(ν)|·|ν|/n`
    pub ratio: f64,
}

/// Moduli of the discrete Fourier coefficients
/// `û(ν) = (1/M)Σ_j u(x_j)e(−νx_j)` for `|ν| ≤ K`, with the decay ratio
/// against `n/|ν|`. The grid offset only rotates phases.
pub fn fourier_decay(values: &[f64], k: usize, n: f64) -> Result<Vec<FourierMode>> {
    let m = values.len();
    if m < 2 * k + 2 {
        return Err(Error::Domain(format!("grid of {m} points too coarse for {k} modes")));
    }
    let mut spectrum: Vec<Complex64> = values.iter().map(|&u| Complex64::new(u, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut spectrum);
    let k = k as i64;
    Ok((-k..=k)
        .map(|nu| {
            let modulus = spectrum[nu.rem_euclid(m as i64) as usize].norm() / m as f64;
            FourierMode {
                nu,
                modulus,
                ratio: modulus * nu.unsigned_abs() as f64 / n,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSumDeviation {
    pub delta: f64,
    /// Fraction of phases with `|Σ_{k=1}^n u(x − kω) − n⟨u⟩| > δn`.
    pub measure: f64,
    /// Largest observed `|Σ u(x − kω) − n⟨u⟩|`.
    pub max_deviation: f64,
}

/// Deviations of `Σ_{k=1}^n u(x − kω)` from `n⟨u⟩` over the given phases.
pub fn shift_sum_deviation(u: &GridFunction, omega: f64, n: usize, phases: &[f64], deltas: &[f64]) -> Vec<ShiftSumDeviation> {
    let mean = u.mean();
    let devs: Vec<f64> = phases
        .par_iter()
        .map(|&x| {
            let s: f64 = (1..=n).map(|k| u.eval(x - frac(k as f64 * omega))).sum();
            (s - n as f64 * mean).abs()
        })
        .collect();
    let max_deviation = devs.iter().cloned().fold(0.0, f64::max);
    deltas
        .iter()
        .map(|&delta| ShiftSumDeviation {
            delta,
            measure: devs.iter().filter(|&&d| d > delta * n as f64).count() as f64 / devs.len().max(1) as f64,
            max_deviation,
        })
        .collect()
}

/// `C_ρ·(ε0 + √(N·ε1))`
pub fn split_bound(eps0: f64, eps1: f64, n_riesz: f64, c_rho: f64) -> Result<f64> {
    if eps0 < 0.0 || eps1 < 0.0 || n_riesz < 0.0 {
        return Err(Error::Domain("splitting parameters must be nonnegative".into()));
    }
    Ok(c_rho * (eps0 + (n_riesz * eps1).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Dynamics;
    use crate::potential::Potential;

    #[test]
    fn constant_potential_has_no_deviation() {
        let c = Cocycle::new(Potential::constant(1.0, 3.0), Dynamics::rotation(0.3));
        for stat in [Statistic::TransferNorm, Statistic::Det] {
            let p = deviation_measure(&c, 0.2, 50, 1e-9, &Sampler::Random(1), 100, stat).unwrap();
            assert_eq!(p.measure, 0.0);
        }
    }

    #[test]
    fn bmo_basics() {
        assert_eq!(bmo_estimate(&[2.5; 256]).unwrap().value, 0.0);
        let step: Vec<f64> = (0..512).map(|j| if j < 256 { 3.0 } else { 0.0 }).collect();
        let b = bmo_estimate(&step).unwrap();
        assert_eq!(b.value, 1.5);
        assert_eq!(b.max_interval_level, 6);
        assert!(bmo_estimate(&[0.0; 100]).is_err());
        assert!(bmo_estimate(&[0.0; 128]).is_err());
    }

    #[test]
    fn cosine_fourier_modes() {
        let g = GridFunction::sample(64, 0.0, |x| (2.0 * std::f64::consts::PI * x).cos()).unwrap();
        let modes = fourier_decay(g.values(), 5, 1.0).unwrap();
        for m in modes {
            let expect = if m.nu.abs() == 1 { 0.5 } else { 0.0 };
            assert!((m.modulus - expect).abs() < 1e-14, "{m:?}");
        }
        assert!(fourier_decay(&[0.0; 10], 5, 1.0).is_err());
    }

    #[test]
    fn interpolation_is_periodic() {
        let g = GridFunction::new(vec![0.0, 1.0, 2.0, 3.0], 0.0).unwrap();
        assert_eq!(g.eval(0.125), 0.5);
        assert_eq!(g.eval(0.875), 1.5);
        assert_eq!(g.eval(1.25), 1.0);
    }

    #[test]
    fn split_bound_examples() {
        assert_eq!(split_bound(0.0, 0.0, 5.0, DEFAULT_C_RHO).unwrap(), 0.0);
        assert_eq!(split_bound(0.1, 0.0, 7.0, DEFAULT_C_RHO).unwrap(), 1.0);
        assert!(split_bound(-0.1, 0.0, 7.0, DEFAULT_C_RHO).is_err());
    }

    #[test]
    fn constant_shift_sums() {
        let g = GridFunction::new(vec![4.0; 32], 0.5).unwrap();
        let d = shift_sum_deviation(&g, 0.3, 20, &[0.1, 0.7], &[1e-12]);
        assert_eq!(d[0].measure, 0.0);
        assert!(d[0].max_deviation < 1e-12);
    }
}
