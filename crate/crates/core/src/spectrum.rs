//! Finite-volume Hamiltonians `H_{[a,b]}(x)` (diagonal `λV`, off-diagonal
//! `−1`, Dirichlet boundary), Sturm-sequence eigenvalue counting and
//! bisection, the integrated density of states, and the spectral diagnostics
//! built on top: eigenvalue windows, Wegner-type measures, gaps,
//! Hellmann–Feynman derivatives, and concatenation-term bounds.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::cocycle::{Cocycle, DetRecurrence, FirstSite};
use crate::dynamics::Phase;
use crate::error::{Error, Result};
use crate::linalg::{solve_dense, solve_tridiagonal, Mat2, ScaledProduct, SignedLog};
use crate::lyapunov::{finite_lyapunov, mean_stderr};
use crate::sampling::{random_phase, stream, Sampler};

/// Default exponent for the `e^{−N^δ}` gap reference line.
pub const DEFAULT_GAP_DELTA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    diag: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }

    /// `H_{[1,n]}(x)`.
    pub fn from_cocycle(cocycle: &Cocycle, x: &Phase, n: usize) -> Result<Self> {
        Self::window(cocycle, x, 1, n)
    }

    /// `H_{[a,b]}(x)`.
    pub fn window(cocycle: &Cocycle, x: &Phase, a: usize, b: usize) -> Result<Self> {
        Ok(Self::new(cocycle.site_values(x, a, b)?))
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Upper bound `max|d| + 2` for `‖H‖`.
    pub fn norm_bound(&self) -> f64 {
        self.diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())) + 2.0
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo - 2.0, hi + 2.0)
    }

    /// `#{eigenvalues < E}` from the signs of the pivots
    /// `p_k = (d_k − E) − 1/p_{k−1}`. A zero pivot is replaced by
    /// `+‖H‖·2^{−52}`, i.e. it is counted as lying at `E − 0`.
    pub fn sturm_count(&self, e: f64) -> usize {
        let tiny = self.norm_bound() * f64::EPSILON;
        let mut count = 0;
        let mut p = 1.0;
        for (k, &d) in self.diag.iter().enumerate() {
            p = if k == 0 { d - e } else { (d - e) - 1.0 / p };
            if p == 0.0 {
                p = tiny;
            }
            if p < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to width `tol` or
    /// to floating-point resolution.
    pub fn eigenvalue(&self, k: usize, tol: f64) -> f64 {
        let (lo, hi) = self.gershgorin();
        self.bisect(k, lo - 1.0, hi + 1.0, tol)
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= tol || mid <= lo || mid >= hi {
                return mid;
            }
            if self.sturm_count(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Sorted eigenvalues in `[lo, hi)` (the Gershgorin interval when
    /// `window` is `None`), each bracketed to width `tol`.
    pub fn eigenvalues(&self, window: Option<(f64, f64)>, tol: f64) -> Vec<f64> {
        let (lo, hi) = window.unwrap_or_else(|| {
            let (a, b) = self.gershgorin();
            (a - 1.0, b + 1.0)
        });
        if hi <= lo {
            return Vec::new();
        }
        let (first, last) = (self.sturm_count(lo), self.sturm_count(hi));
        (first..last).map(|k| self.bisect(k, lo, hi, tol)).collect()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s -= v[i - 1];
                }
                if i + 1 < n {
                    s -= v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Eigenvector for the eigenvalue `e_j` (known to within `tol`) by
    /// inverse iteration, together with the determinant-formula vector
    /// `ψ(n) ∝ f_{[1,n−1]}(E_j)` as a cross-check.
    pub fn eigenvector(&self, e_j: f64, tol: f64) -> Result<EigPair> {
        let n = self.len();
        let gap = 10.0 * tol;
        let nearby = self.sturm_count(e_j + gap) - self.sturm_count(e_j - gap);
        if nearby > 1 {
            return Err(Error::AmbiguousEigenvalue { energy: e_j, gap });
        }
        if nearby == 0 {
            return Err(Error::Domain(format!("{e_j} is not within {gap:e} of an eigenvalue")));
        }
        let tiny = self.norm_bound() * f64::EPSILON;
        let shifted: Vec<f64> = self.diag.iter().map(|d| d - e_j).collect();
        let off = vec![-1.0; n.saturating_sub(1)];
        let mut rng = stream(n as u64, "inverse_iteration", 0);
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        normalize(&mut v);
        for _ in 0..3 {
            v = solve_tridiagonal(&off, &shifted, &off, &v, tiny);
            normalize(&mut v);
        }
        // sign convention: largest component positive
        let imax = (0..n).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
        if n > 0 && v[imax] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }

        let mut rec = DetRecurrence::<f64>::new();
        let mut dets = Vec::with_capacity(n);
        for &d in &self.diag {
            dets.push(rec.current());
            rec.step(d - e_j);
        }
        let det_vector = normalized_from_logs(&dets);
        let overlap: f64 = v.iter().zip(&det_vector).map(|(a, b)| a * b).sum();
        let residual = {
            let hv = self.apply(&v);
            hv.iter().zip(&v).map(|(h, c)| (h - e_j * c).powi(2)).sum::<f64>().sqrt()
        };
        Ok(EigPair {
            value: e_j,
            vector: v,
            det_vector,
            collinearity_defect: 1.0 - overlap.abs(),
            residual,
        })
    }

    /// Distance from `e` to the spectrum, resolved to `resolution`.
    pub fn distance_to_spectrum(&self, e: f64, resolution: f64) -> f64 {
        let n = self.len();
        if n == 0 {
            return f64::INFINITY;
        }
        let k = self.sturm_count(e);
        let (lo, hi) = self.gershgorin();
        let mut best = f64::INFINITY;
        if k > 0 {
            best = best.min(e - self.bisect(k - 1, lo - 1.0, e, resolution));
        }
        if k < n {
            best = best.min(self.bisect(k, e, hi + 1.0, resolution) - e);
        }
        best.max(0.0)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = -1.0;
                m[i + 1][i] = -1.0;
            }
        }
        m
    }
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if s > 0.0 {
        v.iter_mut().for_each(|c| *c /= s);
    }
}

fn normalized_from_logs(values: &[SignedLog<f64>]) -> Vec<f64> {
    let top = values.iter().map(|s| s.log_mag).fold(f64::NEG_INFINITY, f64::max);
    let mut v: Vec<f64> = values.iter().map(|s| s.mul_exp(-top).value()).collect();
    normalize(&mut v);
    let imax = (0..v.len()).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0);
    if !v.is_empty() && v[imax] < 0.0 {
        v.iter_mut().for_each(|c| *c = -*c);
    }
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigPair {
    pub value: f64,
    /// Unit eigenvector from inverse iteration.
    pub vector: Vec<f64>,
    /// Normalized `(f_{[1,n−1]}(E))_n`; accurate only while the recurrence
    /// does not amplify the eigenvalue error (delocalized regime).
    pub det_vector: Vec<f64>,
    /// `1 − |⟨vector, det_vector⟩|`.
    pub collinearity_defect: f64,
    /// `‖Hψ − Eψ‖`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdsTable {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub n: usize,
    pub x_samples: usize,
}

fn sample_phases(cocycle: &Cocycle, label: &str, seed: u64, count: usize) -> Vec<Phase> {
    let d = cocycle.dynamics().dim();
    (0..count)
        .map(|j| random_phase(&mut stream(seed, label, j as u64), d))
        .collect()
}

/// Phase-averaged normalized eigenvalue counts `#{E_j < E}/N`.
pub fn ids(cocycle: &Cocycle, energies: &[f64], n: usize, x_samples: usize, seed: u64) -> Result<IdsTable> {
    if energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("IDS energy grid must be sorted".into()));
    }
    let phases = sample_phases(cocycle, "ids", seed, x_samples);
    let counts = phases
        .par_iter()
        .map(|x| {
            let h = TridiagonalHamiltonian::from_cocycle(cocycle, x, n)?;
            Ok(energies.iter().map(|&e| h.sturm_count(e)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    let values = (0..energies.len())
        .map(|i| counts.iter().map(|c| c[i] as f64).sum::<f64>() / (x_samples * n) as f64)
        .collect();
    Ok(IdsTable {
        energies: energies.to_vec(),
        values,
        n,
        x_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCount {
    /// Phase average of `#(sp H_N(x) ∩ (E − η, E + η))`.
    pub mean: f64,
    /// `η·N`, the Lipschitz reference scale.
    pub eta_n: f64,
}

pub fn window_count(
    cocycle: &Cocycle,
    e: f64,
    eta: f64,
    n: usize,
    x_samples: usize,
    seed: u64,
) -> Result<WindowCount> {
    if eta <= 0.0 {
        return Err(Error::Domain("window half-width must be positive".into()));
    }
    let phases = sample_phases(cocycle, "window_count", seed, x_samples);
    let counts = phases
        .par_iter()
        .map(|x| {
            let h = TridiagonalHamiltonian::from_cocycle(cocycle, x, n)?;
            Ok((h.sturm_count(e + eta) - h.sturm_count(e - eta)) as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(WindowCount {
        mean: counts.iter().sum::<f64>() / x_samples as f64,
        eta_n: eta * n as f64,
    })
}

/// Fraction of sampled phases with `dist(sp H_N(x), E) < exp(−h_param)`.
pub fn wegner_measure(
    cocycle: &Cocycle,
    e: f64,
    h_param: f64,
    n: usize,
    x_samples: usize,
    seed: u64,
) -> Result<f64> {
    if h_param < 1.0 {
        return Err(Error::Domain("Wegner exponent must be at least 1".into()));
    }
    let radius = (-h_param).exp();
    let phases = sample_phases(cocycle, "wegner", seed, x_samples);
    let hits = phases
        .par_iter()
        .map(|x| {
            let h = TridiagonalHamiltonian::from_cocycle(cocycle, x, n)?;
            Ok(h.distance_to_spectrum(e, radius / 10.0) < radius)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(hits.iter().filter(|&&b| b).count() as f64 / x_samples as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinGapReport {
    /// Smallest spacing of consecutive eigenvalues; `+∞` with fewer than two.
    pub min_gap: f64,
    pub delta: f64,
    /// `log` of the reference line `e^{−N^δ}`, i.e. `−N^δ`.
    pub log_threshold: f64,
    pub above_threshold: bool,
}

pub fn min_gap(
    cocycle: &Cocycle,
    x: &Phase,
    n: usize,
    window: Option<(f64, f64)>,
    delta: f64,
) -> Result<MinGapReport> {
    let h = TridiagonalHamiltonian::from_cocycle(cocycle, x, n)?;
    let ev = h.eigenvalues(window, 0.0);
    let min_gap = ev.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let log_threshold = -(n as f64).powf(delta);
    Ok(MinGapReport {
        min_gap,
        delta,
        log_threshold,
        above_threshold: min_gap.ln() > log_threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HellmannFeynman {
    pub energy: f64,
    /// `Σ_k λV′(x_k)|ψ_j(k)|²` over the sites of `H_{[1,N]}(x)`.
    pub analytic: f64,
    /// Central difference of `E_j(x)` with step `1e-6`.
    pub fd: f64,
}

const HF_STEP: f64 = 1e-6;
const HF_MIN_GAP: f64 = 1e-8;

/// Derivative of the `j`-th eigenvalue (0-based) of `H_{[1,N]}(x)` in the
/// phase, analytically and by finite differences. Circle shifts only.
pub fn hellmann_feynman(cocycle: &Cocycle, x: f64, j: usize, n: usize) -> Result<HellmannFeynman> {
    let omega = cocycle.dynamics().circle_frequency()?;
    if j >= n {
        return Err(Error::Domain(format!("eigenvalue index {j} out of range for N = {n}")));
    }
    let eig = |x: f64| -> Result<f64> {
        let h = TridiagonalHamiltonian::from_cocycle(cocycle, &Phase::circle(x), n)?;
        Ok(h.eigenvalue(j, 0.0))
    };
    let h = TridiagonalHamiltonian::from_cocycle(cocycle, &Phase::circle(x), n)?;
    let e_j = h.eigenvalue(j, 0.0);
    let below = if j > 0 { e_j - h.eigenvalue(j - 1, 0.0) } else { f64::INFINITY };
    let above = if j + 1 < n { h.eigenvalue(j + 1, 0.0) - e_j } else { f64::INFINITY };
    if below.min(above) < HF_MIN_GAP {
        return Err(Error::AmbiguousEigenvalue {
            energy: e_j,
            gap: below.min(above),
        });
    }
    let pair = h.eigenvector(e_j, 1e-13)?;
    let offset = match cocycle.first_site() {
        FirstSite::Tx => 1.0,
        FirstSite::X => 0.0,
    };
    let p = cocycle.potential();
    let mut analytic = 0.0;
    for (k, psi) in pair.vector.iter().enumerate() {
        analytic += p.derivative(x + (k as f64 + offset) * omega)? * psi * psi;
    }
    let fd = (eig(x + HF_STEP)? - eig(x - HF_STEP)?) / (2.0 * HF_STEP);
    Ok(HellmannFeynman {
        energy: e_j,
        analytic,
        fd,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventCheck {
    /// `Σ_k |((A − z)^{−1} e_k, e_k)|²`
    pub lhs: f64,
    /// `Σ_j (Σ_k |(e_k, Ψ_j)|⁴)·(Im (E_j − z)^{−1})²`
    pub rhs: f64,
}

impl ResolventCheck {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs * (1.0 - 1e-10)
    }
}

/// Lower bound on the squared diagonal resolvent in any orthonormal basis
/// `basis` through the inverse participation ratios of the eigenvectors.
/// The left side is computed by dense solves against `a`.
pub fn resolvent_ipr_check(
    a: &[Vec<Complex64>],
    eigenvalues: &[f64],
    eigenvectors: &[Vec<Complex64>],
    basis: &[Vec<Complex64>],
    e: f64,
    eta: f64,
) -> Result<ResolventCheck> {
    let z = Complex64::new(e, eta);
    let n = a.len();
    let shifted: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { a[i][j] - z } else { a[i][j] }).collect())
        .collect();
    let mut lhs = 0.0;
    for ek in basis {
        let y = solve_dense(&shifted, ek)?;
        let diag: Complex64 = y.iter().zip(ek).map(|(yi, ei)| yi * ei.conj()).sum();
        lhs += diag.norm_sqr();
    }
    let rhs = eigenvalues
        .iter()
        .zip(eigenvectors)
        .map(|(&ej, psi)| {
            let ipr: f64 = basis
                .iter()
                .map(|ek| {
                    let c: Complex64 = ek.iter().zip(psi).map(|(a, b)| a * b.conj()).sum();
                    c.norm_sqr().powi(2)
                })
                .sum();
            let im = (Complex64::from(ej) - z).inv().im;
            ipr * im * im
        })
        .sum();
    Ok(ResolventCheck { lhs, rhs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcatenationReport {
    /// `log W_{N,k}` for `k = 1..=N`.
    pub log_w: Vec<f64>,
    /// `4η·Σ_k W_{N,k}`
    pub bound: f64,
    /// Chosen window `[a, N − b + 1]` maximizing `|f|` over `a, b ∈ {1, 2}`.
    pub a: usize,
    pub b: usize,
    pub count_window: usize,
    pub count_full: usize,
    /// `count_window ≤ bound`
    pub window_ok: bool,
    /// `count_full ≤ bound + 2`
    pub full_ok: bool,
    /// Resolvent/IPR inequality on `H_{[1,N]}` (computed for `N ≤ 200`).
    pub resolvent: Option<ResolventCheck>,
}

const RESOLVENT_CHECK_MAX_N: usize = 200;

/// Compares the eigenvalue count in `(E − η, E + η)` with
/// `4η·Σ_k W_{N,k}(E + iη)`, where
/// `W_{N,k} = ‖M_{[1,k]}‖·‖M_{[k+1,N]}‖/‖M_{[1,N]}‖`.
pub fn concatenation_bound_check(
    cocycle: &Cocycle,
    x: &Phase,
    e: f64,
    eta: f64,
    n: usize,
) -> Result<ConcatenationReport> {
    if eta <= 0.0 || n < 3 {
        return Err(Error::Domain("concatenation check needs η > 0 and N ≥ 3".into()));
    }
    let z = Complex64::new(e, eta);
    let v = cocycle.site_values(x, 1, n)?;
    let factors: Vec<Mat2<Complex64>> = v.iter().map(|&s| Mat2::transfer(Complex64::from(s) - z)).collect();

    let mut prefix = Vec::with_capacity(n + 1);
    let mut p = ScaledProduct::identity();
    prefix.push(0.0);
    for f in &factors {
        p.push_left(f);
        prefix.push(p.log_norm());
    }
    let mut suffix = vec![0.0; n + 1];
    let mut s = ScaledProduct::identity();
    for k in (0..n).rev() {
        s.push_right(&factors[k]);
        suffix[k] = s.log_norm();
    }
    let log_full = prefix[n];
    let log_w: Vec<f64> = (1..=n).map(|k| prefix[k] + suffix[k] - log_full).collect();
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum_w = top.exp() * log_w.iter().map(|l| (l - top).exp()).sum::<f64>();
    let bound = 4.0 * eta * sum_w;

    let mut best = (1, 1, f64::NEG_INFINITY);
    for a in 1..=2 {
        for b in 1..=2 {
            let f = cocycle.det_window(x, z, a, n + 1 - b)?;
            if f.log_mag > best.2 {
                best = (a, b, f.log_mag);
            }
        }
    }
    let (a, b, _) = best;
    let h_window = TridiagonalHamiltonian::window(cocycle, x, a, n + 1 - b)?;
    let h_full = TridiagonalHamiltonian::new(v);
    let count_in = |h: &TridiagonalHamiltonian| h.sturm_count(e + eta) - h.sturm_count(e - eta);
    let count_window = count_in(&h_window);
    let count_full = count_in(&h_full);

    let resolvent = if n <= RESOLVENT_CHECK_MAX_N {
        Some(tridiagonal_resolvent_check(cocycle, x, &h_full, e, eta)?)
    } else {
        None
    };

    Ok(ConcatenationReport {
        log_w,
        bound,
        a,
        b,
        count_window,
        count_full,
        window_ok: (count_window as f64) <= bound,
        full_ok: (count_full as f64) <= bound + 2.0,
        resolvent,
    })
}

/// The resolvent/IPR inequality for `H_{[1,N]}` in the site basis: the left
/// side from Cramer's-rule diagonal Green's entries, the right side from
/// bisection eigenvalues and inverse-iteration eigenvectors.
fn tridiagonal_resolvent_check(
    cocycle: &Cocycle,
    x: &Phase,
    h: &TridiagonalHamiltonian,
    e: f64,
    eta: f64,
) -> Result<ResolventCheck> {
    let n = h.len();
    let z = Complex64::new(e, eta);
    let lhs = cocycle
        .green_diagonal(x, z, 1, n)?
        .iter()
        .map(|g| (2.0 * g.log_mag).exp())
        .sum();
    let mut rhs = 0.0;
    for ej in h.eigenvalues(None, 1e-14) {
        let pair = h.eigenvector(ej, 1e-13)?;
        let ipr: f64 = pair.vector.iter().map(|c| c.powi(4)).sum();
        let im = (Complex64::from(ej) - z).inv().im;
        rhs += ipr * im * im;
    }
    Ok(ResolventCheck { lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThoulessRow {
    pub energy: f64,
    pub n: usize,
    /// `⟨log|f_N(x, E)|⟩_x / N`
    pub mean_log_det: f64,
    pub l_n: f64,
    pub diff: f64,
}

/// Compares `(1/N)⟨log|f_N(x, E)|⟩` with `L_N(E)` on the same phases.
pub fn thouless_check(cocycle: &Cocycle, e: f64, n: usize, sampler: &Sampler, m: usize) -> Result<ThoulessRow> {
    let phases = sampler.phases(cocycle.dynamics(), n, m)?;
    let logs = log_dets(cocycle, e, n, &phases)?;
    let (mean, _) = mean_stderr(&logs);
    let l_n = finite_lyapunov(cocycle, e, n, sampler, m)?.mean;
    let mean_log_det = mean / n as f64;
    Ok(ThoulessRow {
        energy: e,
        n,
        mean_log_det,
        l_n,
        diff: (mean_log_det - l_n).abs(),
    })
}

/// `log|f_N(x, E)|` for each phase, in input order.
pub fn log_dets(cocycle: &Cocycle, e: f64, n: usize, phases: &[Phase]) -> Result<Vec<f64>> {
    phases
        .par_iter()
        .map(|x| {
            let mut rec = DetRecurrence::<f64>::new();
            for v in cocycle.sites(x)?.take(n) {
                rec.step(v - e);
            }
            Ok(rec.current().log_mag)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenDecayReport {
    pub log_det: f64,
    /// `ℓ·L_ℓ − K/2`
    pub threshold: f64,
    pub condition_met: bool,
    /// `max_{j ≤ k} [log|G(j,k)| + (γ/2)(k − j) − K − (log ℓ)²]`; the decay
    /// bound holds when this is `≤ 0`.
    pub max_excess: f64,
}

/// Off-diagonal decay of `(H_{[1,ℓ]}(x) − E)^{−1}` against
/// `exp(−(γ/2)(k − j) + K + (log ℓ)²)` with `γ = l_ell`, evaluated when
/// `log|f_ℓ(x, E)| > ℓ·γ − K/2`.
pub fn green_decay_check(cocycle: &Cocycle, x: &Phase, e: f64, ell: usize, k_const: f64, l_ell: f64) -> Result<GreenDecayReport> {
    let v = cocycle.site_values(x, 1, ell)?;
    let mut prefix = Vec::with_capacity(ell + 1);
    let mut rec = DetRecurrence::<f64>::new();
    prefix.push(rec.current().log_mag);
    for &s in &v {
        rec.step(s - e);
        prefix.push(rec.current().log_mag);
    }
    // suffix[i] = log|f_{[i+1, ℓ]}| for i = 0..=ℓ
    let mut suffix = vec![0.0; ell + 1];
    let mut rec = DetRecurrence::<f64>::new();
    for i in (0..ell).rev() {
        rec.step(v[i] - e);
        suffix[i] = rec.current().log_mag;
    }
    let log_det = prefix[ell];
    let threshold = ell as f64 * l_ell - k_const / 2.0;
    let slack = (ell as f64).ln().powi(2);
    let mut max_excess = f64::NEG_INFINITY;
    for j in 1..=ell {
        for k in j..=ell {
            let log_g = prefix[j - 1] + suffix[k] - log_det;
            let excess = log_g + 0.5 * l_ell * (k - j) as f64 - k_const - slack;
            max_excess = max_excess.max(excess);
        }
    }
    Ok(GreenDecayReport {
        log_det,
        threshold,
        condition_met: log_det > threshold,
        max_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Dynamics;
    use crate::potential::Potential;

    fn free(n: usize) -> TridiagonalHamiltonian {
        TridiagonalHamiltonian::new(vec![0.0; n])
    }

    #[test]
    fn sturm_examples() {
        let h = TridiagonalHamiltonian::new(vec![5.0]);
        assert_eq!(h.sturm_count(6.0), 1);
        assert_eq!(h.sturm_count(5.0), 0);
        assert_eq!(free(3).sturm_count(0.0), 1);
        let h = TridiagonalHamiltonian::new(vec![1.0, -3.0, 2.5, 0.0]);
        let (lo, hi) = h.gershgorin();
        assert_eq!(h.sturm_count(lo - 1e-9), 0);
        assert_eq!(h.sturm_count(hi + 1e-9), 4);
    }

    #[test]
    fn free_eigenvalues() {
        let ev = free(50).eigenvalues(None, 1e-13);
        assert_eq!(ev.len(), 50);
        for (k, e) in ev.iter().enumerate() {
            let exact = -2.0 * ((k + 1) as f64 * std::f64::consts::PI / 51.0).cos();
            assert!((e - exact).abs() < 1e-10);
        }
        assert!(free(5).eigenvalues(Some((3.0, 4.0)), 1e-12).is_empty());
        assert!(free(5).eigenvalues(Some((1.0, 0.0)), 1e-12).is_empty());
    }

    #[test]
    fn two_site_eigenvectors() {
        let h = free(2);
        let lo = h.eigenvector(-1.0, 1e-12).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((lo.vector[0] - s).abs() < 1e-12 && (lo.vector[1] - s).abs() < 1e-12);
        let hi = h.eigenvector(1.0, 1e-12).unwrap();
        assert!((hi.vector[0].abs() - s).abs() < 1e-12);
        assert!((hi.vector[0] + hi.vector[1]).abs() < 1e-12);
    }

    #[test]
    fn ambiguous_eigenvector() {
        // two decoupled-looking equal sites far apart still split; use tol larger than the split
        let h = TridiagonalHamiltonian::new(vec![10.0, 0.0, 0.0, 0.0, 10.0, 0.0, 0.0, 0.0, 10.0]);
        let ev = h.eigenvalues(None, 1e-14);
        let top = ev[ev.len() - 1];
        assert!(matches!(h.eigenvector(top, 1e-2), Err(Error::AmbiguousEigenvalue { .. })));
    }

    #[test]
    fn single_eigenvalue_has_infinite_gap() {
        let c = Cocycle::new(Potential::almost_mathieu(2.0), Dynamics::rotation(0.3));
        let r = min_gap(&c, &Phase::circle(0.1), 1, None, DEFAULT_GAP_DELTA).unwrap();
        assert_eq!(r.min_gap, f64::INFINITY);
    }

    #[test]
    fn wegner_outside_spectrum() {
        let c = Cocycle::new(Potential::almost_mathieu(3.0), Dynamics::rotation(0.3));
        assert_eq!(wegner_measure(&c, 10.0, 2.0, 50, 20, 1).unwrap(), 0.0);
    }

    #[test]
    fn hellmann_feynman_constant_potential() {
        let c = Cocycle::new(Potential::constant(0.7, 1.0), Dynamics::rotation(0.3));
        let r = hellmann_feynman(&c, 0.2, 3, 10).unwrap();
        assert_eq!(r.analytic, 0.0);
        assert!(r.fd.abs() < 1e-9);
    }

    #[test]
    fn distance_to_spectrum_free() {
        let h = free(2);
        assert!((h.distance_to_spectrum(0.25, 1e-12) - 0.75).abs() < 1e-11);
        assert!((h.distance_to_spectrum(3.0, 1e-12) - 2.0).abs() < 1e-11);
    }
}
