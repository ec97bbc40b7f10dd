//! Zeros of analytic functions given in log form, aimed at the Dirichlet
//! determinants `f_N(z, ω, E)` as functions of `z = e(x + iy)`: circle means
//! of `log|f|`, Jensen counts and double averages, argument-principle zero
//! location, separation statistics, and concatenation terms.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::cocycle::Cocycle;
use crate::dynamics::frac;
use crate::error::{Error, Result};
use crate::linalg::SignedLog;
use crate::potential::ComplexPhase;
use crate::sampling::stream;

/// Default boundary quadrature size.
pub const DEFAULT_BOUNDARY_POINTS: usize = 1024;
/// Default half-width of the annulus `|y| ≤ 0.05` probed for zeros.
pub const DEFAULT_ANNULUS_Y: f64 = 0.05;

const MAX_BOUNDARY_POINTS: usize = 1 << 17;
const QUADRISECTION_MARGIN: f64 = 0.05;
const MAX_DEPTH: usize = 48;
const RADIAL_NODES: usize = 20;
const RADIAL_PIECES: usize = 8;

/// An analytic function evaluated as `phase · exp(log_mag)`.
pub trait LogAnalytic: Sync {
    fn log_eval(&self, z: Complex64) -> SignedLog<Complex64>;
}

impl<F> LogAnalytic for F
where
    F: Fn(Complex64) -> SignedLog<Complex64> + Sync,
{
    fn log_eval(&self, z: Complex64) -> SignedLog<Complex64> {
        self(z)
    }
}

/// `leading · Π (z − r_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub leading: Complex64,
    pub roots: Vec<Complex64>,
}

impl Polynomial {
    pub fn from_roots(roots: Vec<Complex64>) -> Self {
        Self {
            leading: Complex64::new(1.0, 0.0),
            roots,
        }
    }
}

impl LogAnalytic for Polynomial {
    fn log_eval(&self, z: Complex64) -> SignedLog<Complex64> {
        self.roots
            .iter()
            .fold(SignedLog::from_value(self.leading), |acc, r| acc.mul(SignedLog::from_value(z - r)))
    }
}

/// `z ↦ f_n(z·shift, ω, E)` along the complexified orbit.
#[derive(Debug, Clone)]
pub struct DirichletDet<'a> {
    cocycle: &'a Cocycle,
    e: Complex64,
    n: usize,
    shift: Complex64,
}

impl<'a> DirichletDet<'a> {
    pub fn new(cocycle: &'a Cocycle, e: Complex64, n: usize) -> Result<Self> {
        cocycle.dynamics().circle_frequency()?;
        Ok(Self {
            cocycle,
            e,
            n,
            shift: Complex64::new(1.0, 0.0),
        })
    }

    /// The same determinant started `k` steps later, `z ↦ f_n(z·e(kω))`.
    pub fn shifted(mut self, k: u64) -> Result<Self> {
        let omega = self.cocycle.dynamics().circle_frequency()?;
        self.shift = Complex64::from_polar(1.0, 2.0 * PI * frac(k as f64 * omega));
        Ok(self)
    }
}

impl LogAnalytic for DirichletDet<'_> {
    fn log_eval(&self, z: Complex64) -> SignedLog<Complex64> {
        self.cocycle
            .det_z(z * self.shift, self.e, self.n)
            .expect("circle shift checked at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    fn boundary(&self, j: usize, m: usize) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, 2.0 * PI * j as f64 / m as f64)
    }
}

fn boundary_logs<F: LogAnalytic + ?Sized>(f: &F, disk: &Disk, m: usize, stride: usize, start: usize) -> Vec<SignedLog<Complex64>> {
    (start..m)
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&j| f.log_eval(disk.boundary(j, m)))
        .collect()
}

/// Radius to retry with when a zero sits on or near the circle.
fn jittered_radius<F: LogAnalytic + ?Sized>(f: &F, disk: &Disk, logs: &[SignedLog<Complex64>]) -> f64 {
    let m = logs.len();
    let jmin = (0..m).min_by(|&a, &b| logs[a].log_mag.total_cmp(&logs[b].log_mag)).unwrap_or(0);
    let z = disk.boundary(jmin, m);
    let outward = newton_step(f, z, disk.radius * 1e-7)
        .map(|s| ((z - s) - disk.center).norm() >= disk.radius)
        .unwrap_or(true);
    if outward {
        disk.radius * 0.97
    } else {
        disk.radius * 1.03
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleMean {
    pub value: f64,
    /// `|mean_{2M} − mean_M|` at the accepted resolution.
    pub error: f64,
    pub points: usize,
}

/// Trapezoidal mean of `log|f|` over the circle `|z − z0| = r`, doubling
/// `m` until the `M` and `2M` estimates agree to `1e-10·max(1, |mean|)`.
pub fn circle_mean_log<F: LogAnalytic + ?Sized>(f: &F, z0: Complex64, r: f64, m: usize) -> Result<CircleMean> {
    if m < 256 {
        return Err(Error::Domain(format!("circle quadrature needs at least 256 points, got {m}")));
    }
    let disk = Disk::new(z0, r)?;
    let mut m = m;
    let mut logs = boundary_logs(f, &disk, m, 1, 0);
    loop {
        if logs.iter().any(|s| s.is_zero()) {
            return Err(Error::NearCircleZero {
                radius: r,
                suggested_radius: jittered_radius(f, &disk, &logs),
            });
        }
        let coarse = logs.iter().map(|s| s.log_mag).sum::<f64>() / m as f64;
        let odd = boundary_logs(f, &disk, 2 * m, 2, 1);
        let mut fine_logs = Vec::with_capacity(2 * m);
        for (a, b) in logs.iter().zip(&odd) {
            fine_logs.push(*a);
            fine_logs.push(*b);
        }
        let fine = fine_logs.iter().map(|s| s.log_mag).sum::<f64>() / (2 * m) as f64;
        let error = (fine - coarse).abs();
        if fine.is_finite() && error <= 1e-10 * fine.abs().max(1.0) {
            return Ok(CircleMean {
                value: fine,
                error,
                points: 2 * m,
            });
        }
        m *= 2;
        logs = fine_logs;
        if m > MAX_BOUNDARY_POINTS {
            return Err(Error::NearCircleZero {
                radius: r,
                suggested_radius: jittered_radius(f, &disk, &logs),
            });
        }
    }
}

/// `Σ_{f(ζ)=0, |ζ−z0|<R} log(R/|ζ − z0|)`, as the circle mean of `log|f|`
/// minus `log|f(z0)|`.
pub fn jensen_count<F: LogAnalytic + ?Sized>(f: &F, z0: Complex64, r: f64, m: usize) -> Result<f64> {
    let center = f.log_eval(z0);
    if center.is_zero() {
        return Err(Error::CenterIsZero);
    }
    Ok(circle_mean_log(f, z0, r, m)?.value - center.log_mag)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenAverage {
    pub value: f64,
    /// Difference between the estimates at `M` and `2M` angular points.
    pub error: f64,
}

/// Area of the intersection of disks of radii `r1`, `r2` whose centers are
/// `d` apart.
fn lens_area(d: f64, r1: f64, r2: f64) -> f64 {
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    if d <= big - small {
        return PI * small * small;
    }
    if d >= big + small {
        return 0.0;
    }
    let a = ((d * d + small * small - big * big) / (2.0 * d * small)).clamp(-1.0, 1.0).acos();
    let b = ((d * d + big * big - small * small) / (2.0 * d * big)).clamp(-1.0, 1.0).acos();
    let k = (-d + small + big) * (d + small - big) * (d - small + big) * (d + small + big);
    small * small * a + big * big * b - 0.5 * k.max(0.0).sqrt()
}

/// Gauss–Legendre on `pieces` equal subintervals of each knot interval,
/// after the substitution `ρ = a + (b − a)·s²(3 − 2s)` that flattens
/// algebraic endpoint singularities.
fn integrate_pieces(g: &(dyn Fn(f64) -> f64 + Sync), knots: &[f64], pieces: usize) -> f64 {
    let rule = GaussLegendre::new(NonZeroUsize::new(RADIAL_NODES).expect("nonzero"));
    let mut intervals = Vec::new();
    for w in knots.windows(2) {
        if w[1] > w[0] {
            intervals.extend((0..pieces).map(|i| (w[0], w[1], i)));
        }
    }
    let h = 1.0 / pieces as f64;
    let parts: Vec<f64> = intervals
        .par_iter()
        .map(|&(a, b, i)| {
            let mapped = |t: f64| g(a + (b - a) * t * t * (3.0 - 2.0 * t)) * (b - a) * 6.0 * t * (1.0 - t);
            rule.integrate(i as f64 * h, (i + 1) as f64 * h, mapped)
        })
        .collect();
    parts.iter().sum()
}

fn jensen_average_at<U>(u: &U, z0: Complex64, r1: f64, r2: f64, m: usize) -> Result<f64>
where
    U: Fn(Complex64) -> f64 + Sync,
{
    let bad = std::sync::atomic::AtomicBool::new(false);
    let circle_mean = |rho: f64| -> f64 {
        let s: f64 = (0..m)
            .map(|j| u(z0 + Complex64::from_polar(rho, 2.0 * PI * (j as f64 + 0.5) / m as f64)))
            .sum::<f64>()
            / m as f64;
        if !s.is_finite() {
            bad.store(true, std::sync::atomic::Ordering::Relaxed);
        }
        s
    };
    // On ρ < r1 − r2 the lens is the whole small disk and the two weights
    // cancel, so only the annulus r1 − r2 < ρ < r1 + r2 contributes.
    let norm = PI * PI * r1 * r1 * r2 * r2;
    let weight = |rho: f64| {
        let inner = if rho < r1 { 2.0 * rho / (r1 * r1) } else { 0.0 };
        2.0 * PI * rho * lens_area(rho, r1, r2) / norm - inner
    };
    let g = |rho: f64| weight(rho) * circle_mean(rho);
    let value = integrate_pieces(&g, &[r1 - r2, r1, r1 + r2], RADIAL_PIECES);
    if bad.load(std::sync::atomic::Ordering::Relaxed) {
        return Err(Error::NonFiniteSample(format!(
            "subharmonic function not finite on D({z0}, {})",
            r1 + r2
        )));
    }
    Ok(value)
}

/// `J(u, z0, r1, r2)`: the `D(z0, r1)` average of the excess of the
/// `D(z, r2)` average of `u` over `u(z)`. Computed by reducing both disk
/// averages to radial integrals of circle means around `z0`.
pub fn jensen_average_j<U>(u: &U, z0: Complex64, r1: f64, r2: f64, m: usize) -> Result<JensenAverage>
where
    U: Fn(Complex64) -> f64 + Sync,
{
    if !(r2 > 0.0 && r2 < r1) {
        return Err(Error::Domain(format!("need 0 < r2 < r1, got r1 = {r1}, r2 = {r2}")));
    }
    let coarse = jensen_average_at(u, z0, r1, r2, m)?;
    let fine = jensen_average_at(u, z0, r1, r2, 2 * m)?;
    Ok(JensenAverage {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuSandwich {
    /// Zeros in `D(z0, r1 − r2)`.
    pub lower: usize,
    /// `4(r1²/r2²)·J(log|f|, z0, r1, r2)`
    pub estimate: f64,
    /// Zeros in `D(z0, r1 + r2)`.
    pub upper: usize,
    /// Quadrature uncertainty of `estimate`.
    pub error: f64,
}

impl NuSandwich {
    pub fn holds(&self) -> bool {
        let slack = 1e-6 + 10.0 * self.error;
        self.lower as f64 - slack <= self.estimate && self.estimate <= self.upper as f64 + slack
    }
}

/// Zero counts bracketing `4(r1²/r2²)·J(log|f|)`; the counts come from
/// `zeros` when given, else from [`locate_zeros`] on `D(z0, r1 + r2)`.
pub fn nu_sandwich<F: LogAnalytic + ?Sized>(
    f: &F,
    z0: Complex64,
    r1: f64,
    r2: f64,
    m: usize,
    zeros: Option<&[Complex64]>,
) -> Result<NuSandwich> {
    let u = |z: Complex64| f.log_eval(z).log_mag;
    let j = jensen_average_j(&u, z0, r1, r2, m)?;
    let factor = 4.0 * r1 * r1 / (r2 * r2);
    let located;
    let zeros = match zeros {
        Some(z) => z,
        None => {
            located = locate_zeros(f, Disk::new(z0, r1 + r2)?, 1e-10)?.zeros;
            &located
        }
    };
    let count = |r: f64| zeros.iter().filter(|z| (*z - z0).norm() < r).count();
    Ok(NuSandwich {
        lower: count(r1 - r2),
        estimate: factor * j.value,
        upper: count(r1 + r2),
        error: factor * j.error,
    })
}

/// Winding number of `f` along the boundary of `disk`, from phase
/// increments at `m` points, doubling `m` until two estimates agree within
/// 0.05 and every increment is below `π/2`.
pub fn winding_number<F: LogAnalytic + ?Sized>(f: &F, disk: &Disk, m: usize) -> Result<i64> {
    let mut m = m.max(16);
    let mut previous: Option<f64> = None;
    loop {
        let logs = boundary_logs(f, disk, m, 1, 0);
        if logs.iter().any(|s| s.is_zero() || !s.log_mag.is_finite()) {
            return Err(Error::NearCircleZero {
                radius: disk.radius,
                suggested_radius: jittered_radius(f, disk, &logs),
            });
        }
        let mut total = 0.0;
        let mut max_step = 0.0_f64;
        for j in 0..m {
            let step = (logs[(j + 1) % m].phase * logs[j].phase.conj()).arg();
            max_step = max_step.max(step.abs());
            total += step;
        }
        let w = total / (2.0 * PI);
        if max_step < PI / 2.0 {
            if let Some(p) = previous {
                if (p - w).abs() < 0.05 {
                    if (w - w.round()).abs() > 0.1 {
                        return Err(Error::WindingUnstable { winding: w });
                    }
                    return Ok(w.round() as i64);
                }
            }
            previous = Some(w);
        }
        m *= 2;
        if m > MAX_BOUNDARY_POINTS {
            return Err(Error::WindingUnstable { winding: w });
        }
    }
}

/// `f(z)/f′(z)` with `f′` by a central difference of step `h`.
fn newton_step<F: LogAnalytic + ?Sized>(f: &F, z: Complex64, h: f64) -> Option<Complex64> {
    let fz = f.log_eval(z);
    if fz.is_zero() {
        return Some(Complex64::new(0.0, 0.0));
    }
    let hc = Complex64::new(h, 0.0);
    let df = f.log_eval(z + hc).add(f.log_eval(z - hc).neg()).mul_exp(-(2.0 * h).ln());
    let s = fz.div(df).ok()?.value();
    s.is_finite().then_some(s)
}

/// Contour estimate `(1/2πi)∮ z f′/f dz` of the mean of the zeros inside.
fn contour_centroid<F: LogAnalytic + ?Sized>(f: &F, disk: &Disk, count: i64, m: usize) -> Complex64 {
    let h = disk.radius * 1e-6;
    let hc = Complex64::new(h, 0.0);
    let sum: Complex64 = (0..m)
        .into_par_iter()
        .map(|j| {
            let z = disk.boundary(j, m);
            let ratio = f.log_eval(z + hc).div(f.log_eval(z - hc)).unwrap_or_else(|_| SignedLog::one());
            let dlog = Complex64::new(ratio.log_mag, ratio.phase.arg()) / (2.0 * h);
            z * dlog * (z - disk.center)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    sum / (m as f64 * count as f64)
}

fn newton_refine<F: LogAnalytic + ?Sized>(f: &F, start: Complex64, scale: f64, tol: f64) -> Complex64 {
    let mut z = start;
    for _ in 0..60 {
        let Some(step) = newton_step(f, z, (scale * 1e-6).max(1e-9 * z.norm()).max(1e-14)) else {
            break;
        };
        let step = if step.norm() > scale { step * (scale / step.norm()) } else { step };
        z -= step;
        if step.norm() <= tol {
            break;
        }
    }
    z
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Complex64>,
    /// `max log|f|` over the returned zeros.
    pub residual: f64,
    pub disk: Disk,
    /// Argument-principle count on the boundary of `disk`.
    pub winding: i64,
}

/// Zeros of `f` inside `disk`: winding counts on the boundary, quadrisection
/// into overlapping disks until each holds at most one zero, then Newton
/// refinement to `tol`.
pub fn locate_zeros<F: LogAnalytic + ?Sized>(f: &F, disk: Disk, tol: f64) -> Result<ZeroSet> {
    let winding = winding_number(f, &disk, DEFAULT_BOUNDARY_POINTS)?;
    let mut found = Vec::new();
    if winding > 0 {
        search(f, &disk, winding, tol, 0, &mut found)?;
    }
    let dedup_radius = (10.0 * tol).max(1e-9 * disk.radius);
    let mut zeros: Vec<Complex64> = Vec::new();
    for z in found {
        if disk.contains(z) && zeros.iter().all(|w| (w - z).norm() > dedup_radius) {
            zeros.push(z);
        }
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    if zeros.len() as i64 != winding {
        return Err(Error::WindingUnstable { winding: zeros.len() as f64 });
    }
    let residual = zeros.iter().map(|z| f.log_eval(*z).log_mag).fold(f64::NEG_INFINITY, f64::max);
    Ok(ZeroSet {
        zeros,
        residual,
        disk,
        winding,
    })
}

fn search<F: LogAnalytic + ?Sized>(f: &F, disk: &Disk, count: i64, tol: f64, depth: usize, out: &mut Vec<Complex64>) -> Result<()> {
    if count == 1 || disk.radius < tol || depth >= MAX_DEPTH {
        let guess = contour_centroid(f, disk, count, DEFAULT_BOUNDARY_POINTS);
        if count == 1 {
            let z = newton_refine(f, guess, disk.radius, tol);
            if (z - disk.center).norm() <= disk.radius * 1.5 {
                out.push(z);
                return Ok(());
            }
        } else {
            // unresolved cluster: a multiple zero to working precision
            out.extend(std::iter::repeat_n(guess, count as usize));
            return Ok(());
        }
    }
    let r = disk.radius;
    'outer: for attempt in 0..6 {
        let margin = QUADRISECTION_MARGIN + 0.03 * attempt as f64;
        let sub: Vec<Disk> = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
            .iter()
            .map(|&(a, b)| Disk {
                center: disk.center + Complex64::new(a * r / 2.0, b * r / 2.0),
                radius: (FRAC_1_SQRT_2 + margin) * r,
            })
            .collect();
        let mut counts = Vec::with_capacity(4);
        for d in &sub {
            match winding_number(f, d, DEFAULT_BOUNDARY_POINTS) {
                Ok(w) => counts.push(w),
                Err(Error::NearCircleZero { .. }) | Err(Error::WindingUnstable { .. }) => continue 'outer,
                Err(e) => return Err(e),
            }
        }
        for (d, &c) in sub.iter().zip(&counts) {
            if c > 0 {
                search(f, d, c, tol, depth + 1, out)?;
            }
        }
        return Ok(());
    }
    Err(Error::WindingUnstable { winding: count as f64 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSeparation {
    /// Smallest distance between two located zeros (`+∞` with fewer than two).
    pub min_distance: f64,
    /// Zero count per probe disk.
    pub counts: Vec<usize>,
    pub max_count: usize,
    /// Reference ceiling `2·deg V`.
    pub ceiling: usize,
}

/// Locates zeros of `f_N(·, ω, E)` in `n_probes` disks of radius
/// `probe_radius` centred at random points `e(x + iy)`, `|y| ≤ annulus_y`.
pub fn zero_separation(
    cocycle: &Cocycle,
    e: f64,
    n: usize,
    annulus_y: f64,
    probe_radius: f64,
    n_probes: usize,
    seed: u64,
) -> Result<ZeroSeparation> {
    let f = DirichletDet::new(cocycle, Complex64::from(e), n)?;
    let centers: Vec<Complex64> = (0..n_probes)
        .map(|i| {
            let mut rng = stream(seed, "zero_probe", i as u64);
            let x: f64 = rng.gen();
            let y: f64 = rng.gen_range(-annulus_y..=annulus_y);
            ComplexPhase::new(x, y).to_z()
        })
        .collect();
    let sets = centers
        .par_iter()
        .map(|&c| locate_with_jitter(&f, c, probe_radius, 1e-12))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<usize> = sets.iter().map(|s| s.zeros.len()).collect();
    let mut all: Vec<Complex64> = Vec::new();
    for s in &sets {
        for z in &s.zeros {
            if all.iter().all(|w| (w - z).norm() > 1e-10) {
                all.push(*z);
            }
        }
    }
    let mut min_distance = f64::INFINITY;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            min_distance = min_distance.min((all[i] - all[j]).norm());
        }
    }
    Ok(ZeroSeparation {
        min_distance,
        max_count: counts.iter().copied().max().unwrap_or(0),
        counts,
        ceiling: 2 * cocycle.potential().degree(),
    })
}

/// [`locate_zeros`], retrying with the suggested radius when a zero sits on
/// the boundary.
pub fn locate_with_jitter<F: LogAnalytic + ?Sized>(f: &F, center: Complex64, radius: f64, tol: f64) -> Result<ZeroSet> {
    let mut r = radius;
    for _ in 0..4 {
        match locate_zeros(f, Disk::new(center, r)?, tol) {
            Err(Error::NearCircleZero { suggested_radius, .. }) => r = suggested_radius,
            other => return other,
        }
    }
    locate_zeros(f, Disk::new(center, r)?, tol)
}

/// Number of zeros of `f_N(·, ω, E)` in the annulus `|y| < y_max`, i.e.
/// `e^{−2πy_max} < |z| < e^{2πy_max}`, as a difference of winding numbers.
pub fn annulus_zero_count(cocycle: &Cocycle, e: f64, n: usize, y_max: f64) -> Result<i64> {
    let f = DirichletDet::new(cocycle, Complex64::from(e), n)?;
    let origin = Complex64::new(0.0, 0.0);
    let m = DEFAULT_BOUNDARY_POINTS.max(16 * n);
    let outer = winding_number(&f, &Disk::new(origin, (2.0 * PI * y_max).exp())?, m)?;
    let inner = winding_number(&f, &Disk::new(origin, (-2.0 * PI * y_max).exp())?, m)?;
    Ok(outer - inner)
}

/// `log‖M_2m(z)‖ − log‖M_m(z·e(mω))‖ − log‖M_m(z)‖`; nonpositive by
/// submultiplicativity.
pub fn concatenation_w(cocycle: &Cocycle, z: ComplexPhase, e: Complex64, m: usize) -> Result<f64> {
    let p = cocycle.potential();
    if z.y.abs() > p.rho0() {
        return Err(Error::OutsideStrip { y: z.y, rho0: p.rho0() });
    }
    let omega = cocycle.dynamics().circle_frequency()?;
    let zc = z.to_z();
    let shifted = ComplexPhase::new(frac(z.x + frac(m as f64 * omega)), z.y).to_z();
    let full = cocycle.transfer_product_z(zc, e, 2 * m)?.log_norm();
    let tail = cocycle.transfer_product_z(shifted, e, m)?.log_norm();
    let head = cocycle.transfer_product_z(zc, e, m)?.log_norm();
    Ok(full - tail - head)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Additivity {
    /// Zeros of `f_m(·)` in the disk.
    pub k0: usize,
    /// Zeros of `f_m(·e(mω))` in the disk.
    pub k1: usize,
    /// Zeros of `f_2m(·)` in the disk.
    pub k: usize,
}

impl Additivity {
    pub fn defect(&self) -> i64 {
        self.k as i64 - self.k0 as i64 - self.k1 as i64
    }
}

pub fn zero_count_additivity(cocycle: &Cocycle, e: f64, m: usize, disk: Disk) -> Result<Additivity> {
    let e = Complex64::from(e);
    let f0 = DirichletDet::new(cocycle, e, m)?;
    let f1 = DirichletDet::new(cocycle, e, m)?.shifted(m as u64)?;
    let f = DirichletDet::new(cocycle, e, 2 * m)?;
    let tol = 1e-12 * disk.radius.max(1e-3);
    Ok(Additivity {
        k0: locate_zeros(&f0, disk, tol)?.zeros.len(),
        k1: locate_zeros(&f1, disk, tol)?.zeros.len(),
        k: locate_zeros(&f, disk, tol)?.zeros.len(),
    })
}
