//! Small linear-algebra kernels: 2×2 matrices over real or complex scalars,
//! overflow-free products carried as `(log_scale, residual)`, scalars in
//! signed-log form, and the two tiny solvers the spectral code needs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Field scalars the cocycle kernels run over (`f64` for real energies,
/// `Complex64` for complex energies or complexified phases).
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_complex(self) -> Complex64;
    fn is_finite(self) -> bool;
    fn conj(self) -> Self;
    /// Largest singular value of a 2×2 matrix.
    fn op_norm(m: &Mat2<Self>) -> f64;

    fn unit(self) -> Self {
        self.scale(1.0 / self.modulus())
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn conj(self) -> Self {
        self
    }
    fn op_norm(m: &Mat2<f64>) -> f64 {
        // σ_max = (|(a+d, c−b)| + |(a−d, b+c)|) / 2, free of cancellation.
        let [[a, b], [c, d]] = m.0;
        0.5 * ((a + d).hypot(c - b) + (a - d).hypot(b + c))
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn op_norm(m: &Mat2<Complex64>) -> f64 {
        let [[a, b], [c, d]] = m.0;
        let frob = a.norm_sqr() + b.norm_sqr() + c.norm_sqr() + d.norm_sqr();
        let det = (a * d - b * c).norm();
        let disc = ((frob - 2.0 * det) * (frob + 2.0 * det)).max(0.0);
        (0.5 * (frob + disc.sqrt())).sqrt()
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T>(pub [[T; 2]; 2]);

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    /// One Schrödinger step `[[v − E, −1], [1, 0]]`.
    pub fn transfer(v_minus_e: T) -> Self {
        Self::new(v_minus_e, -T::one(), T::one(), T::zero())
    }

    pub fn det(&self) -> T {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn norm(&self) -> f64 {
        T::op_norm(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self::new(a.scale(s), b.scale(s), c.scale(s), d.scale(s))
    }

    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        let det = self.det();
        Self::new(d / det, -b / det, -c / det, a / det)
    }

    pub fn transpose(&self) -> Self {
        let [[a, b], [c, d]] = self.0;
        Self::new(a, c, b, d)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[i][j]
    }
}

impl Mat2<f64> {
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, -s, s, c)
    }
}

impl<T: Scalar> Mul for Mat2<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = rhs.0;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }
}

/// Unitary `Q` with `det Q = 1` and the entries `(ρ, r12, r22)` of
/// `R = [[ρ, r12], [0, r22]]`, `ρ ≥ 0`, such that `B = Q R`.
fn qr2<T: Scalar>(b: &Mat2<T>) -> (Mat2<T>, f64, T, T) {
    let [[b11, b12], [b21, b22]] = b.0;
    let rho = b11.modulus().hypot(b21.modulus());
    if rho == 0.0 {
        return (Mat2::identity(), 0.0, b12, b22);
    }
    let u1 = b11.scale(1.0 / rho);
    let u2 = b21.scale(1.0 / rho);
    let q = Mat2::new(u1, -u2.conj(), u2, u1.conj());
    let r12 = u1.conj() * b12 + u2.conj() * b22;
    let r22 = u1 * b22 - u2 * b12;
    (q, rho, r12, r22)
}

/// A 2×2 matrix product kept in factored form `Q·R` with `Q` unitary and
/// `R = [[e^s·t0, e^s·t1], [0, r22]]`, `|(t0, t1)| = 1`, `r22` in signed-log
/// form. Products of unimodular factors have `r22 ≈ e^{−s}`; keeping it
/// apart from the dominant row means the determinant and every entry stay
/// accurate after any number of factors, which a single renormalized matrix
/// cannot do once `e^{−2s}` drops below machine precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledProduct<T> {
    q: Mat2<T>,
    log_scale: f64,
    top: [T; 2],
    r22: SignedLog<T>,
}

impl<T: Scalar> ScaledProduct<T> {
    pub fn identity() -> Self {
        Self {
            q: Mat2::identity(),
            log_scale: 0.0,
            top: [T::one(), T::zero()],
            r22: SignedLog::one(),
        }
    }

    pub fn from_matrix(m: Mat2<T>) -> Self {
        let (q, rho, r12, r22) = qr2(&m);
        let mut p = Self {
            q,
            log_scale: 0.0,
            top: [T::from_real(rho), r12],
            r22: SignedLog::from_value(r22),
        };
        p.normalize_top();
        p
    }

    fn normalize_top(&mut self) {
        let c = self.top[0].modulus().hypot(self.top[1].modulus());
        if c > 0.0 && c.is_finite() && c != 1.0 {
            self.top = [self.top[0].scale(1.0 / c), self.top[1].scale(1.0 / c)];
            self.log_scale += c.ln();
        }
    }

    /// `r22 / e^s` as a plain number (underflows to zero for long products).
    fn r22_rel(&self) -> T {
        self.r22.mul_exp(-self.log_scale).value()
    }

    /// `self ← factor · self`.
    pub fn push_left(&mut self, factor: &Mat2<T>) {
        let (q, rho, r12, r22) = qr2(&(*factor * self.q));
        let t1 = self.top[1].scale(rho) + r12 * self.r22_rel();
        self.q = q;
        self.top = [self.top[0].scale(rho), t1];
        self.r22 = SignedLog::from_value(r22).mul(self.r22);
        self.normalize_top();
    }

    /// `self ← self · factor`.
    pub fn push_right(&mut self, factor: &Mat2<T>) {
        *self = self.compose(&Self::from_matrix(*factor));
    }

    /// The product `self · rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let q2 = &rhs.q;
        // C = R1·Q2; top row in units of e^{s1}, bottom row in units of r22(1).
        let c10 = self.top[0] * q2.get(0, 0) + self.top[1] * q2.get(1, 0);
        let c11 = self.top[0] * q2.get(0, 1) + self.top[1] * q2.get(1, 1);
        let kappa = self.r22_rel();
        let rho = c10.modulus().hypot((kappa * q2.get(1, 0)).modulus());
        let (qp, r12, r22_factor) = if rho == 0.0 {
            (Mat2::identity(), c11, q2.get(1, 1))
        } else {
            let u1 = c10.scale(1.0 / rho);
            let u2 = (kappa * q2.get(1, 0)).scale(1.0 / rho);
            let r12 = u1.conj() * c11 + u2.conj() * kappa * q2.get(1, 1);
            // r22 in units of r22(1): u1·q2_11 − q2_10·c11/ρ
            let r22 = u1 * q2.get(1, 1) - q2.get(1, 0) * c11.scale(1.0 / rho);
            (Mat2::new(u1, -u2.conj(), u2, u1.conj()), r12, r22)
        };
        let mut out = Self {
            q: self.q * qp,
            log_scale: self.log_scale + rhs.log_scale,
            top: [
                rhs.top[0].scale(rho),
                rhs.top[1].scale(rho) + r12 * rhs.r22_rel(),
            ],
            r22: SignedLog::from_value(r22_factor).mul(self.r22).mul(rhs.r22),
        };
        out.normalize_top();
        out
    }

    /// `s` in the factorization; `log‖M‖ − log_scale ∈ [0, log √2]`.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// The residual `M·e^{−s}`, whose operator norm lies in `[1, √2]`.
    pub fn residual(&self) -> Mat2<T> {
        let r = Mat2::new(self.top[0], self.top[1], T::zero(), self.r22_rel());
        self.q * r
    }

    /// `log ‖M‖` with the operator norm.
    pub fn log_norm(&self) -> f64 {
        let r = Mat2::new(self.top[0], self.top[1], T::zero(), self.r22_rel());
        self.log_scale + r.norm().ln()
    }

    /// Determinant of the product.
    pub fn det(&self) -> SignedLog<T> {
        SignedLog::from_value(self.q.det() * self.top[0])
            .mul_exp(self.log_scale)
            .mul(self.r22)
    }

    /// Entry `(i, j)` of the product.
    pub fn entry(&self, i: usize, j: usize) -> SignedLog<T> {
        let qi0 = self.q.get(i, 0);
        if j == 0 {
            return SignedLog::from_value(qi0 * self.top[0]).mul_exp(self.log_scale);
        }
        let lead = SignedLog::from_value(qi0 * self.top[1]).mul_exp(self.log_scale);
        let tail = SignedLog::from_value(self.q.get(i, 1)).mul(self.r22);
        lead.add(tail)
    }

    pub fn is_finite(&self) -> bool {
        self.log_scale.is_finite()
            && self.q.is_finite()
            && self.top.iter().all(|t| t.is_finite())
            && !self.r22.log_mag.is_nan()
            && self.r22.log_mag != f64::INFINITY
    }

    /// The product in plain arithmetic; overflows for long products.
    pub fn reconstruct(&self) -> Mat2<T> {
        let s = self.log_scale.exp();
        let r = Mat2::new(self.top[0].scale(s), self.top[1].scale(s), T::zero(), self.r22.value());
        self.q * r
    }
}

/// A scalar carried as `phase · exp(log_mag)`; exact zero is `log_mag = −∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog<T> {
    pub phase: T,
    pub log_mag: f64,
}

impl<T: Scalar> SignedLog<T> {
    pub fn zero() -> Self {
        Self {
            phase: T::one(),
            log_mag: f64::NEG_INFINITY,
        }
    }

    pub fn one() -> Self {
        Self {
            phase: T::one(),
            log_mag: 0.0,
        }
    }

    pub fn from_value(v: T) -> Self {
        let m = v.modulus();
        if m == 0.0 {
            Self::zero()
        } else {
            Self {
                phase: v.scale(1.0 / m),
                log_mag: m.ln(),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// Multiplies by the positive real `exp(t)`.
    pub fn mul_exp(self, t: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self {
                phase: self.phase,
                log_mag: self.log_mag + t,
            }
        }
    }

    pub fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self {
            phase: (self.phase * rhs.phase).unit(),
            log_mag: self.log_mag + rhs.log_mag,
        }
    }

    pub fn recip(self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::SingularEnergy);
        }
        Ok(Self {
            phase: (T::one() / self.phase).unit(),
            log_mag: -self.log_mag,
        })
    }

    pub fn div(self, rhs: Self) -> Result<Self> {
        Ok(self.mul(rhs.recip()?))
    }

    /// Sum of two signed-log numbers, computed relative to the larger one.
    pub fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let ratio = small.phase.scale((small.log_mag - big.log_mag).exp());
        Self::from_value(big.phase + ratio).mul_exp(big.log_mag)
    }

    pub fn neg(self) -> Self {
        Self {
            phase: -self.phase,
            log_mag: self.log_mag,
        }
    }

    pub fn value(&self) -> T {
        if self.is_zero() {
            T::zero()
        } else {
            self.phase.scale(self.log_mag.exp())
        }
    }

    pub fn to_complex(self) -> SignedLog<Complex64> {
        SignedLog {
            phase: self.phase.to_complex(),
            log_mag: self.log_mag,
        }
    }
}

/// Solves a real tridiagonal system with Gaussian elimination and partial
/// pivoting. `sub[i]` couples rows `i+1, i`; `sup[i]` couples rows `i, i+1`.
/// Exactly singular pivots are replaced by `tiny` so inverse iteration can
/// run at a computed eigenvalue.
pub(crate) fn solve_tridiagonal(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
    tiny: f64,
) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    // Upper factor has bandwidth 2 after pivoting: u0 (diag), u1, u2.
    let mut u0 = diag.to_vec();
    let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { sup[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; n];
    let mut b = rhs.to_vec();
    let mut lower = sub.to_vec();

    for i in 0..n.saturating_sub(1) {
        if lower[i].abs() > u0[i].abs() {
            // swap rows i and i+1
            let (r0, r1, r2) = (u0[i], u1[i], u2[i]);
            u0[i] = lower[i];
            u1[i] = u0[i + 1];
            u2[i] = if i + 1 < n - 1 { u1[i + 1] } else { 0.0 };
            lower[i] = r0;
            u0[i + 1] = r1;
            if i + 1 < n - 1 {
                u1[i + 1] = r2;
            }
            b.swap(i, i + 1);
        }
        if u0[i] == 0.0 {
            u0[i] = tiny;
        }
        let m = lower[i] / u0[i];
        u0[i + 1] -= m * u1[i];
        if i + 1 < n - 1 {
            u1[i + 1] -= m * u2[i];
        }
        b[i + 1] -= m * b[i];
    }
    if u0[n - 1] == 0.0 {
        u0[n - 1] = tiny;
    }

    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

/// Dense complex solve `A x = b` by LU with partial pivoting (row-major `a`).
pub fn solve_dense(a: &[Vec<Complex64>], b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = b.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap();
        if m[piv][col].norm() == 0.0 {
            return Err(Error::SingularEnergy);
        }
        m.swap(col, piv);
        x.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
            let t = x[col];
            x[row] -= f * t;
        }
    }
    for row in (0..n).rev() {
        let mut s = x[row];
        for k in row + 1..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Ok(x)
}
