//! Real trigonometric-polynomial potentials `λ·V(x)`, `V(x) = Σ_k v(k) e(kx)`
//! with `e(t) = exp(2πit)`, evaluable on the real circle and at complexified
//! phases `e(x + iy)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default strip half-width for complexified phases.
pub const DEFAULT_RHO0: f64 = 0.1;

const CONJUGACY_TOL: f64 = 1e-12;
const RESIDUE_TOL: f64 = 1e-9;

/// A point `x + iy` of the complex strip around the real torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPhase {
    pub x: f64,
    pub y: f64,
}

impl ComplexPhase {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// The point `z = e(x + iy)` of the annulus.
    pub fn to_z(&self) -> Complex64 {
        Complex64::from_polar((-2.0 * PI * self.y).exp(), 2.0 * PI * self.x)
    }

    /// Inverse of [`ComplexPhase::to_z`].
    pub fn from_z(z: Complex64) -> Self {
        let x = z.arg() / (2.0 * PI);
        Self {
            x: crate::dynamics::frac(x),
            y: -z.norm().ln() / (2.0 * PI),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    /// `v(k)` for `k = −k0..=k0`, stored at index `k + k0`.
    coeffs: Vec<Complex64>,
    k0: usize,
    lambda: f64,
    rho0: f64,
}

impl Potential {
    /// Builds `λ·Σ v(k) e(kx)` from `(k, Re v(k), Im v(k))` triples. Missing
    /// modes are zero; `v(−k) = conj v(k)` must hold.
    pub fn from_coefficients(triples: &[(i64, f64, f64)], lambda: f64) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::InvalidPotential("coupling must be finite".into()));
        }
        let k0 = triples.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * k0 + 1];
        let mut seen = vec![false; 2 * k0 + 1];
        for &(k, re, im) in triples {
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::InvalidPotential(format!("non-finite coefficient at k = {k}")));
            }
            let idx = (k + k0 as i64) as usize;
            if seen[idx] {
                return Err(Error::InvalidPotential(format!("duplicate coefficient for k = {k}")));
            }
            seen[idx] = true;
            coeffs[idx] = Complex64::new(re, im);
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for k in 0..=k0 {
            let plus = coeffs[k0 + k];
            let minus = coeffs[k0 - k];
            if (minus - plus.conj()).norm() > CONJUGACY_TOL * scale {
                return Err(Error::InvalidPotential(format!(
                    "v(-{k}) = {minus} is not the conjugate of v({k}) = {plus}; V must be real"
                )));
            }
        }
        Ok(Self {
            coeffs,
            k0,
            lambda,
            rho0: DEFAULT_RHO0,
        })
    }

    /// `λ·cos(2πx)`.
    pub fn almost_mathieu(lambda: f64) -> Self {
        Self::from_coefficients(&[(-1, 0.5, 0.0), (1, 0.5, 0.0)], lambda)
            .expect("cosine coefficients are conjugate-symmetric")
    }

    /// The constant potential `λ·c`.
    pub fn constant(c: f64, lambda: f64) -> Self {
        Self::from_coefficients(&[(0, c, 0.0)], lambda).expect("constant is real")
    }

    pub fn with_rho0(mut self, rho0: f64) -> Self {
        self.rho0 = rho0;
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// Highest `|k|` with a non-zero coefficient.
    pub fn degree(&self) -> usize {
        (0..=self.k0)
            .rev()
            .find(|&k| self.coeffs[self.k0 + k].norm() > 0.0)
            .unwrap_or(0)
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.k0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.k0 as i64) as usize]
        }
    }

    /// Upper bound for `sup |λV|` on the real circle.
    pub fn sup_bound(&self) -> f64 {
        self.lambda.abs() * self.coeffs.iter().map(|c| c.norm()).sum::<f64>()
    }

    /// Upper bound for `sup |λV′|` on the real circle.
    pub fn derivative_bound(&self) -> f64 {
        let k0 = self.k0 as i64;
        2.0 * PI
            * self.lambda.abs()
            * (-k0..=k0)
                .map(|k| k.abs() as f64 * self.coefficient(k).norm())
                .sum::<f64>()
    }

    /// `λ·Σ v(k) z^k` at any non-zero `z` (the Laurent-polynomial form).
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        let k0 = self.k0;
        let mut acc = self.coeffs[k0];
        if k0 > 0 {
            let zi = z.inv();
            let (mut p, mut q) = (z, zi);
            for k in 1..=k0 {
                acc += self.coeffs[k0 + k] * p + self.coeffs[k0 - k] * q;
                p *= z;
                q *= zi;
            }
        }
        acc * self.lambda
    }

    /// `λ·V(x)` on the real circle.
    pub fn eval_real(&self, x: f64) -> Result<f64> {
        let v = self.eval_unit(x);
        let residue = v.im.abs();
        if residue > RESIDUE_TOL * (1.0 + v.re.abs()) {
            return Err(Error::ImaginaryResidue { residue });
        }
        Ok(v.re)
    }

    /// `λ·V(x)` through the real Fourier form; assumes the conjugacy
    /// invariant established by the constructor.
    #[inline]
    pub(crate) fn value(&self, x: f64) -> f64 {
        let k0 = self.k0;
        let mut acc = self.coeffs[k0].re;
        if k0 > 0 {
            let e1 = Complex64::from_polar(1.0, 2.0 * PI * x);
            let mut p = e1;
            for k in 1..=k0 {
                let c = self.coeffs[k0 + k];
                acc += 2.0 * (c.re * p.re - c.im * p.im);
                p *= e1;
            }
        }
        acc * self.lambda
    }

    fn eval_unit(&self, x: f64) -> Complex64 {
        let k0 = self.k0;
        let mut acc = self.coeffs[k0];
        let e1 = Complex64::from_polar(1.0, 2.0 * PI * x);
        let mut p = e1;
        for k in 1..=k0 {
            acc += self.coeffs[k0 + k] * p + self.coeffs[k0 - k] * p.conj();
            p *= e1;
        }
        acc * self.lambda
    }

    /// `λ·V(x + iy)`, i.e. the Laurent form at `z = e(x + iy)`.
    pub fn eval_complex(&self, phase: ComplexPhase) -> Result<Complex64> {
        if phase.y.abs() > self.rho0 {
            return Err(Error::OutsideStrip {
                y: phase.y,
                rho0: self.rho0,
            });
        }
        Ok(self.eval_z(phase.to_z()))
    }

    /// `λ·V′(x) = λ·Re Σ 2πik v(k) e(kx)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let k0 = self.k0;
        let e1 = Complex64::from_polar(1.0, 2.0 * PI * x);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = e1;
        for k in 1..=k0 {
            let ik = Complex64::new(0.0, 2.0 * PI * k as f64);
            acc += ik * (self.coeffs[k0 + k] * p - self.coeffs[k0 - k] * p.conj());
            p *= e1;
        }
        let v = acc * self.lambda;
        if v.im.abs() > RESIDUE_TOL * (1.0 + v.re.abs()) {
            return Err(Error::ImaginaryResidue { residue: v.im.abs() });
        }
        Ok(v.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_values() {
        let p = Potential::almost_mathieu(1.0);
        assert!((p.eval_real(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(p.eval_real(0.25).unwrap().abs() < 1e-15);
        let p3 = Potential::almost_mathieu(3.0);
        assert!((p3.eval_real(0.5).unwrap() + 3.0).abs() < 1e-14);
        assert!((p3.value(0.5) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn cosine_derivative() {
        let p = Potential::almost_mathieu(1.0);
        assert!(p.derivative(0.0).unwrap().abs() < 1e-14);
        assert!((p.derivative(0.25).unwrap() + 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_real_potential() {
        let err = Potential::from_coefficients(&[(1, 0.5, 0.0), (-1, 0.5, 0.1)], 1.0);
        assert!(matches!(err, Err(Error::InvalidPotential(_))));
        let one_sided = Potential::from_coefficients(&[(1, 0.5, 0.0)], 1.0);
        assert!(one_sided.is_err());
        let imag_constant = Potential::from_coefficients(&[(0, 1.0, 0.5)], 1.0);
        assert!(imag_constant.is_err());
    }

    #[test]
    fn strip_is_enforced() {
        let p = Potential::almost_mathieu(1.0);
        assert!(matches!(
            p.eval_complex(ComplexPhase::new(0.0, 0.2)),
            Err(Error::OutsideStrip { .. })
        ));
        let t = 0.07;
        let v = p.eval_complex(ComplexPhase::new(0.0, t)).unwrap();
        assert!((v.re - (2.0 * PI * t).cosh()).abs() < 1e-13);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn degree_and_bounds() {
        let p = Potential::from_coefficients(&[(0, 0.3, 0.0), (2, 0.0, 0.5), (-2, 0.0, -0.5)], 2.0)
            .unwrap();
        assert_eq!(p.degree(), 2);
        assert!((p.sup_bound() - 2.0 * 1.3).abs() < 1e-15);
        let q = Potential::from_coefficients(&[(3, 0.0, 0.0), (-3, 0.0, 0.0), (1, 1.0, 0.0), (-1, 1.0, 0.0)], 1.0)
            .unwrap();
        assert_eq!(q.degree(), 1);
    }
}
