//! Transfer matrices `M_n(x, E) = A(v_n)···A(v_1)` with
//! `A(v) = [[v − E, −1], [1, 0]]`, Dirichlet determinants
//! `f_{[a,b]} = det(H_{[a,b]} − E)`, and Green's-function entries built from
//! them. Site `k` carries `v_k = λV(T^k x)` by default; [`FirstSite::X`]
//! selects `v_k = λV(T^{k−1} x)` instead.

use num_complex::Complex64;

use crate::dynamics::{frac, Dynamics, Phase};
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Scalar, ScaledProduct, SignedLog};
use crate::potential::{ComplexPhase, Potential};

/// Which orbit point the first site samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FirstSite {
    /// `v_1 = λV(Tx)`
    #[default]
    Tx,
    /// `v_1 = λV(x)`
    X,
}

/// Running three-term recurrence `f_k = (v_k − E) f_{k−1} − f_{k−2}` with a
/// shared scale factor, started from `f_0 = 1, f_{−1} = 0`.
#[derive(Debug, Clone, Copy)]
pub struct DetRecurrence<T> {
    cur: T,
    prev: T,
    log_scale: f64,
}

impl<T: Scalar> Default for DetRecurrence<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> DetRecurrence<T> {
    pub fn new() -> Self {
        Self {
            cur: T::one(),
            prev: T::zero(),
            log_scale: 0.0,
        }
    }

    #[inline]
    pub fn step(&mut self, v_minus_e: T) {
        let next = v_minus_e * self.cur - self.prev;
        self.prev = self.cur;
        self.cur = next;
        let m = self.cur.modulus().max(self.prev.modulus());
        if m > 1e64 || (m < 1e-64 && m > 0.0) {
            let s = 1.0 / m;
            self.cur = self.cur.scale(s);
            self.prev = self.prev.scale(s);
            self.log_scale += m.ln();
        }
    }

    /// The latest determinant `f_k`.
    pub fn current(&self) -> SignedLog<T> {
        SignedLog::from_value(self.cur).mul_exp(self.log_scale)
    }

    /// The determinant one step back, `f_{k−1}`.
    pub fn previous(&self) -> SignedLog<T> {
        SignedLog::from_value(self.prev).mul_exp(self.log_scale)
    }
}

/// `A(v_n − E)···A(v_1 − E)` over the first `n` site values.
pub fn product_over<T: Scalar>(sites: impl Iterator<Item = T>, e: T, n: usize) -> ScaledProduct<T> {
    let mut p = ScaledProduct::identity();
    for v in sites.take(n) {
        p.push_left(&Mat2::transfer(v - e));
    }
    p
}

/// Iterator over real site values `v_1, v_2, …` along an orbit.
pub struct Sites<'a> {
    potential: &'a Potential,
    dynamics: &'a Dynamics,
    phase: Phase,
    step_first: bool,
}

impl Iterator for Sites<'_> {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        if self.step_first {
            self.dynamics.step(&mut self.phase);
            Some(self.potential.value(self.phase.x()))
        } else {
            let v = self.potential.value(self.phase.x());
            self.dynamics.step(&mut self.phase);
            Some(v)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    potential: Potential,
    dynamics: Dynamics,
    first_site: FirstSite,
}

impl Cocycle {
    pub fn new(potential: Potential, dynamics: Dynamics) -> Self {
        Self {
            potential,
            dynamics,
            first_site: FirstSite::Tx,
        }
    }

    pub fn with_first_site(mut self, first_site: FirstSite) -> Self {
        self.first_site = first_site;
        self
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn first_site(&self) -> FirstSite {
        self.first_site
    }

    /// Site values `v_1, v_2, …` for the orbit of `x`.
    pub fn sites(&self, x: &Phase) -> Result<Sites<'_>> {
        self.dynamics.check_phase(x)?;
        Ok(Sites {
            potential: &self.potential,
            dynamics: &self.dynamics,
            phase: x.clone(),
            step_first: self.first_site == FirstSite::Tx,
        })
    }

    /// Site values `v_a, …, v_b` (1-based, inclusive).
    pub fn site_values(&self, x: &Phase, a: usize, b: usize) -> Result<Vec<f64>> {
        if b < a {
            return Ok(Vec::new());
        }
        let start = self.dynamics.iterate(x, (a.max(1) - 1) as u64)?;
        Ok(self.sites(&start)?.take(b + 1 - a).collect())
    }

    /// `M_n(x, E)` in scaled form.
    pub fn transfer_product(&self, x: &Phase, e: f64, n: usize) -> Result<ScaledProduct<f64>> {
        checked(product_over(self.sites(x)?, e, n))
    }

    /// `M_n(x, E)` at a complex energy.
    pub fn transfer_product_complex(&self, x: &Phase, e: Complex64, n: usize) -> Result<ScaledProduct<Complex64>> {
        checked(product_over(self.sites(x)?.map(Complex64::from), e, n))
    }

    /// `M_{[a,b]}(x, E) = A(v_b − E)···A(v_a − E)`.
    pub fn window_product<T: Scalar>(&self, x: &Phase, e: T, a: usize, b: usize) -> Result<ScaledProduct<T>> {
        let v = self.site_values(x, a, b)?;
        checked(product_over(v.into_iter().map(T::from_real), e, usize::MAX))
    }

    /// `f_1, …, f_n` with `f_k = det(H_{[1,k]}(x) − E)`.
    pub fn det_sequence(&self, x: &Phase, e: f64, n: usize) -> Result<Vec<SignedLog<f64>>> {
        let mut rec = DetRecurrence::new();
        Ok(self
            .sites(x)?
            .take(n)
            .map(|v| {
                rec.step(v - e);
                rec.current()
            })
            .collect())
    }

    /// `(f_{[a,b]}, f_{[a,b−1]})`, with `f_{[a,a−1]} = 1` and `f_{[a,a−2]} = 0`.
    pub fn det_pair<T: Scalar>(&self, x: &Phase, e: T, a: usize, b: usize) -> Result<(SignedLog<T>, SignedLog<T>)> {
        if a == 0 {
            return Err(Error::Domain("determinant windows are 1-based".into()));
        }
        if b + 2 < a {
            return Err(Error::Domain(format!("empty window [{a}, {b}] below the convention range")));
        }
        if b + 2 == a {
            return Ok((SignedLog::zero(), SignedLog::zero()));
        }
        let mut rec = DetRecurrence::new();
        for v in self.site_values(x, a, b)? {
            rec.step(T::from_real(v) - e);
        }
        Ok((rec.current(), rec.previous()))
    }

    /// `f_{[a,b]}(x, E)`.
    pub fn det_window<T: Scalar>(&self, x: &Phase, e: T, a: usize, b: usize) -> Result<SignedLog<T>> {
        Ok(self.det_pair(x, e, a, b)?.0)
    }

    /// The monodromy `M_{[a,b]}` assembled from determinant windows:
    /// `[[f_{[a,b]}, −f_{[a+1,b]}], [f_{[a,b−1]}, −f_{[a+1,b−1]}]]`.
    pub fn monodromy_from_dets<T: Scalar>(
        &self,
        x: &Phase,
        e: T,
        a: usize,
        b: usize,
    ) -> Result<[[SignedLog<T>; 2]; 2]> {
        if b < a {
            return Err(Error::Domain(format!("monodromy window [{a}, {b}] is empty")));
        }
        let (f_ab, f_ab1) = self.det_pair(x, e, a, b)?;
        let (g_ab, g_ab1) = self.det_pair(x, e, a + 1, b)?;
        Ok([[f_ab, g_ab.neg()], [f_ab1, g_ab1.neg()]])
    }

    /// Green's function entry `(H_{[1,N]}(x) − E)^{−1}(j, k)` from Cramer's
    /// rule: `f_{[1,j−1]} · f_{[k+1,N]} / f_{[1,N]}` for `j ≤ k`.
    pub fn green_entry(&self, x: &Phase, e: Complex64, j: usize, k: usize, n: usize) -> Result<SignedLog<Complex64>> {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        if j == 0 || k > n {
            return Err(Error::Domain(format!("need 1 ≤ j ≤ k ≤ N, got j = {j}, k = {k}, N = {n}")));
        }
        let full = self.det_window(x, e, 1, n)?;
        let left = self.det_window(x, e, 1, j - 1)?;
        let right = self.det_window(x, e, k + 1, n)?;
        left.mul(right).div(full)
    }

    /// All diagonal Green's function entries of `H_{[a,b]}` at once, using
    /// prefix and suffix determinant recurrences.
    pub fn green_diagonal(&self, x: &Phase, e: Complex64, a: usize, b: usize) -> Result<Vec<SignedLog<Complex64>>> {
        let v: Vec<Complex64> = self.site_values(x, a, b)?.into_iter().map(Complex64::from).collect();
        let m = v.len();
        // prefix[i] = f over the first i sites, suffix[i] = f over sites i.. (0-based)
        let mut prefix = Vec::with_capacity(m + 1);
        let mut rec = DetRecurrence::new();
        prefix.push(rec.current());
        for &s in &v {
            rec.step(s - e);
            prefix.push(rec.current());
        }
        let mut suffix = vec![SignedLog::one(); m + 1];
        let mut rec = DetRecurrence::new();
        for i in (0..m).rev() {
            rec.step(v[i] - e);
            suffix[i] = rec.current();
        }
        let full = prefix[m];
        (0..m).map(|i| prefix[i].mul(suffix[i + 1]).div(full)).collect()
    }

    fn complex_site_iter(&self, z: Complex64) -> Result<impl Iterator<Item = Complex64> + '_> {
        let omega = self.dynamics.circle_frequency()?;
        let offset = match self.first_site {
            FirstSite::Tx => 1,
            FirstSite::X => 0,
        };
        let p = &self.potential;
        Ok((offset..).map(move |k: u64| {
            let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * frac(k as f64 * omega));
            p.eval_z(z * rot)
        }))
    }

    /// `f_n` with the potential evaluated at the complexified orbit
    /// `z·e(kω)` of the annulus point `z`. Shift dynamics only.
    pub fn det_z(&self, z: Complex64, e: Complex64, n: usize) -> Result<SignedLog<Complex64>> {
        let mut rec = DetRecurrence::new();
        for v in self.complex_site_iter(z)?.take(n) {
            rec.step(v - e);
        }
        Ok(rec.current())
    }

    /// `f_n(e(x + iy), ω, E)` for a phase inside the configured strip.
    pub fn complex_det(&self, phase: ComplexPhase, e: Complex64, n: usize) -> Result<SignedLog<Complex64>> {
        if phase.y.abs() > self.potential.rho0() {
            return Err(Error::OutsideStrip {
                y: phase.y,
                rho0: self.potential.rho0(),
            });
        }
        self.det_z(phase.to_z(), e, n)
    }

    /// `M_n` along the complexified orbit of `z`. Shift dynamics only.
    pub fn transfer_product_z(&self, z: Complex64, e: Complex64, n: usize) -> Result<ScaledProduct<Complex64>> {
        checked(product_over(self.complex_site_iter(z)?, e, n))
    }
}

fn checked<T: Scalar>(p: ScaledProduct<T>) -> Result<ScaledProduct<T>> {
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::NumericOverflow)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free() -> Cocycle {
        Cocycle::new(Potential::constant(0.0, 1.0), Dynamics::rotation(0.5f64.sqrt()))
    }

    fn amo(lambda: f64) -> Cocycle {
        Cocycle::new(Potential::almost_mathieu(lambda), Dynamics::rotation((5f64.sqrt() - 1.0) / 2.0))
    }

    #[test]
    fn single_factor() {
        let c = amo(2.0);
        let x = Phase::circle(0.17);
        let e = 0.3;
        let p = c.transfer_product(&x, e, 1).unwrap();
        let v1 = c.potential().eval_real(c.dynamics().iterate(&x, 1).unwrap().x()).unwrap();
        let m = p.reconstruct();
        assert!((m.get(0, 0) - (v1 - e)).abs() < 1e-14);
        assert!((m.get(0, 1) + 1.0).abs() < 1e-14);
        assert!((m.get(1, 0) - 1.0).abs() < 1e-14);
        assert!(m.get(1, 1).abs() < 1e-14);
    }

    #[test]
    fn first_site_convention() {
        let x = Phase::circle(0.17);
        let c = amo(2.0).with_first_site(FirstSite::X);
        let v = c.site_values(&x, 1, 2).unwrap();
        assert!((v[0] - 2.0 * (2.0 * std::f64::consts::PI * 0.17).cos()).abs() < 1e-14);
    }

    #[test]
    fn small_determinants() {
        let c = amo(2.5);
        let x = Phase::circle(0.4);
        let e = -0.7;
        let v = c.site_values(&x, 1, 2).unwrap();
        let f = c.det_sequence(&x, e, 2).unwrap();
        assert!((f[0].value() - (v[0] - e)).abs() < 1e-14);
        assert!((f[1].value() - ((v[0] - e) * (v[1] - e) - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn free_determinants_and_exact_zero() {
        let f = free().det_sequence(&Phase::circle(0.2), 0.0, 4).unwrap();
        assert!(f[0].is_zero());
        assert_eq!(f[1].value(), -1.0);
        assert!(f[2].is_zero());
        assert_eq!(f[3].value(), 1.0);
    }

    #[test]
    fn monodromy_conventions() {
        let c = amo(1.3);
        let x = Phase::circle(0.61);
        let e = 0.2;
        let m = c.monodromy_from_dets(&x, e, 1, 1).unwrap();
        let v1 = c.site_values(&x, 1, 1).unwrap()[0];
        assert!((m[0][0].value() - (v1 - e)).abs() < 1e-14);
        assert_eq!(m[0][1].value(), -1.0);
        assert_eq!(m[1][0].value(), 1.0);
        assert!(m[1][1].is_zero());

        let m = free().monodromy_from_dets(&x, 0.0, 1, 2).unwrap();
        let vals: Vec<f64> = m.iter().flatten().map(|s| s.value()).collect();
        assert_eq!(vals, vec![-1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn green_one_site() {
        let c = amo(1.7);
        let x = Phase::circle(0.05);
        let e = Complex64::new(0.4, 0.01);
        let g = c.green_entry(&x, e, 1, 1, 1).unwrap().value();
        let v1 = c.site_values(&x, 1, 1).unwrap()[0];
        assert!((g - 1.0 / (Complex64::from(v1) - e)).norm() < 1e-13);
    }

    #[test]
    fn green_at_eigenvalue_is_singular() {
        // V = 0, N = 1: eigenvalue 0
        let r = free().green_entry(&Phase::circle(0.3), Complex64::new(0.0, 0.0), 1, 1, 1);
        assert_eq!(r, Err(Error::SingularEnergy));
    }

    #[test]
    fn complex_det_restricts_to_real() {
        let c = amo(3.0);
        let x = 0.37;
        let e = 0.25;
        let real = c.det_sequence(&Phase::circle(x), e, 30).unwrap()[29];
        let cplx = c.complex_det(ComplexPhase::new(x, 0.0), Complex64::from(e), 30).unwrap();
        assert!((real.log_mag - cplx.log_mag).abs() < 1e-10);
        assert!((cplx.phase - Complex64::from(real.phase)).norm() < 1e-8);
    }

    #[test]
    fn complex_det_needs_shift() {
        let c = Cocycle::new(Potential::almost_mathieu(1.0), Dynamics::doubling());
        assert!(matches!(
            c.complex_det(ComplexPhase::new(0.1, 0.0), Complex64::from(0.0), 3),
            Err(Error::UnsupportedDynamics("doubling"))
        ));
    }
}
