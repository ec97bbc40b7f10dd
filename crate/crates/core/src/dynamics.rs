//! Base dynamics on the torus and Diophantine diagnostics for the frequency.
//!
//! Three maps are supported: the shift `x ↦ x + ω` on `T^d`, the skew-shift
//! `(x, y) ↦ (x + y, y + ω)` on `T^2`, and the doubling map `x ↦ 2x` on `T`.
//! The skew-shift `(x, y) ↦ (x + ω, y + x)` is conjugate to the form used
//! here by swapping coordinates; only the latter is implemented since it has
//! the closed iterate `T^n(x, y) = (x + ny + n(n−1)ω/2, y + nω)`.
//!
//! Binary floating point makes every doubling orbit collapse to `0` after
//! about 52 steps. Samplers therefore draw a fresh random phase per orbit
//! segment for the doubling map instead of following one long orbit.

use crate::error::{Error, Result};

/// Reduces `t` to `[0, 1)`.
#[inline]
pub fn frac(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `frac(n·w)` with the product rounding error recovered by an FMA, so large
/// iterate counts keep full precision.
#[inline]
fn frac_mul(n: f64, w: f64) -> f64 {
    let p = n * w;
    let err = n.mul_add(w, -p);
    frac(frac(p) + err)
}

/// Distance to the nearest integer, `‖t‖ ∈ [0, 1/2]`.
pub fn torus_distance(t: f64) -> f64 {
    let r = t.abs() - t.abs().floor();
    r.min(1.0 - r)
}

/// A point of `T^d` with every coordinate in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase(Vec<f64>);

impl Phase {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Phase(coords.into().into_iter().map(frac).collect())
    }

    pub fn circle(x: f64) -> Self {
        Phase(vec![frac(x)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// First coordinate; the potential is sampled here.
    pub fn x(&self) -> f64 {
        self.0[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsKind {
    Shift { omega: Vec<f64> },
    SkewShift { omega: f64 },
    Doubling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dynamics {
    kind: DynamicsKind,
}

impl Dynamics {
    pub fn shift(omega: impl Into<Vec<f64>>) -> Result<Self> {
        let omega: Vec<f64> = omega.into();
        if omega.is_empty() {
            return Err(Error::InvalidDynamics("shift needs at least one frequency".into()));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidDynamics("non-finite frequency".into()));
        }
        Ok(Self {
            kind: DynamicsKind::Shift { omega },
        })
    }

    /// Circle rotation by `omega`.
    pub fn rotation(omega: f64) -> Self {
        Self {
            kind: DynamicsKind::Shift { omega: vec![omega] },
        }
    }

    pub fn skew_shift(omega: f64) -> Self {
        Self {
            kind: DynamicsKind::SkewShift { omega },
        }
    }

    pub fn doubling() -> Self {
        Self {
            kind: DynamicsKind::Doubling,
        }
    }

    pub fn kind(&self) -> &DynamicsKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DynamicsKind::Shift { omega } => omega.len(),
            DynamicsKind::SkewShift { .. } => 2,
            DynamicsKind::Doubling => 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DynamicsKind::Shift { .. } => "shift",
            DynamicsKind::SkewShift { .. } => "skew_shift",
            DynamicsKind::Doubling => "doubling",
        }
    }

    /// The frequency of a one-dimensional shift, required by the
    /// complexified-phase operations.
    pub fn circle_frequency(&self) -> Result<f64> {
        match &self.kind {
            DynamicsKind::Shift { omega } if omega.len() == 1 => Ok(omega[0]),
            _ => Err(Error::UnsupportedDynamics(self.name())),
        }
    }

    pub fn check_phase(&self, x: &Phase) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// One application of `T`, in place.
    #[inline]
    pub fn step(&self, x: &mut Phase) {
        match &self.kind {
            DynamicsKind::Shift { omega } => {
                for (c, w) in x.0.iter_mut().zip(omega) {
                    *c = frac(*c + w);
                }
            }
            DynamicsKind::SkewShift { omega } => {
                let (a, b) = (x.0[0], x.0[1]);
                x.0[0] = frac(a + b);
                x.0[1] = frac(b + omega);
            }
            DynamicsKind::Doubling => {
                x.0[0] = frac(2.0 * x.0[0]);
            }
        }
    }

    /// `T^n x`. Shift and skew-shift use closed forms; doubling doubles `n`
    /// times with reduction after every step.
    pub fn iterate(&self, x: &Phase, n: u64) -> Result<Phase> {
        self.check_phase(x)?;
        let out = match &self.kind {
            DynamicsKind::Shift { omega } => Phase(
                x.0.iter()
                    .zip(omega)
                    .map(|(c, w)| frac(c + frac_mul(n as f64, *w)))
                    .collect(),
            ),
            DynamicsKind::SkewShift { omega } => {
                let nf = n as f64;
                // n(n−1)/2 is an integer; reduce it before multiplying by ω.
                let tri = if n.is_multiple_of(2) {
                    (n / 2) as f64 * (nf - 1.0)
                } else {
                    nf * ((n - 1) / 2) as f64
                };
                let quad = frac_mul(tri, *omega);
                let lin = frac_mul(nf, x.0[1]);
                Phase(vec![
                    frac(frac(x.0[0] + lin) + quad),
                    frac(x.0[1] + frac_mul(nf, *omega)),
                ])
            }
            DynamicsKind::Doubling => {
                let mut y = x.clone();
                for _ in 0..n {
                    self.step(&mut y);
                }
                y
            }
        };
        Ok(out)
    }
}

/// One term of a continued-fraction expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Convergent {
    pub partial_quotient: u64,
    pub p: u64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    pub terms: Vec<Convergent>,
    /// Set when the expansion terminated because `ω` is rational to
    /// working precision.
    pub rational: bool,
}

/// Continued-fraction expansion of `ω ∈ (0, 1)` to at most `depth` terms.
/// The expansion stops early, with `rational` set, once `|q ω − p|` drops
/// to the rounding level of `q ω` (for the golden mean around depth 35).
///
/// Runs the remainder recursion `β_{k+1} = β_{k−1} − a_{k+1} β_k` with
/// `β_{−1} = 1, β_0 = ω`, so that `β_k = |q_k ω − p_k|`; this keeps every
/// step an absolute-error subtraction instead of iterating `1/x − ⌊1/x⌋`.
pub fn continued_fraction(omega: f64, depth: usize) -> Result<ContinuedFraction> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::Domain(format!("continued fraction needs ω in (0,1), got {omega}")));
    }
    let mut terms = Vec::with_capacity(depth);
    let (mut beta_prev, mut beta) = (1.0_f64, omega);
    let (mut p_prev, mut p) = (1u64, 0u64);
    let (mut q_prev, mut q) = (0u64, 1u64);
    let mut rational = false;

    for _ in 0..depth {
        let mut a = (beta_prev / beta).floor();
        let mut next = beta_prev - a * beta;
        if next < 0.0 {
            a -= 1.0;
            next += beta;
        } else if next >= beta {
            a += 1.0;
            next -= beta;
        }
        let a = a as u64;
        let (p_new, q_new) = (a * p + p_prev, a * q + q_prev);
        terms.push(Convergent {
            partial_quotient: a,
            p: p_new,
            q: q_new,
        });
        p_prev = p;
        p = p_new;
        q_prev = q;
        q = q_new;
        beta_prev = beta;
        beta = next;
        // β_k carries an absolute error of about q_k·ε from the rounding of ω.
        if beta <= f64::EPSILON * q as f64 {
            rational = true;
            break;
        }
    }
    Ok(ContinuedFraction { terms, rational })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineReport {
    /// Largest `c` with `‖nω‖ ≥ c / n^a` for all tested `n`.
    pub c: f64,
    pub a: f64,
    pub worst_n: u64,
    /// `min_n ‖nω‖ · n^a` over `1 ≤ n ≤ n_max`.
    pub worst_value: f64,
    /// `min_n ‖nω‖ · n (log n)^a` over `2 ≤ n ≤ n_max`.
    pub worst_log_value: f64,
    pub worst_log_n: u64,
}

impl DiophantineReport {
    /// Whether the power-law condition `‖nω‖ ≥ c / n^a` held on the tested range.
    pub fn satisfies(&self, c: f64) -> bool {
        self.worst_value >= c
    }
}

/// Exhaustive scan of `‖nω‖ · n^a` (and the logarithmic variant) for
/// `1 ≤ n ≤ n_max`.
pub fn diophantine_check(omega: f64, a: f64, n_max: u64) -> Result<DiophantineReport> {
    if a <= 1.0 || n_max == 0 {
        return Err(Error::Domain(format!("need a > 1 and n_max ≥ 1 (a = {a}, n_max = {n_max})")));
    }
    let mut worst = (f64::INFINITY, 1);
    let mut worst_log = (f64::INFINITY, 0);
    for n in 1..=n_max {
        let nf = n as f64;
        let d = torus_distance(nf * omega);
        let v = d * nf.powf(a);
        if v < worst.0 {
            worst = (v, n);
        }
        if n >= 2 {
            let w = d * nf * nf.ln().powf(a);
            if w < worst_log.0 {
                worst_log = (w, n);
            }
        }
    }
    Ok(DiophantineReport {
        c: worst.0,
        a,
        worst_n: worst.1,
        worst_value: worst.0,
        worst_log_value: worst_log.0,
        worst_log_n: worst_log.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterate_examples() {
        let s = Dynamics::rotation(0.3);
        let y = s.iterate(&Phase::circle(0.1), 3).unwrap();
        assert!(torus_distance(y.x()) < 1e-12);

        let sk = Dynamics::skew_shift(0.1);
        let y = sk.iterate(&Phase::new([0.2, 0.3]), 2).unwrap();
        assert!(torus_distance(y.coords()[0] - 0.9) < 1e-12);
        assert!(torus_distance(y.coords()[1] - 0.5) < 1e-12);

        let d = Dynamics::doubling();
        let y = d.iterate(&Phase::circle(0.3), 2).unwrap();
        assert!((y.x() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let sk = Dynamics::skew_shift(0.1);
        assert!(matches!(
            sk.iterate(&Phase::circle(0.2), 1),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn torus_distance_examples() {
        assert!((torus_distance(2.7) - 0.3).abs() < 1e-12);
        assert_eq!(torus_distance(-0.5), 0.5);
        assert_eq!(torus_distance(1.0), 0.0);
    }

    #[test]
    fn rational_frequency() {
        let cf = continued_fraction(0.5, 10).unwrap();
        assert!(cf.rational);
        assert_eq!(cf.terms.iter().map(|t| t.partial_quotient).collect::<Vec<_>>(), vec![2]);

        let r = diophantine_check(0.5, 2.0, 100).unwrap();
        assert_eq!(r.worst_value, 0.0);
        assert_eq!(r.worst_n, 2);
    }

    #[test]
    fn phases_reduced() {
        let p = Phase::new([1.25, -0.25]);
        assert_eq!(p.coords(), &[0.25, 0.75]);
        assert_eq!(frac(-1e-20), 0.0);
    }
}
