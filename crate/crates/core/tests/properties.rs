//! Structural invariants checked over random inputs.

use std::f64::consts::PI;

use proptest::prelude::*;
use qpspec::deviations::{bmo_estimate, deviation_fraction, fourier_decay};
use qpspec::dynamics::torus_distance;
use qpspec::lyapunov::avalanche_check;
use qpspec::spectrum::{ids, TridiagonalHamiltonian};
use qpspec::zeros::{concatenation_w, jensen_count, Polynomial};
use qpspec::{Cocycle, ComplexPhase, Complex64, Dynamics, Mat2, Phase, Potential};

fn amo(lambda: f64, omega: f64) -> Cocycle {
    Cocycle::new(Potential::almost_mathieu(lambda), Dynamics::rotation(omega))
}

fn dynamics_strategy() -> impl Strategy<Value = Dynamics> {
    prop_oneof![
        (0.01..0.99f64).prop_map(Dynamics::rotation),
        (0.01..0.99f64, 0.01..0.99f64).prop_map(|(a, b)| Dynamics::shift(vec![a, b]).unwrap()),
        (0.01..0.99f64).prop_map(Dynamics::skew_shift),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iteration_is_a_semigroup(d in dynamics_strategy(), a in 0u64..5000, b in 0u64..5000, x0 in 0.0..1.0f64, x1 in 0.0..1.0f64) {
        let x = Phase::new(vec![x0, x1][..d.dim()].to_vec());
        let lhs = d.iterate(&x, a + b).unwrap();
        let rhs = d.iterate(&d.iterate(&x, a).unwrap(), b).unwrap();
        for (p, q) in lhs.coords().iter().zip(rhs.coords()) {
            prop_assert!(torus_distance(p - q) < 1e-9);
        }
    }

    #[test]
    fn cocycle_property_and_submultiplicativity(
        lambda in 0.0..8.0f64, omega in 0.01..0.99f64, x in 0.0..1.0f64, e in -5.0..5.0f64,
        a in 1usize..400, b in 1usize..400,
    ) {
        let c = amo(lambda, omega);
        let x = Phase::circle(x);
        let full = c.window_product(&x, e, 1, a + b).unwrap();
        let head = c.window_product(&x, e, 1, a).unwrap();
        let tail = c.window_product(&x, e, a + 1, a + b).unwrap();
        let joined = tail.compose(&head);
        let ln = full.log_norm();
        prop_assert!((joined.log_norm() - ln).abs() <= 1e-9 * ln.abs().max(1.0));
        for i in 0..2 {
            for j in 0..2 {
                let p = full.entry(i, j);
                let q = joined.entry(i, j);
                if p.log_mag > ln - 20.0 {
                    prop_assert!((p.mul_exp(-ln).value() - q.mul_exp(-ln).value()).abs() < 1e-8);
                }
            }
        }
        prop_assert!(ln <= head.log_norm() + tail.log_norm() + 1e-9);
        let det = full.det();
        prop_assert!((det.value() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sturm_count_is_monotone_and_matches_sign_changes(
        diag in prop::collection::vec(-4.0..4.0f64, 1..80),
        mut es in prop::collection::vec(-7.0..7.0f64, 2..10),
    ) {
        let h = TridiagonalHamiltonian::new(diag.clone());
        es.sort_by(f64::total_cmp);
        let counts: Vec<usize> = es.iter().map(|&e| h.sturm_count(e)).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]));
        for &e in &es {
            // sign changes of f_0 = 1, f_1, …, f_N
            let mut f = vec![1.0f64, 0.0];
            let mut changes = 0;
            let (mut prev, mut cur) = (0.0f64, 1.0f64);
            for &d in &diag {
                let next = (d - e) * cur - prev;
                prev = cur;
                cur = next;
                let scale = cur.abs().max(prev.abs());
                if scale > 1e100 { cur /= scale; prev /= scale; }
                f[1] = cur;
                if f[1] * f[0] < 0.0 { changes += 1; }
                if f[1] != 0.0 { f[0] = f[1]; }
            }
            prop_assert_eq!(h.sturm_count(e), changes);
        }
    }

    #[test]
    fn ids_is_a_monotone_fraction(lambda in 0.0..5.0f64, omega in 0.01..0.99f64, seed in 0u64..1000) {
        let c = amo(lambda, omega);
        let top = 2.0 + lambda / 2.0 * 2.0 + 0.1;
        let energies: Vec<f64> = (0..30).map(|i| -top + 2.0 * top * i as f64 / 29.0).collect();
        let t = ids(&c, &energies, 40, 5, seed).unwrap();
        prop_assert!(t.values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(t.values[0], 0.0);
        prop_assert_eq!(*t.values.last().unwrap(), 1.0);
    }

    #[test]
    fn deviation_measure_is_monotone_in_threshold(values in prop::collection::vec(-50.0..50.0f64, 1..200), mut ts in prop::collection::vec(0.001..60.0f64, 2..8)) {
        ts.sort_by(f64::total_cmp);
        let m: Vec<f64> = ts.iter().map(|&t| deviation_fraction(&values, t).0).collect();
        prop_assert!(m.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn bmo_invariances(values in prop::collection::vec(-10.0..10.0f64, 256), shift in -100.0..100.0f64, scale in -8.0..8.0f64) {
        let base = bmo_estimate(&values).unwrap().value;
        prop_assert!(base >= 0.0);
        let shifted: Vec<f64> = values.iter().map(|u| u + shift).collect();
        prop_assert!((bmo_estimate(&shifted).unwrap().value - base).abs() <= 1e-12 * (1.0 + shift.abs()));
        let scaled: Vec<f64> = values.iter().map(|u| u * scale).collect();
        prop_assert!((bmo_estimate(&scaled).unwrap().value - scale.abs() * base).abs() <= 1e-12 * (1.0 + scale.abs() * base));
        // powers of two scale exactly
        let doubled: Vec<f64> = values.iter().map(|u| u * 4.0).collect();
        prop_assert_eq!(bmo_estimate(&doubled).unwrap().value, 4.0 * base);
    }

    #[test]
    fn fourier_truncation_obeys_parseval(values in prop::collection::vec(-10.0..10.0f64, 64..300), k in 0usize..30) {
        prop_assume!(values.len() >= 2 * k + 2);
        let modes = fourier_decay(&values, k, 1.0).unwrap();
        let total: f64 = modes.iter().map(|m| m.modulus * m.modulus).sum();
        let mean_sq = values.iter().map(|u| u * u).sum::<f64>() / values.len() as f64;
        prop_assert!(total <= mean_sq + 1e-8);
    }

    #[test]
    fn concatenation_terms_are_nonpositive(
        lambda in 0.0..8.0f64, omega in 0.01..0.99f64, x in 0.0..1.0f64, y in -0.1..0.1f64,
        e_re in -4.0..4.0f64, e_im in -0.5..0.5f64, m in 1usize..200,
    ) {
        let c = amo(lambda, omega);
        let w = concatenation_w(&c, ComplexPhase::new(x, y), Complex64::new(e_re, e_im), m).unwrap();
        prop_assert!(w <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jensen_count_is_additive(
        g_roots in prop::collection::vec((0.0..1.5f64, 0.0..1.0f64), 1..4),
        h_roots in prop::collection::vec((0.0..1.5f64, 0.0..1.0f64), 1..4),
    ) {
        let to_c = |v: &[(f64, f64)]| -> Vec<Complex64> {
            v.iter().map(|&(r, t)| Complex64::from_polar(0.05 + r, 2.0 * PI * t)).collect()
        };
        let (g, h) = (to_c(&g_roots), to_c(&h_roots));
        // keep roots away from the unit circle
        prop_assume!(g.iter().chain(&h).all(|z| (z.norm() - 1.0).abs() > 0.05));
        let gf = Polynomial::from_roots(g.clone());
        let hf = Polynomial::from_roots(h.clone());
        let both = Polynomial::from_roots(g.iter().chain(&h).copied().collect());
        let z0 = Complex64::new(0.0, 0.0);
        let jg = jensen_count(&gf, z0, 1.0, 512).unwrap();
        let jh = jensen_count(&hf, z0, 1.0, 512).unwrap();
        let jb = jensen_count(&both, z0, 1.0, 512).unwrap();
        prop_assert!((jb - jg - jh).abs() < 1e-8);
        let exact: f64 = g.iter().chain(&h).filter(|z| z.norm() < 1.0).map(|z| -z.norm().ln()).sum();
        prop_assert!((jb - exact).abs() < 1e-8);
    }
}

#[test]
fn diagonal_family_has_no_avalanche_discrepancy() {
    for &(n, mu) in &[(10usize, 50.0f64), (100, 1e4), (500, 1e6)] {
        let mats: Vec<Mat2<f64>> = (0..n)
            .map(|j| {
                let s = mu * (1.0 + 0.37 * (j as f64).sin().abs());
                Mat2::diag(s, 1.0 / s)
            })
            .collect();
        let r = avalanche_check(&mats, mu, 100.0).unwrap();
        assert!(r.hypotheses_hold());
        assert!(r.lhs_discrepancy <= 1e-12 * n as f64 * mu.ln(), "{r:?}");
    }
}
