//! Zeros of Dirichlet determinants in the complexified phase.

use qpspec::sampling::stream;
use qpspec::spectrum::TridiagonalHamiltonian;
use qpspec::zeros::{
    annulus_zero_count, locate_with_jitter, locate_zeros, nu_sandwich, zero_count_additivity, zero_separation, Disk,
    DirichletDet, DEFAULT_ANNULUS_Y,
};
use qpspec::{Cocycle, ComplexPhase, Complex64, Dynamics, Phase, Potential};
use rand::Rng;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn amo(lambda: f64) -> Cocycle {
    Cocycle::new(Potential::almost_mathieu(lambda), Dynamics::rotation(GOLDEN))
}

#[test]
fn total_zero_count_respects_degree_ceiling() {
    let c = amo(3.0);
    for n in [8, 32, 64] {
        let count = annulus_zero_count(&c, 0.7, n, 0.05).unwrap();
        assert!((0..=2 * n as i64).contains(&count), "N = {n}: {count}");
    }
}

#[test]
fn located_zeros_are_roots_and_match_sandwich() {
    let c = amo(3.0);
    let n = 64;
    // an eigenvalue of H_N(x0) makes e(x0) a real zero of f_N(·, E)
    let x0 = 0.31;
    let h = TridiagonalHamiltonian::from_cocycle(&c, &Phase::circle(x0), n).unwrap();
    let e = h.eigenvalue(n / 2, 0.0);
    let f = DirichletDet::new(&c, Complex64::from(e), n).unwrap();
    let center = ComplexPhase::new(x0, 0.0).to_z();
    let set = locate_with_jitter(&f, center, 1.0 / n as f64, 1e-12).unwrap();
    assert!(!set.zeros.is_empty() && set.zeros.len() <= 10, "{set:?}");
    assert!(set.zeros.iter().any(|z| (z - center).norm() < 1e-8), "{set:?}");
    let r1 = set.disk.radius * 0.6;
    let s = nu_sandwich(&f, center, r1, r1 * 0.3, 512, None).unwrap();
    assert!(s.holds(), "{s:?}");
}

#[test]
fn random_disks_in_annulus() {
    let c = amo(3.0);
    let n = 64;
    let mut rng = stream(4, "disks", 0);
    for _ in 0..5 {
        let e = rng.gen_range(-4.0..4.0);
        let f = DirichletDet::new(&c, Complex64::from(e), n).unwrap();
        let center = ComplexPhase::new(rng.gen(), rng.gen_range(-0.05..0.05)).to_z();
        let s = nu_sandwich(&f, center, 0.01, 0.004, 512, None).unwrap();
        assert!(s.holds(), "{s:?}");
    }
}

#[test]
fn separation_and_additivity_reports() {
    let c = amo(3.0);
    let sep = zero_separation(&c, 0.5, 32, DEFAULT_ANNULUS_Y, 0.05, 6, 9).unwrap();
    assert_eq!(sep.counts.len(), 6);
    assert_eq!(sep.ceiling, 2);
    let disk = Disk::new(ComplexPhase::new(0.2, 0.0).to_z(), 0.05).unwrap();
    let add = zero_count_additivity(&c, 0.5, 16, disk).unwrap();
    let direct = locate_zeros(&DirichletDet::new(&c, Complex64::from(0.5), 32).unwrap(), disk, 1e-12).unwrap();
    assert_eq!(add.k, direct.zeros.len());
}
