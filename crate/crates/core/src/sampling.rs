//! Phase samplers and deterministic per-sample random streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{frac, Dynamics, DynamicsKind, Phase};
use crate::error::Result;

/// Golden-ratio fraction used to offset grids away from resonances with ω.
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub enum Sampler {
    /// Equispaced phases `(j + g)/m`, `g` the golden fraction.
    Grid,
    /// Consecutive length-`n` segments of one orbit starting at the phase.
    Orbit(Phase),
    /// Independent uniform phases from the given root seed.
    Random(u64),
}

impl Sampler {
    pub fn name(&self) -> &'static str {
        match self {
            Sampler::Grid => "grid",
            Sampler::Orbit(_) => "orbit",
            Sampler::Random(_) => "random",
        }
    }

    /// `m` sample phases for products of length `n`.
    pub fn phases(&self, dynamics: &Dynamics, n: usize, m: usize) -> Result<Vec<Phase>> {
        let d = dynamics.dim();
        match self {
            Sampler::Grid => Ok((0..m).map(|j| grid_phase(j, m, d)).collect()),
            Sampler::Random(seed) => Ok((0..m)
                .map(|j| random_phase(&mut stream(*seed, "phase", j as u64), d))
                .collect()),
            Sampler::Orbit(start) => {
                dynamics.check_phase(start)?;
                if matches!(dynamics.kind(), DynamicsKind::Doubling) {
                    // Binary orbits of the doubling map die after ~52 steps.
                    let seed = start.coords().iter().fold(0u64, |h, c| splitmix(h ^ c.to_bits()));
                    return Sampler::Random(seed).phases(dynamics, n, m);
                }
                let mut out = Vec::with_capacity(m);
                let mut x = start.clone();
                for _ in 0..m {
                    let next = dynamics.iterate(&x, n as u64)?;
                    out.push(x);
                    x = next;
                }
                Ok(out)
            }
        }
    }
}

/// Point `j` of an `m`-point grid on `T^d`; extra coordinates follow a
/// Kronecker sequence.
pub fn grid_phase(j: usize, m: usize, d: usize) -> Phase {
    const KRONECKER: [f64; 4] = [
        0.414_213_562_373_095_1,
        0.732_050_807_568_877_2,
        0.236_067_977_499_789_7,
        0.645_751_311_064_590_6,
    ];
    let t = j as f64 + GOLDEN;
    let mut coords = Vec::with_capacity(d);
    coords.push(t / m as f64);
    for i in 1..d {
        coords.push(frac(t * KRONECKER[(i - 1) % KRONECKER.len()] + i as f64 * GOLDEN));
    }
    Phase::new(coords)
}

pub fn random_phase<R: Rng>(rng: &mut R, d: usize) -> Phase {
    Phase::new((0..d).map(|_| rng.gen::<f64>()).collect::<Vec<_>>())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `index` of `label` under `root`; independent of the order
/// in which streams are requested.
pub fn stream_seed(root: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label keeps the mapping stable across toolchains.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix(splitmix(root ^ h) ^ index)
}

pub fn stream(root: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(root, label, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream(7, "phase", 3).gen();
        let b: f64 = stream(7, "phase", 3).gen();
        let c: f64 = stream(7, "phase", 4).gen();
        let d: f64 = stream(7, "other", 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn orbit_segments_follow_dynamics() {
        let dyn_ = Dynamics::rotation(0.1234);
        let start = Phase::circle(0.3);
        let ph = Sampler::Orbit(start.clone()).phases(&dyn_, 10, 3).unwrap();
        assert_eq!(ph[0], start);
        let expect = dyn_.iterate(&start, 20).unwrap();
        assert!((ph[2].x() - expect.x()).abs() < 1e-12);
    }

    #[test]
    fn grid_in_range() {
        for j in 0..16 {
            let p = grid_phase(j, 16, 2);
            assert!(p.coords().iter().all(|c| (0.0..1.0).contains(c)));
        }
    }
}
