//! TOML experiment configuration.

use std::path::{Path, PathBuf};

use qpspec::dynamics::{continued_fraction, diophantine_check};
use qpspec::{Cocycle, Dynamics, FirstSite, Potential, Sampler};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default)]
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub model: ModelConfig,
    pub dynamics: DynamicsConfig,
    #[serde(default)]
    pub grid: GridConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// `"cosine"`, `"constant"` or `"fourier"`.
    pub potential: String,
    pub lambda: f64,
    /// Value of the constant potential.
    pub value: Option<f64>,
    /// `[k, re, im]` triples for the Fourier potential.
    pub coefficients: Option<Vec<(i64, f64, f64)>>,
    pub rho0: Option<f64>,
    /// `"tx"` (default) or `"x"`.
    pub first_site: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Number(f64),
    Named(String),
    Vector(Vec<Frequency>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// `"shift"`, `"skew_shift"` or `"doubling"`.
    pub kind: String,
    pub omega: Option<Frequency>,
    pub diophantine: Option<DiophantineGate>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophantineGate {
    pub a: f64,
    pub c: f64,
    pub n_max: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// Parameter grid; each experiment reads the keys it needs and falls back
/// to its own defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub energies: Option<Vec<f64>>,
    pub energy_range: Option<EnergyRange>,
    pub n: Option<Vec<usize>>,
    pub eta: Option<Vec<f64>>,
    pub samples: Option<usize>,
    /// `"grid"`, `"random"` or `"orbit"`.
    pub sampler: Option<String>,
    /// Start phase for orbit sampling, or the fixed phase where one is used.
    pub phase: Option<f64>,
    pub h: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub c_scan: Option<f64>,
    pub mu: Option<f64>,
    pub length: Option<usize>,
    pub trials: Option<usize>,
    pub rotation: Option<f64>,
    pub c_gate: Option<f64>,
    pub threshold_exponent: Option<f64>,
    /// `"transfer_norm"` or `"det"`.
    pub statistic: Option<String>,
    pub grid_points: Option<usize>,
    pub modes: Option<usize>,
    pub k_const: Option<f64>,
    pub probes: Option<usize>,
    pub radius: Option<f64>,
    pub annulus_y: Option<f64>,
    pub index: Option<usize>,
}

fn invalid(msg: impl Into<String>) -> RunError {
    RunError::Validation(msg.into())
}

pub use qpspec::sampling::GOLDEN;
/// `√2 − 1`
pub const SILVER: f64 = 0.414_213_562_373_095_05;

fn parse_scalar(f: &Frequency) -> Result<f64, RunError> {
    match f {
        Frequency::Number(x) => Ok(*x),
        Frequency::Named(s) => match s.trim() {
            "golden" => Ok(GOLDEN),
            "silver" => Ok(SILVER),
            other => {
                let (p, q) = other
                    .split_once('/')
                    .ok_or_else(|| invalid(format!("unrecognized frequency {other:?}")))?;
                let p: f64 = p.trim().parse().map_err(|_| invalid(format!("bad numerator in {other:?}")))?;
                let q: f64 = q.trim().parse().map_err(|_| invalid(format!("bad denominator in {other:?}")))?;
                if q == 0.0 {
                    return Err(invalid(format!("zero denominator in {other:?}")));
                }
                Ok(p / q)
            }
        },
        Frequency::Vector(_) => Err(invalid("nested frequency vectors are not allowed")),
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    pub fn frequencies(&self) -> Result<Vec<f64>, RunError> {
        match &self.dynamics.omega {
            None => Ok(Vec::new()),
            Some(Frequency::Vector(v)) => v.iter().map(parse_scalar).collect(),
            Some(f) => Ok(vec![parse_scalar(f)?]),
        }
    }

    pub fn build_dynamics(&self) -> Result<Dynamics, RunError> {
        let omega = self.frequencies()?;
        let one = |name: &str| -> Result<f64, RunError> {
            match omega.as_slice() {
                [w] => Ok(*w),
                _ => Err(invalid(format!("{name} needs exactly one frequency"))),
            }
        };
        let d = match self.dynamics.kind.as_str() {
            "shift" => Dynamics::shift(omega.clone()).map_err(|e| invalid(e.to_string()))?,
            "skew_shift" => Dynamics::skew_shift(one("skew_shift")?),
            "doubling" => {
                if !omega.is_empty() {
                    return Err(invalid("the doubling map takes no frequency"));
                }
                Dynamics::doubling()
            }
            other => return Err(invalid(format!("unknown dynamics kind {other:?}"))),
        };
        if let Some(gate) = &self.dynamics.diophantine {
            for &w in &omega {
                let report = diophantine_check(w, gate.a, gate.n_max).map_err(|e| invalid(e.to_string()))?;
                if !report.satisfies(gate.c) {
                    let cf = continued_fraction(w, 40).map_err(|e| invalid(e.to_string()))?;
                    return Err(invalid(format!(
                        "frequency {w} fails the Diophantine condition ‖nω‖ ≥ {}/n^{} at n = {} (‖nω‖·n^a = {:e}{})",
                        gate.c,
                        gate.a,
                        report.worst_n,
                        report.worst_value,
                        if cf.rational { "; ω is rational" } else { "" }
                    )));
                }
            }
        }
        Ok(d)
    }

    pub fn build_potential(&self) -> Result<Potential, RunError> {
        let m = &self.model;
        let p = match m.potential.as_str() {
            "cosine" => Potential::almost_mathieu(m.lambda),
            "constant" => Potential::constant(m.value.ok_or_else(|| invalid("constant potential needs `value`"))?, m.lambda),
            "fourier" => {
                let c = m
                    .coefficients
                    .as_ref()
                    .ok_or_else(|| invalid("fourier potential needs `coefficients`"))?;
                Potential::from_coefficients(c, m.lambda).map_err(|e| invalid(e.to_string()))?
            }
            other => return Err(invalid(format!("unknown potential {other:?}"))),
        };
        if !m.lambda.is_finite() {
            return Err(invalid("lambda must be finite"));
        }
        Ok(match m.rho0 {
            Some(r) if r > 0.0 => p.with_rho0(r),
            Some(r) => return Err(invalid(format!("rho0 must be positive, got {r}"))),
            None => p,
        })
    }

    pub fn build_cocycle(&self) -> Result<Cocycle, RunError> {
        let first = match self.model.first_site.as_deref() {
            None | Some("tx") => FirstSite::Tx,
            Some("x") => FirstSite::X,
            Some(other) => return Err(invalid(format!("first_site must be \"tx\" or \"x\", got {other:?}"))),
        };
        Ok(Cocycle::new(self.build_potential()?, self.build_dynamics()?).with_first_site(first))
    }

    pub fn energies(&self, default: &[f64]) -> Result<Vec<f64>, RunError> {
        let g = &self.grid;
        let mut out = match (&g.energies, &g.energy_range) {
            (Some(_), Some(_)) => return Err(invalid("give either `energies` or `energy_range`, not both")),
            (Some(e), None) => e.clone(),
            (None, Some(r)) => {
                if r.count == 0 {
                    return Err(invalid("energy_range.count must be positive"));
                }
                if r.count == 1 {
                    vec![r.start]
                } else {
                    (0..r.count)
                        .map(|i| r.start + (r.stop - r.start) * i as f64 / (r.count - 1) as f64)
                        .collect()
                }
            }
            (None, None) => default.to_vec(),
        };
        if out.iter().any(|e| !e.is_finite()) {
            return Err(invalid("energies must be finite"));
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    pub fn sampler(&self, seed: u64) -> Result<Sampler, RunError> {
        match self.grid.sampler.as_deref() {
            None | Some("random") => Ok(Sampler::Random(seed)),
            Some("grid") => Ok(Sampler::Grid),
            Some("orbit") => {
                let d = self.build_dynamics()?.dim();
                let x = self.grid.phase.unwrap_or(0.0);
                Ok(Sampler::Orbit(qpspec::Phase::new(vec![x; d])))
            }
            Some(other) => Err(invalid(format!("unknown sampler {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
experiment = "ids"
[model]
potential = "cosine"
lambda = 3.0
[dynamics]
kind = "shift"
omega = "golden"
"#;

    #[test]
    fn golden_expands_to_full_precision() {
        let c = ExperimentConfig::from_toml(BASE).unwrap();
        // evaluating (√5 − 1)/2 in doubles is one ulp off the rounded value
        let rounded: f64 = "0.6180339887498948482045868343656381177203".parse().unwrap();
        assert_eq!(c.frequencies().unwrap(), vec![rounded]);
    }

    #[test]
    fn rational_frequencies_and_gate() {
        let text = BASE.replace("\"golden\"", "\"1/2\"") + "[dynamics.diophantine]\na = 2.0\nc = 0.01\nn_max = 100\n";
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.frequencies().unwrap(), vec![0.5]);
        match c.build_dynamics() {
            Err(RunError::Validation(msg)) => assert!(msg.contains("Diophantine"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let golden = BASE.to_string() + "[dynamics.diophantine]\na = 2.0\nc = 0.01\nn_max = 1000\n";
        assert!(ExperimentConfig::from_toml(&golden).unwrap().build_dynamics().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml(&(BASE.to_string() + "[grid]\nbogus = 1\n")).is_err());
    }

    #[test]
    fn energy_range_expands() {
        let text = BASE.to_string() + "[grid]\nenergy_range = { start = -1.0, stop = 1.0, count = 5 }\n";
        let c = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(c.energies(&[]).unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
