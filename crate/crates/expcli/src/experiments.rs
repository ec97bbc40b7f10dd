//! The named experiments. Each reads its parameters from the config grid,
//! evaluates grid points in a fixed order, and returns a table.

use qpspec::deviations::{
    bmo_estimate, deviation_measure, fourier_decay as fourier_modes, GridFunction, Statistic,
};
use qpspec::lyapunov::{
    avalanche_check, convergence_scan, finite_lyapunov, hyperbolic_sequence, positivity_probe as probe,
    DEFAULT_AP_GATE, DEFAULT_SCAN_CONSTANT, DEFAULT_SIGMA,
};
use qpspec::sampling::{random_phase, stream, stream_seed, GOLDEN as GRID_OFFSET};
use qpspec::spectrum::{
    concatenation_bound_check, green_decay_check, hellmann_feynman as hf, ids as ids_table, min_gap as gap,
    thouless_check as thouless, wegner_measure, window_count, DEFAULT_GAP_DELTA,
};
use qpspec::zeros::{
    annulus_zero_count, zero_count_additivity, zero_separation, Disk, DEFAULT_ANNULUS_Y,
};
use qpspec::{Cocycle, ComplexPhase, Error, Phase};
use rand::Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::row;
use crate::table::{Cell, Table};
use crate::RunError;

pub struct Experiment {
    pub name: &'static str,
    pub doc: &'static str,
    pub run: fn(&ExperimentConfig) -> Result<Table, RunError>,
}

/// Sorted by name.
pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "avalanche_fuzz",
        doc: "avalanche-principle discrepancy on random hyperbolic SL(2,R) sequences",
        run: avalanche_fuzz,
    },
    Experiment {
        name: "bmo_trend",
        doc: "dyadic BMO proxy of log|f_n| or log||M_n|| on a phase grid, per n",
        run: bmo_trend,
    },
    Experiment {
        name: "concatenation_bound",
        doc: "eigenvalue counts in (E-eta, E+eta) against 4*eta*sum W_{N,k}, plus the resolvent/IPR inequality",
        run: concatenation_bound,
    },
    Experiment {
        name: "fourier_decay",
        doc: "Fourier coefficients of u_n on a phase grid with the ratio |u^(nu)|*|nu|/n",
        run: fourier_decay,
    },
    Experiment {
        name: "green_decay",
        doc: "off-diagonal Green's function decay on phases where log|f_l| is large",
        run: green_decay,
    },
    Experiment {
        name: "hellmann_feynman",
        doc: "phase derivative of eigenvalues: analytic formula against central differences",
        run: hellmann_feynman,
    },
    Experiment {
        name: "holder_scan",
        doc: "mean eigenvalue counts in shrinking windows for Holder/Lipschitz fits",
        run: holder_scan,
    },
    Experiment {
        name: "ids",
        doc: "integrated density of states from Sturm counts",
        run: ids,
    },
    Experiment {
        name: "ldt_decay",
        doc: "measure of large deviations of u_n at threshold n^exponent",
        run: ldt_decay,
    },
    Experiment {
        name: "lyapunov_scan",
        doc: "finite-scale Lyapunov exponents along a doubling chain",
        run: lyapunov_scan,
    },
    Experiment {
        name: "min_gap",
        doc: "smallest eigenvalue spacing of H_N(x) against exp(-N^delta)",
        run: min_gap,
    },
    Experiment {
        name: "positivity_probe",
        doc: "initial-scale conditions that predict a positive Lyapunov exponent",
        run: positivity_probe,
    },
    Experiment {
        name: "thouless_check",
        doc: "mean log-determinant per site against L_N",
        run: thouless_check,
    },
    Experiment {
        name: "wegner",
        doc: "measure of phases with spectrum within exp(-H) of E",
        run: wegner,
    },
    Experiment {
        name: "zero_additivity",
        doc: "zero counts of f_m, its shift, and f_2m in small disks",
        run: zero_additivity,
    },
    Experiment {
        name: "zeros_probe",
        doc: "zeros of f_N(z) in random small disks of the annulus and the total count",
        run: zeros_probe,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.name).collect()
}

fn invalid(msg: impl Into<String>) -> RunError {
    RunError::Validation(msg.into())
}

fn positive(name: &str, v: usize) -> Result<usize, RunError> {
    if v == 0 {
        Err(invalid(format!("`{name}` must be positive")))
    } else {
        Ok(v)
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    cocycle: Cocycle,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self, RunError> {
        Ok(Self {
            cfg,
            cocycle: cfg.build_cocycle()?,
        })
    }

    fn energies(&self, default: &[f64]) -> Result<Vec<f64>, RunError> {
        self.cfg.energies(default)
    }

    fn sizes(&self, default: &[usize]) -> Result<Vec<usize>, RunError> {
        let v = self.cfg.grid.n.clone().unwrap_or_else(|| default.to_vec());
        for &n in &v {
            positive("n", n)?;
        }
        Ok(v)
    }

    fn samples(&self, default: usize) -> Result<usize, RunError> {
        positive("samples", self.cfg.grid.samples.unwrap_or(default))
    }

    fn seed(&self, label: &str, index: u64) -> u64 {
        stream_seed(self.cfg.seed, label, index)
    }

    /// Independent phase number `index` for `label`.
    fn phase(&self, label: &str, index: u64) -> Phase {
        random_phase(&mut stream(self.cfg.seed, label, index), self.cocycle.dynamics().dim())
    }

    fn statistic(&self, default: Statistic) -> Result<Statistic, RunError> {
        match self.cfg.grid.statistic.as_deref() {
            None => Ok(default),
            Some("transfer_norm") => Ok(Statistic::TransferNorm),
            Some("det") => Ok(Statistic::Det),
            Some(other) => Err(invalid(format!("unknown statistic {other:?}"))),
        }
    }

    fn spectrum_edge(&self) -> f64 {
        2.0 + self.cocycle.potential().sup_bound()
    }
}

fn lyapunov_scan(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let mut t = Table::new(&["N", "E", "L_N", "stderr", "diff2N", "logN_over_N"]);
    let sizes = ctx.sizes(&[250, 500, 1000])?;
    let m = ctx.samples(200)?;
    let c_scan = cfg.grid.c_scan.unwrap_or(DEFAULT_SCAN_CONSTANT);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        let sampler = cfg.sampler(ctx.seed("lyapunov_scan", i as u64))?;
        for r in convergence_scan(&ctx.cocycle, e, &sizes, &sampler, m, c_scan)? {
            t.push(row![r.n, e, r.l_n, r.stderr, r.diff, r.envelope]);
        }
    }
    Ok(t)
}

fn positivity_probe(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let mut t = Table::new(&["E", "ell", "sigma", "S", "L_ell", "L_2ell", "cond1", "cond2", "lower_bound"]);
    let sigma = cfg.grid.sigma.unwrap_or(DEFAULT_SIGMA);
    let m = ctx.samples(200)?;
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &ell in &ctx.sizes(&[100])? {
            let sampler = cfg.sampler(ctx.seed("positivity_probe", i as u64))?;
            let r = probe(&ctx.cocycle, e, ell, &sampler, m, sigma)?;
            t.push(row![
                e,
                ell,
                sigma,
                r.s,
                r.l_ell,
                r.l_2ell,
                r.cond1,
                r.cond2,
                r.predicted_lower_bound.unwrap_or(f64::NAN)
            ]);
        }
    }
    Ok(t)
}

fn avalanche_fuzz(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let g = &cfg.grid;
    let mu = g.mu.unwrap_or(1e4);
    let n = positive("length", g.length.unwrap_or(100))?;
    let trials = positive("trials", g.trials.unwrap_or(100))?;
    let width = g.rotation.unwrap_or(0.1);
    let c_gate = g.c_gate.unwrap_or(DEFAULT_AP_GATE);
    if mu.is_nan() || mu <= 1.0 || width.is_nan() || width < 0.0 {
        return Err(invalid("avalanche_fuzz needs mu > 1 and rotation ≥ 0"));
    }
    let reports = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mats = hyperbolic_sequence(&mut stream(cfg.seed, "avalanche_fuzz", i as u64), n, mu, width);
            avalanche_check(&mats, mu, c_gate)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(&[
        "trial", "n", "mu", "hyp_det", "hyp_large", "hyp_diff", "discrepancy", "bound", "passed",
    ]);
    for (i, r) in reports.iter().enumerate() {
        let passed = match r.passed {
            Some(p) => Cell::Bool(p),
            None => Cell::Text("skipped".into()),
        };
        let mut cells = row![i, r.n, r.mu, r.hyp_det_ok, r.hyp_large_ok, r.hyp_diff_ok, r.lhs_discrepancy, r.bound];
        cells.push(passed);
        t.push(cells);
    }
    Ok(t)
}

fn ids(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let edge = ctx.spectrum_edge() + 0.1;
    let default: Vec<f64> = (0..41).map(|i| -edge + 2.0 * edge * i as f64 / 40.0).collect();
    let energies = ctx.energies(&default)?;
    let m = ctx.samples(50)?;
    let mut t = Table::new(&["E", "N", "ids", "x_samples"]);
    for (i, &n) in ctx.sizes(&[200])?.iter().enumerate() {
        let table = ids_table(&ctx.cocycle, &energies, n, m, ctx.seed("ids", i as u64))?;
        for (e, v) in table.energies.iter().zip(&table.values) {
            t.push(row![*e, n, *v, m]);
        }
    }
    Ok(t)
}

fn holder_scan(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let etas = cfg.grid.eta.clone().unwrap_or_else(|| vec![0.1, 0.03, 0.01, 0.003]);
    let m = ctx.samples(50)?;
    let mut t = Table::new(&["E", "N", "eta", "count", "eta_N", "ratio"]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &n in &ctx.sizes(&[400])? {
            for &eta in &etas {
                let w = window_count(&ctx.cocycle, e, eta, n, m, ctx.seed("holder_scan", i as u64))?;
                t.push(row![e, n, eta, w.mean, w.eta_n, w.mean / w.eta_n]);
            }
        }
    }
    Ok(t)
}

fn wegner(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let hs = cfg.grid.h.clone().unwrap_or_else(|| vec![5.0, 10.0]);
    let m = ctx.samples(500)?;
    let mut t = Table::new(&["E", "N", "H", "measure", "x_samples"]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &n in &ctx.sizes(&[200])? {
            for &h in &hs {
                let v = wegner_measure(&ctx.cocycle, e, h, n, m, ctx.seed("wegner", i as u64))?;
                t.push(row![e, n, h, v, m]);
            }
        }
    }
    Ok(t)
}

fn min_gap(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let delta = cfg.grid.delta.unwrap_or(DEFAULT_GAP_DELTA);
    let m = ctx.samples(20)?;
    let mut t = Table::new(&["sample", "x", "N", "min_gap", "log_min_gap", "log_threshold", "above_threshold"]);
    for &n in &ctx.sizes(&[200])? {
        let rows = (0..m)
            .into_par_iter()
            .map(|s| {
                let x = ctx.phase("min_gap", s as u64);
                Ok((x.x(), gap(&ctx.cocycle, &x, n, None, delta)?))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for (s, (x, r)) in rows.into_iter().enumerate() {
            t.push(row![s, x, n, r.min_gap, r.min_gap.ln(), r.log_threshold, r.above_threshold]);
        }
    }
    Ok(t)
}

fn ldt_decay(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let exponent = cfg.grid.threshold_exponent.unwrap_or(0.9);
    let statistic = ctx.statistic(Statistic::TransferNorm)?;
    let m = ctx.samples(500)?;
    let mut t = Table::new(&["E", "n", "threshold", "statistic", "measure", "mean", "x_samples"]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for (j, &n) in ctx.sizes(&[100, 400, 1600])?.iter().enumerate() {
            let threshold = (n as f64).powf(exponent);
            let sampler = cfg.sampler(ctx.seed("ldt_decay", (i * 1000 + j) as u64))?;
            let p = deviation_measure(&ctx.cocycle, e, n, threshold, &sampler, m, statistic)?;
            t.push(row![e, n, threshold, statistic.name(), p.measure, p.mean, m]);
        }
    }
    Ok(t)
}

fn grid_size(cfg: &ExperimentConfig, default: usize) -> Result<usize, RunError> {
    positive("grid_points", cfg.grid.grid_points.unwrap_or(default))
}

fn circle_only(ctx: &Ctx, name: &str) -> Result<(), RunError> {
    if ctx.cocycle.dynamics().dim() != 1 {
        return Err(invalid(format!("{name} samples phases on the circle and needs one-dimensional dynamics")));
    }
    Ok(())
}

fn bmo_trend(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    circle_only(&ctx, "bmo_trend")?;
    let statistic = ctx.statistic(Statistic::Det)?;
    let grid = grid_size(cfg, 1024)?;
    let mut t = Table::new(&["E", "n", "statistic", "grid_size", "bmo", "log_n"]);
    for e in ctx.energies(&[0.0])? {
        for &n in &ctx.sizes(&[100, 400])? {
            let u = GridFunction::from_statistic(&ctx.cocycle, e, n, grid, GRID_OFFSET, statistic)?;
            let b = bmo_estimate(u.values())?;
            t.push(row![e, n, statistic.name(), b.grid_size, b.value, (n as f64).ln()]);
        }
    }
    Ok(t)
}

fn fourier_decay(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    circle_only(&ctx, "fourier_decay")?;
    let statistic = ctx.statistic(Statistic::TransferNorm)?;
    let grid = grid_size(cfg, 1024)?;
    let k = cfg.grid.modes.unwrap_or(64);
    let mut t = Table::new(&["E", "n", "nu", "modulus", "ratio"]);
    for e in ctx.energies(&[0.0])? {
        for &n in &ctx.sizes(&[200])? {
            let u = GridFunction::from_statistic(&ctx.cocycle, e, n, grid, GRID_OFFSET, statistic)?;
            for md in fourier_modes(u.values(), k, n as f64)?.into_iter().filter(|m| m.nu >= 0) {
                t.push(row![e, n, md.nu, md.modulus, md.ratio]);
            }
        }
    }
    Ok(t)
}

fn thouless_check(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let m = ctx.samples(200)?;
    let mut t = Table::new(&["E", "N", "mean_log_det_over_N", "L_N", "diff"]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &n in &ctx.sizes(&[3000])? {
            let sampler = cfg.sampler(ctx.seed("thouless_check", i as u64))?;
            let r = thouless(&ctx.cocycle, e, n, &sampler, m)?;
            t.push(row![e, n, r.mean_log_det, r.l_n, r.diff]);
        }
    }
    Ok(t)
}

fn green_decay(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let k_const = cfg.grid.k_const.unwrap_or(10.0);
    let m = ctx.samples(20)?;
    let mut t = Table::new(&[
        "sample", "x", "E", "ell", "L_ell", "log_det", "threshold", "condition_met", "max_excess",
    ]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &ell in &ctx.sizes(&[100])? {
            let sampler = cfg.sampler(ctx.seed("green_decay_l", i as u64))?;
            let l_ell = finite_lyapunov(&ctx.cocycle, e, ell, &sampler, m.max(100))?.mean;
            let rows = (0..m)
                .into_par_iter()
                .map(|s| {
                    let x = ctx.phase("green_decay", (i * 100_000 + s) as u64);
                    Ok((x.x(), green_decay_check(&ctx.cocycle, &x, e, ell, k_const, l_ell)?))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for (s, (x, r)) in rows.into_iter().enumerate() {
                t.push(row![s, x, e, ell, l_ell, r.log_det, r.threshold, r.condition_met, r.max_excess]);
            }
        }
    }
    Ok(t)
}

fn zeros_probe(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let probes = positive("probes", cfg.grid.probes.unwrap_or(20))?;
    let y = cfg.grid.annulus_y.unwrap_or(DEFAULT_ANNULUS_Y);
    let mut t = Table::new(&[
        "E", "N", "probe", "radius", "count", "ceiling", "min_separation", "annulus_total", "annulus_ceiling",
    ]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &n in &ctx.sizes(&[64])? {
            let radius = cfg.grid.radius.unwrap_or_else(|| (-(n as f64).ln().powi(2)).exp());
            let sep = zero_separation(&ctx.cocycle, e, n, y, radius, probes, ctx.seed("zeros_probe", i as u64))?;
            let total = annulus_zero_count(&ctx.cocycle, e, n, y)?;
            let ceiling = 2 * n * ctx.cocycle.potential().degree();
            for (p, &count) in sep.counts.iter().enumerate() {
                t.push(row![e, n, p, radius, count, sep.ceiling, sep.min_distance, total, ceiling]);
            }
        }
    }
    Ok(t)
}

fn zero_additivity(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let probes = positive("probes", cfg.grid.probes.unwrap_or(10))?;
    let y_max = cfg.grid.annulus_y.unwrap_or(DEFAULT_ANNULUS_Y);
    let mut t = Table::new(&["probe", "E", "m", "x", "y", "radius", "k0", "k1", "k", "defect"]);
    for (i, e) in ctx.energies(&[0.0])?.into_iter().enumerate() {
        for &m in &ctx.sizes(&[32])? {
            let radius = cfg.grid.radius.unwrap_or(1.0 / m as f64);
            let rows = (0..probes)
                .into_par_iter()
                .map(|p| {
                    let mut rng = stream(cfg.seed, "zero_additivity", (i * 100_000 + p) as u64);
                    let (x, y): (f64, f64) = (rng.gen(), rng.gen_range(-y_max..=y_max));
                    let center = ComplexPhase::new(x, y).to_z();
                    let mut r = radius;
                    for _ in 0..4 {
                        match zero_count_additivity(&ctx.cocycle, e, m, Disk::new(center, r)?) {
                            Err(Error::NearCircleZero { .. }) | Err(Error::WindingUnstable { .. }) => r *= 0.97,
                            other => return other.map(|a| (x, y, r, a)),
                        }
                    }
                    zero_count_additivity(&ctx.cocycle, e, m, Disk::new(center, r)?).map(|a| (x, y, r, a))
                })
                .collect::<Result<Vec<_>, Error>>()?;
            for (p, (x, y, r, a)) in rows.into_iter().enumerate() {
                t.push(row![p, e, m, x, y, r, a.k0, a.k1, a.k, a.defect()]);
            }
        }
    }
    Ok(t)
}

fn hellmann_feynman(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    circle_only(&ctx, "hellmann_feynman")?;
    let m = ctx.samples(10)?;
    let mut t = Table::new(&["sample", "x", "N", "j", "E_j", "analytic", "fd", "rel_err"]);
    for &n in &ctx.sizes(&[100])? {
        let j = cfg.grid.index.unwrap_or(n / 2);
        if j >= n {
            return Err(invalid(format!("eigenvalue index {j} out of range for N = {n}")));
        }
        let rows = (0..m)
            .into_par_iter()
            .map(|s| {
                let x = ctx.phase("hellmann_feynman", s as u64).x();
                match hf(&ctx.cocycle, x, j, n) {
                    Ok(r) => Ok((x, Some(r))),
                    Err(Error::AmbiguousEigenvalue { .. }) => Ok((x, None)),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for (s, (x, r)) in rows.into_iter().enumerate() {
            match r {
                Some(r) => {
                    let rel = (r.analytic - r.fd).abs() / r.analytic.abs().max(1.0);
                    t.push(row![s, x, n, j, r.energy, r.analytic, r.fd, rel]);
                }
                None => t.push(row![s, x, n, j, f64::NAN, f64::NAN, f64::NAN, f64::NAN]),
            }
        }
    }
    Ok(t)
}

fn concatenation_bound(cfg: &ExperimentConfig) -> Result<Table, RunError> {
    let ctx = Ctx::new(cfg)?;
    let etas = cfg.grid.eta.clone().unwrap_or_else(|| vec![0.05, 0.01]);
    let m = ctx.samples(10)?;
    let mut t = Table::new(&[
        "sample",
        "x",
        "E",
        "eta",
        "N",
        "a",
        "b",
        "count_window",
        "count_full",
        "bound",
        "window_ok",
        "full_ok",
        "resolvent_lhs",
        "resolvent_rhs",
        "resolvent_ok",
    ]);
    for e in ctx.energies(&[0.0])? {
        for &n in &ctx.sizes(&[50])? {
            for &eta in &etas {
                let rows = (0..m)
                    .into_par_iter()
                    .map(|s| {
                        let x = ctx.phase("concatenation_bound", s as u64);
                        Ok((x.x(), concatenation_bound_check(&ctx.cocycle, &x, e, eta, n)?))
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                for (s, (x, r)) in rows.into_iter().enumerate() {
                    let (lhs, rhs, ok) = match &r.resolvent {
                        Some(c) => (c.lhs, c.rhs, Cell::Bool(c.holds())),
                        None => (f64::NAN, f64::NAN, Cell::Text("skipped".into())),
                    };
                    let mut cells = row![
                        s,
                        x,
                        e,
                        eta,
                        n,
                        r.a,
                        r.b,
                        r.count_window,
                        r.count_full,
                        r.bound,
                        r.window_ok,
                        r.full_ok,
                        lhs,
                        rhs
                    ];
                    cells.push(ok);
                    t.push(cells);
                }
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_is_sorted_and_complete() {
        let n = names();
        let mut sorted = n.clone();
        sorted.sort();
        assert_eq!(n, sorted);
        assert_eq!(n.len(), 16);
    }
}
