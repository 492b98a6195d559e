//! Randomized cross-checks of the closed forms against the network oracle.

use std::fmt::Write as _;

use coldamp_core::budget::Param;
use coldamp_core::network::toy::{matched_junction, pi_network};
use coldamp_core::network::{build_sensor_network, build_sensor_network_with, AmplifierNorm, SensorTransfer};
use coldamp_core::sensor::{estimator_coefficients, free_mass_coefficients, sensor_noise_spectrum};
use coldamp_core::servo::{cold_damped_estimator, gain_for_impedance, sensing_error_identity};
use coldamp_core::{InstrumentParams, Line, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::parallel::with_pool;

/// Deliberate corruptions used to show that a check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the sign of the closed-form μ_l2 before comparing.
    FlipMuL2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub draws: usize,
    pub seed: u64,
    pub frequencies_per_draw: usize,
    /// Half-width of the log10 parameter spread.
    pub decades: f64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tol: 1e-8, draws: 100, seed: 0, frequencies_per_draw: 10, decades: 2.0, fault: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub cases: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub draws: usize,
    pub tol: f64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verify: seed {} draws {} tol {:.1e}", self.seed, self.draws, self.tol);
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<22} max deviation {:.3e} over {:>6} cases  {verdict}", c.name, c.max_deviation, c.cases);
        }
        let _ = writeln!(s, "{}", if self.passed() { "all checks passed" } else { "verification FAILED" });
        s
    }
}

pub const CHECKS: [&str; 6] = [
    "oracle-equivalence",
    "commutators",
    "loop-invariance",
    "closed-loop-oracle",
    "sensing-error-identity",
    "decomposition",
];

/// Random parameter sets log-uniform around `base`, each at several frequencies.
pub fn draw_cases(base: &InstrumentParams, omega: f64, opts: &VerifyOptions) -> Vec<(InstrumentParams, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cases = vec![(base.clone(), omega)];
    let d = opts.decades;
    for _ in 0..opts.draws {
        let e: [f64; 14] = std::array::from_fn(|_| rng.gen_range(-d..d));
        let p = Param::scale_all(base, &e);
        for _ in 0..opts.frequencies_per_draw {
            let w = omega * 10f64.powf(rng.gen_range(-1.5..1.5));
            cases.push((p.clone(), w));
        }
    }
    cases
}

fn evaluate(p: &InstrumentParams, w: f64, fault: Option<Fault>) -> coldamp_core::Result<[f64; 6]> {
    let mut mu = estimator_coefficients(p, w)?;
    if fault == Some(Fault::FlipMuL2) {
        mu[Line::L2] = -mu[Line::L2];
    }
    let open = SensorTransfer::from_result(&build_sensor_network(p, None, w)?.solve()?);
    let oracle = open
        .estimator()
        .max_rel_deviation(&mu)
        .max(open.force_noise().max_rel_deviation(&free_mass_coefficients(p, w)?));

    let comm = build_sensor_network_with(p, None, w, AmplifierNorm::QuantumLimited)?
        .solve()?
        .commutators()
        .normalized;

    let invariance = cold_damped_estimator(p, w)?.max_rel_deviation(&mu);

    let h = p.mechanics_at(w).1;
    let g = gain_for_impedance(p, C64::new(1e3 * h, 0.0), w)?;
    let closed = SensorTransfer::from_result(&build_sensor_network(p, Some(g), w)?.solve()?);
    let closed_oracle = closed.estimator().max_rel_deviation(&mu);

    let identity = sensing_error_identity(p, w)?;
    let s = sensor_noise_spectrum(p, w)?;
    let decomposition = ((s.component_sum() - s.total) / s.total).abs();
    Ok([oracle, comm, invariance, closed_oracle, identity, decomposition])
}

fn toy_commutators() -> coldamp_core::Result<f64> {
    let w = 1e6;
    let a = matched_junction(50.0).build(w)?.solve()?.commutators().worst();
    let b = pi_network(50.0, 300.0, 1e-9, 2e-5, 3e-10, w).build(w)?.solve()?.commutators().worst();
    Ok(a.max(b))
}

pub fn run_verify(base: &InstrumentParams, omega: f64, opts: &VerifyOptions) -> coldamp_core::Result<VerifyReport> {
    base.validate()?;
    let cases = draw_cases(base, omega, opts);
    let per_case: Vec<[f64; 6]> = with_pool(|| {
        cases.par_iter().map(|(p, w)| evaluate(p, *w, opts.fault)).collect::<coldamp_core::Result<_>>()
    })?;
    let mut worst = [0.0f64; 6];
    for r in &per_case {
        for (w, v) in worst.iter_mut().zip(r) {
            // NaN counts as a failure
            *w = if v.is_nan() { f64::INFINITY } else { w.max(*v) };
        }
    }
    worst[1] = worst[1].max(toy_commutators()?);
    let checks = CHECKS
        .iter()
        .zip(worst)
        .map(|(&name, dev)| CheckResult { name, max_deviation: dev, cases: cases.len(), passed: dev < opts.tol })
        .collect();
    Ok(VerifyReport { seed: opts.seed, draws: opts.draws, tol: opts.tol, checks })
}
