//! Noise budget in the mechanical variables Δ and R_m, sweeps, and the
//! amplifier impedance-matching optimum.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{nonzero, Error, Result};
use crate::noise::effective_temperature;
use crate::optimize::golden_section;
use crate::params::InstrumentParams;
use crate::sensor::{mechanical_impedance, transducer_impedance};
use crate::C64;

/// Carrier-to-signal frequency ratio below which the slow-quadrature
/// description is questionable.
pub const MIN_CARRIER_RATIO: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetWarning {
    CarrierRatio { ratio: f64 },
}

/// Noise budget at one frequency. Velocity spectra in (m/s)²/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPoint {
    pub omega: f64,
    pub delta: f64,
    /// Free-running velocity noise (Langevin and back action).
    pub sigma_vfr: f64,
    /// Sensing error.
    pub sigma_vse: f64,
    /// Correlation of the two; signed.
    pub sigma_cross: f64,
    /// Force noise, N²/Hz.
    pub sigma_ff: f64,
    /// `√Σ_FF / M`, m s⁻²/√Hz.
    pub accel_sensitivity: f64,
    pub warnings: Vec<BudgetWarning>,
}

struct Energies {
    mech: f64,
    amp: f64,
    loss: f64,
    detect: f64,
}

fn energies(p: &InstrumentParams, omega: f64) -> Result<Energies> {
    Ok(Energies {
        mech: effective_temperature(p.temp_mech, omega)?.energy(),
        amp: effective_temperature(p.temp_amp, p.omega_t)?.energy(),
        loss: effective_temperature(p.temp_loss, p.omega_t)?.energy(),
        detect: effective_temperature(p.temp_detect, p.omega_t)?.energy(),
    })
}

pub fn budget_point(p: &InstrumentParams, omega: f64) -> Result<BudgetPoint> {
    let w = nonzero("omega", omega)?;
    p.validate()?;
    let (_, h) = p.mechanics_at(w);
    let delta = mechanical_impedance(p, w)?.delta();
    let rm = p.r_mech(w);
    let zt = transducer_impedance(p, w)?;
    let e = energies(p, w)?;
    let (ra, zf) = (p.r_amp, p.zf_mag());
    let d2 = 1.0 + delta * delta;
    let transposition = (w / p.omega_t) * (w / p.omega_t);
    let y = C64::new(1.0 / p.r_loss, 0.0) + zt.inv();

    let h_vfr = 2.0 / d2 * (e.mech + 4.0 * ra / rm * e.amp);
    let h_vse = transposition
        * (rm / p.r_loss * e.loss
            + rm * p.r_detect / (4.0 * zf * zf) * e.detect
            + 2.0 * ra * rm * e.amp * (1.0 / (zf * zf) + 1.0 / (ra * ra) + y.norm_sqr()));
    let h_cross = 8.0 * ra / zf * (w / p.omega_t) * delta / d2 * e.amp;
    // |Ξ_m|² = H_m²(1+Δ²) times the velocity spectra
    let sigma_ff = h * d2 * (h_vfr + h_vse + h_cross);

    if !(sigma_ff.is_finite() && h_vfr.is_finite() && h_vse.is_finite() && h_cross.is_finite()) {
        return Err(Error::NonFinite { quantity: "Sigma_FF", omega: w });
    }

    let ratio = p.omega_t / w.abs();
    let mut warnings = Vec::new();
    if ratio <= MIN_CARRIER_RATIO {
        warnings.push(BudgetWarning::CarrierRatio { ratio });
    }
    Ok(BudgetPoint {
        omega: w,
        delta,
        sigma_vfr: h_vfr / h,
        sigma_vse: h_vse / h,
        sigma_cross: h_cross / h,
        sigma_ff,
        accel_sensitivity: libm::sqrt(sigma_ff) / p.mass,
        warnings,
    })
}

/// The lossless-limit budget as a function of `x = R_a/R_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingProblem {
    pub damping: f64,
    pub delta: f64,
    /// |Ω|/ω_t
    pub transposition: f64,
    pub energy_mech: f64,
    pub energy_amp: f64,
}

impl MatchingProblem {
    pub fn new(p: &InstrumentParams, omega: f64) -> Result<Self> {
        let w = nonzero("omega", omega)?;
        let delta = mechanical_impedance(p, w)?.delta();
        Self::with_delta(p, w, delta)
    }

    /// Same, with Δ imposed instead of computed from K, M and H_m.
    pub fn with_delta(p: &InstrumentParams, omega: f64, delta: f64) -> Result<Self> {
        let w = nonzero("omega", omega)?;
        let e = energies(p, w)?;
        Ok(MatchingProblem {
            damping: p.mechanics_at(w).1,
            delta,
            transposition: w.abs() / p.omega_t,
            energy_mech: e.mech,
            energy_amp: e.amp,
        })
    }

    pub fn langevin(&self) -> f64 {
        2.0 * self.damping * self.energy_mech
    }

    /// Back-action term, linear in x.
    pub fn back_action(&self, x: f64) -> f64 {
        8.0 * self.damping * x * self.energy_amp
    }

    /// Detection term, inversely proportional to x.
    pub fn sensing(&self, x: f64) -> f64 {
        let t = self.transposition;
        2.0 * self.damping * (1.0 + self.delta * self.delta) * t * t / x * self.energy_amp
    }

    pub fn detection(&self, x: f64) -> f64 {
        self.back_action(x) + self.sensing(x)
    }

    pub fn total(&self, x: f64) -> f64 {
        self.langevin() + self.detection(x)
    }

    pub fn ratio_opt(&self) -> f64 {
        libm::sqrt(1.0 + self.delta * self.delta) / 2.0 * self.transposition
    }
}

/// Three-term budget of the lossless limit (large R_l, Z_t, Z_f; small R_r).
pub fn simplified_budget(p: &InstrumentParams, omega: f64) -> Result<f64> {
    let m = MatchingProblem::new(p, omega)?;
    Ok(m.total(p.r_amp / p.r_mech(omega)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingResult {
    pub ratio_opt: f64,
    pub sigma_opt: f64,
    pub langevin_part: f64,
    pub detection_part: f64,
    /// Location found by the numerical search.
    pub ratio_numeric: f64,
    /// Relative disagreement in location.
    pub ratio_residual: f64,
    /// Relative disagreement in the detection part at the two locations.
    pub value_residual: f64,
}

/// Bracket of the numerical search, in log10(R_a/R_m).
pub const SEARCH_BRACKET: (f64, f64) = (-12.0, 0.0);

pub fn optimal_matching(p: &InstrumentParams, omega: f64) -> Result<MatchingResult> {
    solve_matching(&MatchingProblem::new(p, omega)?)
}

/// Closed-form optimum cross-checked by golden-section search over log10 x.
///
/// The search minimizes the detection part only: the Langevin constant is
/// about eight orders larger and would drown the x dependence in rounding.
pub fn solve_matching(m: &MatchingProblem) -> Result<MatchingResult> {
    let ratio_opt = m.ratio_opt();
    let detection_part = 8.0 * m.damping * libm::sqrt(1.0 + m.delta * m.delta) * m.transposition * m.energy_amp;
    let langevin_part = m.langevin();
    let (lo, hi) = SEARCH_BRACKET;
    let found = golden_section(|u| m.detection(libm::pow(10.0, u)), lo, hi, 1e-12)?;
    let ratio_numeric = libm::pow(10.0, found.x);
    Ok(MatchingResult {
        ratio_opt,
        sigma_opt: langevin_part + detection_part,
        langevin_part,
        detection_part,
        ratio_numeric,
        ratio_residual: (ratio_numeric - ratio_opt).abs() / ratio_opt,
        value_residual: (found.value - detection_part).abs() / detection_part,
    })
}

/// Instrument parameters that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Mass,
    Stiffness,
    Damping,
    Coupling,
    OmegaT,
    RLoss,
    RDetect,
    RAmp,
    CFeedback,
    CTransducer,
    TempMech,
    TempAmp,
    TempLoss,
    TempDetect,
}

impl Param {
    pub const ALL: [Param; 14] = [
        Param::Mass,
        Param::Stiffness,
        Param::Damping,
        Param::Coupling,
        Param::OmegaT,
        Param::RLoss,
        Param::RDetect,
        Param::RAmp,
        Param::CFeedback,
        Param::CTransducer,
        Param::TempMech,
        Param::TempAmp,
        Param::TempLoss,
        Param::TempDetect,
    ];

    /// Key used in configuration files and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Param::Mass => "mass",
            Param::Stiffness => "stiffness",
            Param::Damping => "damping",
            Param::Coupling => "coupling",
            Param::OmegaT => "omega_t",
            Param::RLoss => "r_loss",
            Param::RDetect => "r_detect",
            Param::RAmp => "r_amp",
            Param::CFeedback => "c_feedback",
            Param::CTransducer => "c_transducer",
            Param::TempMech => "temp_mech",
            Param::TempAmp => "temp_amp",
            Param::TempLoss => "temp_loss",
            Param::TempDetect => "temp_detect",
        }
    }

    pub fn from_key(key: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.key() == key)
    }

    pub fn get(self, p: &InstrumentParams) -> f64 {
        match self {
            Param::Mass => p.mass,
            Param::Stiffness => p.stiffness,
            Param::Damping => p.damping,
            Param::Coupling => p.coupling,
            Param::OmegaT => p.omega_t,
            Param::RLoss => p.r_loss,
            Param::RDetect => p.r_detect,
            Param::RAmp => p.r_amp,
            Param::CFeedback => p.c_feedback,
            Param::CTransducer => p.c_transducer,
            Param::TempMech => p.temp_mech,
            Param::TempAmp => p.temp_amp,
            Param::TempLoss => p.temp_loss,
            Param::TempDetect => p.temp_detect,
        }
    }

    pub fn set(self, p: &mut InstrumentParams, v: f64) {
        *self.slot(p) = v;
    }

    fn slot(self, p: &mut InstrumentParams) -> &mut f64 {
        match self {
            Param::Mass => &mut p.mass,
            Param::Stiffness => &mut p.stiffness,
            Param::Damping => &mut p.damping,
            Param::Coupling => &mut p.coupling,
            Param::OmegaT => &mut p.omega_t,
            Param::RLoss => &mut p.r_loss,
            Param::RDetect => &mut p.r_detect,
            Param::RAmp => &mut p.r_amp,
            Param::CFeedback => &mut p.c_feedback,
            Param::CTransducer => &mut p.c_transducer,
            Param::TempMech => &mut p.temp_mech,
            Param::TempAmp => &mut p.temp_amp,
            Param::TempLoss => &mut p.temp_loss,
            Param::TempDetect => &mut p.temp_detect,
        }
    }

    /// A copy of `p` with every parameter multiplied by `10^exponents[i]`.
    pub fn scale_all(p: &InstrumentParams, exponents: &[f64; 14]) -> InstrumentParams {
        let mut q = p.clone();
        for (param, e) in Param::ALL.into_iter().zip(exponents) {
            let v = param.get(p) * libm::pow(10.0, *e);
            param.set(&mut q, v);
        }
        q
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepAxis {
    /// Grid values are Ω in rad/s.
    Frequency,
    /// Grid values replace one parameter; evaluated at `omega`.
    Parameter { param: Param, omega: f64 },
}

/// Reject empty or non-increasing grids.
pub fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadGrid("grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadGrid("grid must be strictly increasing"));
    }
    Ok(())
}

/// Evaluate one grid point of a sweep.
pub fn sweep_point(p: &InstrumentParams, axis: SweepAxis, value: f64) -> Result<BudgetPoint> {
    let attach = |e: Error| Error::AtGridPoint { value, source: Box::new(e) };
    match axis {
        SweepAxis::Frequency => budget_point(p, value).map_err(attach),
        SweepAxis::Parameter { param, omega } => {
            let mut q = p.clone();
            param.set(&mut q, value);
            budget_point(&q, omega).map_err(attach)
        }
    }
}

/// One budget point per grid value, in grid order.
pub fn sweep(p: &InstrumentParams, axis: SweepAxis, grid: &[f64]) -> Result<Vec<BudgetPoint>> {
    check_grid(grid)?;
    grid.iter().map(|&v| sweep_point(p, axis, v)).collect()
}

/// `n` points spaced logarithmically from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo > 0.0) || !(hi >= lo) {
        return Err(Error::BadGrid("log grid needs 0 < lo <= hi and at least one point"));
    }
    if n == 1 {
        return Ok(alloc::vec![lo]);
    }
    let (a, b) = (libm::log10(lo), libm::log10(hi));
    Ok((0..n)
        .map(|k| match k {
            0 => lo,
            k if k == n - 1 => hi,
            k => libm::pow(10.0, a + (b - a) * k as f64 / (n - 1) as f64),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::sensor_noise_spectrum;

    const W: f64 = InstrumentParams::MICROSCOPE_OMEGA;

    #[test]
    fn headline_numbers() {
        let p = InstrumentParams::microscope();
        let b = budget_point(&p, W).unwrap();
        assert!((b.sigma_ff / 1.076_908_708_546_579e-25 - 1.0).abs() < 1e-12, "{b:?}");
        assert!((b.accel_sensitivity / 1.215_418_046_111_24e-12 - 1.0).abs() < 1e-12);
        assert!((b.delta - 32.693_040_635_839_89).abs() < 1e-10);
        let s = sensor_noise_spectrum(&p, W).unwrap();
        assert!((b.sigma_ff / s.total - 1.0).abs() < 1e-12);
        assert!(b.warnings.is_empty());
    }

    #[test]
    fn matching_at_quoted_delta() {
        let p = InstrumentParams::microscope();
        let m = MatchingProblem::with_delta(&p, W, 100.0).unwrap();
        assert!((m.transposition - 5e-9).abs() < 1e-22);
        let r = solve_matching(&m).unwrap();
        // √10001/2 · 5e-9
        assert!((r.ratio_opt / 2.500_124_996_875_195e-7 - 1.0).abs() < 1e-13);
        assert!(r.ratio_residual < 1e-6 && r.value_residual < 1e-6);
        assert!((r.detection_part / 1.077e-33 - 1.0).abs() < 2e-3, "{}", r.detection_part);
        let x = r.ratio_opt;
        assert!((m.back_action(x) / m.sensing(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_delta_ratio() {
        let p = InstrumentParams::microscope();
        let m = MatchingProblem::with_delta(&p, W, 0.0).unwrap();
        assert_eq!(m.ratio_opt(), W / (2.0 * p.omega_t));
    }

    #[test]
    fn grids() {
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[1.0, 1.0]).is_err());
        let g = log_grid(1e-4, 1e-2, 3).unwrap();
        assert_eq!(g[0], 1e-4);
        assert!((g[1] / 1e-3 - 1.0).abs() < 1e-14);
        assert_eq!(g[2], 1e-2);
        assert_eq!(log_grid(5.0, 5.0, 1).unwrap(), alloc::vec![5.0]);
        let p = InstrumentParams::microscope();
        let pts = sweep(&p, SweepAxis::Frequency, &[W, 2.0 * W, 3.0 * W]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.windows(2).all(|w| w[0].omega < w[1].omega));
        match sweep(&p, SweepAxis::Frequency, &[0.0]) {
            Err(Error::AtGridPoint { value, .. }) => assert_eq!(value, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn carrier_ratio_warning() {
        let p = InstrumentParams::microscope();
        let b = budget_point(&p, p.omega_t / 500.0).unwrap();
        assert_eq!(b.warnings.len(), 1);
    }
}
