//! Cold-damped instrument: the servo loop feeds the detected quadrature back
//! as a force, `F_servo = −G_s·r1_out`.

use alloc::vec::Vec;

use crate::error::{nonzero, positive, Result};
use crate::lines::{CoefficientSet, Line};
use crate::noise::HBAR;
use crate::params::InstrumentParams;
use crate::sensor::{
    feedback_impedance, free_mass_coefficients, mechanical_impedance, sensing_error_coefficients,
    transducer_impedance,
};
use crate::C64;
use libm::sqrt;

const I: C64 = C64::new(0.0, 1.0);

/// Servo transfer `G_s(Ω)`, in newtons per unit output field.
pub trait ServoGain {
    fn gain(&self, omega: f64) -> C64;
}

impl<F: Fn(f64) -> C64> ServoGain for F {
    fn gain(&self, omega: f64) -> C64 {
        self(omega)
    }
}

/// Frequency-independent gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGain(pub C64);

impl ServoGain for ConstantGain {
    fn gain(&self, _omega: f64) -> C64 {
        self.0
    }
}

/// Proportional-derivative gain `G = k_p + k_d·(−iΩ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdGain {
    pub kp: f64,
    pub kd: f64,
}

impl PdGain {
    /// The PD gain whose loop impedance is exactly `H_me + iK_me/Ω` at every Ω.
    pub fn for_target(p: &InstrumentParams, h_me: f64, k_me: f64) -> Self {
        // Ξ_me = ρ·G with ρ = −i·c/Ω
        let c = sqrt(2.0 * p.omega_t / (HBAR * p.r_detect)) * 2.0 * p.coupling * p.zf_mag();
        PdGain { kp: -k_me / c, kd: -h_me / c }
    }
}

impl ServoGain for PdGain {
    fn gain(&self, omega: f64) -> C64 {
        C64::new(self.kp, -self.kd * omega)
    }
}

/// Velocity gain of the detection: `r1_out ⊃ (ρ/Ξ_m)·F`, and the loop adds
/// `Ξ_me = ρ·G_s` to the mechanical impedance.
pub fn loop_transduction(p: &InstrumentParams, omega: f64) -> Result<C64> {
    let w = nonzero("omega", omega)?;
    Ok(feedback_impedance(p) * sqrt(2.0 * p.omega_t / (HBAR * p.r_detect)) * (2.0 * p.coupling / w))
}

/// `Ξ_me = H_me + iK_me/Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveImpedance(pub C64);

impl EffectiveImpedance {
    pub fn value(self) -> C64 {
        self.0
    }

    pub fn damping(self) -> f64 {
        self.0.re
    }

    pub fn stiffness(self, omega: f64) -> f64 {
        self.0.im * omega
    }
}

pub fn effective_impedance(p: &InstrumentParams, gain: C64, omega: f64) -> Result<EffectiveImpedance> {
    Ok(EffectiveImpedance(loop_transduction(p, omega)? * gain))
}

/// The gain that synthesizes a given loop impedance at Ω.
pub fn gain_for_impedance(p: &InstrumentParams, target: C64, omega: f64) -> Result<C64> {
    Ok(target / loop_transduction(p, omega)?)
}

/// Normalized residual-motion coefficients `λ_α/G_s` of the cold-damped mass
/// in the infinite-gain limit. The velocity is `V_cd = −(1/ρ)·Σ (λ_α/G_s)·α`
/// and carries no external-force term.
pub fn cold_damped_velocity_coefficients(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let zt = transducer_impedance(p, omega)?;
    positive("coupling", p.coupling)?;
    let zf = feedback_impedance(p);
    let k = sqrt(p.r_amp / p.r_detect);
    let y = C64::new(1.0 / p.r_loss, 0.0) + zt.inv();
    let ra = C64::new(1.0 / p.r_amp, 0.0);
    let mut c = CoefficientSet::zero();
    c[Line::L2] = -I * zf * 2.0 / sqrt(p.r_loss * p.r_detect);
    c[Line::R1] = C64::new(-1.0, 0.0);
    c[Line::A1] = C64::new(2.0 * k, 0.0);
    c[Line::B1] = C64::new(-2.0 * k, 0.0);
    c[Line::A2] = -I * zf * 2.0 * k * (ra - y);
    c[Line::B2] = -I * zf * 2.0 * k * (ra + y);
    Ok(c)
}

/// Coefficients of `V_cd` itself (m/s per unit field).
pub fn cold_damped_velocity(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let rho = loop_transduction(p, omega)?;
    Ok(cold_damped_velocity_coefficients(p, omega)? * (-rho.inv()))
}

/// Closed-loop force estimator `F̂ = Ξ_m·(V_fr − V_cd)`, built from the free-mass
/// coefficients and the residual motion rather than the open-loop estimator.
pub fn cold_damped_estimator(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let xi = mechanical_impedance(p, omega)?.value();
    Ok(free_mass_coefficients(p, omega)? - cold_damped_velocity(p, omega)? * xi)
}

/// Largest deviation from `V_cd = −V_se`, relative to the largest V_se entry.
pub fn sensing_error_identity(p: &InstrumentParams, omega: f64) -> Result<f64> {
    let vcd = cold_damped_velocity(p, omega)?;
    let vse = sensing_error_coefficients(p, omega)?;
    Ok((vcd * C64::new(-1.0, 0.0)).max_rel_deviation(&vse))
}

/// Velocity coefficients of a noiseless finite-gain loop,
/// `V = (λ_α − G·ν_α)/(Ξ_m + ρG)`, with ν from the residual-motion table.
pub fn finite_gain_velocity(p: &InstrumentParams, gain: C64, omega: f64) -> Result<(C64, CoefficientSet)> {
    let xi = mechanical_impedance(p, omega)?.value();
    let rho = loop_transduction(p, omega)?;
    let lam = free_mass_coefficients(p, omega)?;
    let nu = cold_damped_velocity_coefficients(p, omega)?;
    let d = (xi + rho * gain).inv();
    Ok((d, (lam - nu * gain) * d))
}

/// Conditions under which the infinite-gain description is trustworthy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServoWarning {
    /// `R_r/|Z_f|` should stay below 1e-2.
    DetectionResistance { ratio: f64 },
    /// `H_me ≫ H_m` is not met (ratio below 1e3).
    WeakDamping { ratio: f64 },
    /// The loop produces negative damping.
    Unstable { damping: f64 },
}

pub fn servo_warnings(p: &InstrumentParams, gain: Option<C64>, omega: f64) -> Result<Vec<ServoWarning>> {
    let mut out = Vec::new();
    let ratio = p.r_detect / p.zf_mag();
    if ratio >= 1e-2 {
        out.push(ServoWarning::DetectionResistance { ratio });
    }
    if let Some(g) = gain {
        let h_me = effective_impedance(p, g, omega)?.damping();
        let (_, h) = p.mechanics_at(omega);
        if h_me <= 0.0 {
            out.push(ServoWarning::Unstable { damping: h_me });
        } else if h_me / h < 1e3 {
            out.push(ServoWarning::WeakDamping { ratio: h_me / h });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensor::estimator_coefficients;

    const W: f64 = InstrumentParams::MICROSCOPE_OMEGA;

    #[test]
    fn table_entries() {
        let p = InstrumentParams::microscope();
        let c = cold_damped_velocity_coefficients(&p, W).unwrap();
        let zero = C64::new(0.0, 0.0);
        assert_eq!(c[Line::M], zero);
        assert_eq!(c[Line::L1], zero);
        assert_eq!(c[Line::R2], zero);
        assert_eq!(c[Line::R1], C64::new(-1.0, 0.0));
        assert_eq!(c[Line::A1], -c[Line::B1]);
    }

    #[test]
    fn estimator_invariance_and_identity() {
        let p = InstrumentParams::microscope();
        for k in 0..30 {
            let w = W * libm::pow(10.0, -1.5 + 0.1 * k as f64);
            let open = estimator_coefficients(&p, w).unwrap();
            let closed = cold_damped_estimator(&p, w).unwrap();
            assert!(closed.max_rel_deviation(&open) < 1e-12);
            assert!(sensing_error_identity(&p, w).unwrap() < 1e-12);
        }
    }

    #[test]
    fn pd_preset_hits_target() {
        let p = InstrumentParams::microscope();
        let g = PdGain::for_target(&p, 1e3 * p.damping, 2e-3);
        for w in [W / 10.0, W, W * 7.0] {
            let z = effective_impedance(&p, g.gain(w), w).unwrap();
            assert!((z.damping() / (1e3 * p.damping) - 1.0).abs() < 1e-12);
            assert!((z.stiffness(w) / 2e-3 - 1.0).abs() < 1e-12);
        }
        assert!(servo_warnings(&p, Some(g.gain(W)), W).unwrap().is_empty());
        let weak = PdGain::for_target(&p, 10.0 * p.damping, 0.0);
        assert_eq!(servo_warnings(&p, Some(weak.gain(W)), W).unwrap().len(), 1);
    }

    #[test]
    fn linear_in_gain() {
        let p = InstrumentParams::microscope();
        let g = C64::new(3.0, -1.0);
        let a = effective_impedance(&p, g, W).unwrap().value();
        let b = effective_impedance(&p, g * 2.0, W).unwrap().value();
        assert!((b - a * 2.0).norm() <= 1e-15 * b.norm());
        assert_eq!(effective_impedance(&p, C64::new(0.0, 0.0), W).unwrap().value(), C64::new(0.0, 0.0));
    }
}
