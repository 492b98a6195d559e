//! Open-loop capacitive sensor: free-mass motion, force estimator and its
//! noise spectrum.

use crate::error::{nonzero, positive, Result};
use crate::lines::{CoefficientSet, Line};
use crate::noise::{effective_temperature, input_spectrum, quadrature_spectrum, NoiseLine, HBAR};
use crate::params::InstrumentParams;
use crate::C64;
use libm::sqrt;

const I: C64 = C64::new(0.0, 1.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `Ξ_m = H_m − iMΩ + iK/Ω`, in kg/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalImpedance(pub C64);

impl MechanicalImpedance {
    pub fn value(self) -> C64 {
        self.0
    }

    /// Reactance relative to damping, `Δ = (K/Ω − MΩ)/H_m`.
    pub fn delta(self) -> f64 {
        self.0.im / self.0.re
    }
}

pub fn mechanical_impedance(p: &InstrumentParams, omega: f64) -> Result<MechanicalImpedance> {
    let w = nonzero("omega", omega)?;
    let (k, h) = p.mechanics_at(w);
    Ok(MechanicalImpedance(C64::new(h, k / w - p.mass * w)))
}

/// `Z_t = −1/(2iΩC_t) = i/(2ΩC_t)`, purely reactive.
pub fn transducer_impedance(p: &InstrumentParams, omega: f64) -> Result<C64> {
    let w = nonzero("omega", omega)?;
    Ok(C64::new(0.0, 1.0 / (2.0 * w * p.c_transducer)))
}

/// The scalar feedback impedance entering the estimator, `−i|Z_f|`.
///
/// A physical capacitor is `+i|Z_f|` on the upper sideband; acting on the
/// quadratures it swaps them with a sign, and the net effect on the detected
/// quadrature is this conjugate value.
pub fn feedback_impedance(p: &InstrumentParams) -> C64 {
    C64::new(0.0, -p.zf_mag())
}

/// Noise coefficients λ_α of the free-mass force `Ξ_m V = F + Σ λ_α α`.
pub fn free_mass_coefficients(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let w = nonzero("omega", omega)?;
    let (_, h) = p.mechanics_at(w);
    let mut c = CoefficientSet::zero();
    c[Line::M] = re(-sqrt(2.0 * HBAR * w.abs() * h));
    let back = sqrt(2.0 * HBAR * p.omega_t * p.r_amp) * p.coupling;
    c[Line::A1] = re(-back);
    c[Line::B1] = re(back);
    Ok(c)
}

/// Sensing-error coefficients `V_se = Σ s_α α`: the part of the estimator
/// proportional to Ξ_m, divided by Ξ_m. Dimension m/s per unit field.
pub fn sensing_error_coefficients(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let w = nonzero("omega", omega)?;
    positive("coupling", p.coupling)?;
    let zt = transducer_impedance(p, w)?;
    let zf = feedback_impedance(p);
    let (chi, wt) = (p.coupling, p.omega_t);
    let mut s = CoefficientSet::zero();
    s[Line::L2] = -I * w * sqrt(HBAR) / (sqrt(2.0 * p.r_loss * wt) * chi);
    s[Line::R1] = -re(w * sqrt(HBAR * p.r_detect) / (2.0 * sqrt(2.0 * wt) * chi)) / zf;
    s[Line::A1] = re(sqrt(2.0 * HBAR * p.r_amp * wt) * w / (2.0 * chi * wt)) / zf;
    s[Line::B1] = -s[Line::A1];
    let f = -I * w * sqrt(HBAR * p.r_amp) / (sqrt(2.0) * chi * sqrt(wt));
    let y = re(1.0 / p.r_loss) + zt.inv();
    s[Line::A2] = f * (re(1.0 / p.r_amp) - y);
    s[Line::B2] = f * (re(1.0 / p.r_amp) + y);
    Ok(s)
}

/// Noise coefficients μ_α of the normalized force estimator
/// `F̂ = F + Σ μ_α α`, i.e. `μ = λ + Ξ_m·s`.
pub fn estimator_coefficients(p: &InstrumentParams, omega: f64) -> Result<CoefficientSet> {
    let xi = mechanical_impedance(p, omega)?.value();
    Ok(free_mass_coefficients(p, omega)? + sensing_error_coefficients(p, omega)? * xi)
}

/// Force noise spectrum and its decomposition, all in N²/Hz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBreakdown {
    /// `Σ_α |μ_α|² σ_αα`.
    pub total: f64,
    /// Mechanical Langevin force `2H_m k_BΘ_m`.
    pub langevin: f64,
    /// Amplifier voltage noise acting on the mass, `8R_aϰ_t² k_BΘ_a`.
    pub back_action: f64,
    /// `|Ξ_m|²·σ_VseVse`.
    pub sensing: f64,
    /// Correlation between back action and sensing error; signed.
    pub interference: f64,
}

impl SpectrumBreakdown {
    pub fn component_sum(&self) -> f64 {
        self.langevin + self.back_action + self.sensing + self.interference
    }
}

/// Spectrum σ_αα of every incoming field: the mechanical line at Ω, the
/// electrical quadratures at the carrier.
pub fn line_spectra(p: &InstrumentParams, omega: f64) -> Result<[f64; 9]> {
    let w = nonzero("omega", omega)?;
    let (_, h) = p.mechanics_at(w);
    let mech = NoiseLine::new("m", h, p.temp_mech)?;
    let amp = NoiseLine::new("a", p.r_amp, p.temp_amp)?;
    let loss = NoiseLine::new("l", p.r_loss, p.temp_loss)?;
    let det = NoiseLine::new("r", p.r_detect, p.temp_detect)?;
    let sm = input_spectrum(&mech, w)?;
    let sa = quadrature_spectrum(&amp, p.omega_t)?;
    let sb = quadrature_spectrum(&amp.conjugated(), p.omega_t)?;
    let sl = quadrature_spectrum(&loss, p.omega_t)?;
    let sr = quadrature_spectrum(&det, p.omega_t)?;
    Ok([sm, sa, sa, sb, sb, sr, sr, sl, sl])
}

/// `Σ_α |c_α|² σ_αα` for an arbitrary coefficient set.
pub fn quadratic_form(coeffs: &CoefficientSet, spectra: &[f64; 9]) -> f64 {
    coeffs.0.iter().zip(spectra).map(|(c, s)| c.norm_sqr() * s).sum()
}

pub fn sensor_noise_spectrum(p: &InstrumentParams, omega: f64) -> Result<SpectrumBreakdown> {
    let w = nonzero("omega", omega)?;
    let total = quadratic_form(&estimator_coefficients(p, w)?, &line_spectra(p, w)?);

    let (_, h) = p.mechanics_at(w);
    let xi = mechanical_impedance(p, w)?;
    let zt = transducer_impedance(p, w)?;
    let k_m = effective_temperature(p.temp_mech, w)?.energy();
    let k_a = effective_temperature(p.temp_amp, p.omega_t)?.energy();
    let k_l = effective_temperature(p.temp_loss, p.omega_t)?.energy();
    let k_r = effective_temperature(p.temp_detect, p.omega_t)?.energy();
    let (chi, wt, ra, zf) = (p.coupling, p.omega_t, p.r_amp, p.zf_mag());

    let transposition = w * w / (wt * wt * chi * chi);
    let y = re(1.0 / p.r_loss) + zt.inv();
    let sensing = xi.value().norm_sqr()
        * transposition
        * (k_l / p.r_loss
            + p.r_detect * k_r / (4.0 * zf * zf)
            + 2.0 * ra * (1.0 / (zf * zf) + 1.0 / (ra * ra) + y.norm_sqr()) * k_a);
    Ok(SpectrumBreakdown {
        total,
        langevin: 2.0 * h * k_m,
        back_action: 8.0 * ra * chi * chi * k_a,
        sensing,
        interference: 8.0 * ra * w * xi.value().im * k_a / (wt * zf),
    })
}
