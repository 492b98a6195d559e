//! The capacitive sensor written as raw element relations, one equation per
//! element and quadrature.

use crate::error::{nonzero, Result};
use crate::lines::{CoefficientSet, Line};
use crate::noise::HBAR;
use crate::params::InstrumentParams;
use crate::sensor::transducer_impedance;
use crate::C64;
use libm::sqrt;

use super::{CommutatorDeviation, LinearNetwork, ScatteringResult};

/// Scale of the amplifier noise fields in the node relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplifierNorm {
    /// Voltage noise `√(2ħω_tR_a)(a − b)`, current noise `√(2ħω_t/R_a)(a + b)`,
    /// the form used by the closed-form coefficients.
    #[default]
    Printed,
    /// Half of the above: the amplifier fields are then canonical, and the
    /// printed model is recovered with `k_BΘ_a → 4·k_BΘ_a`.
    QuantumLimited,
}

impl AmplifierNorm {
    fn factor(self) -> f64 {
        match self {
            AmplifierNorm::Printed => 1.0,
            AmplifierNorm::QuantumLimited => 0.5,
        }
    }
}

pub fn build_sensor_network(
    p: &InstrumentParams,
    gain: Option<C64>,
    omega: f64,
) -> Result<LinearNetwork> {
    build_sensor_network_with(p, gain, omega, AmplifierNorm::Printed)
}

/// Assemble the sensor network at Ω, with the servo loop closed when a gain is given.
///
/// Drive `F` comes first, then the nine lines in [`Line::ALL`] order. Outputs
/// are `m`, `r1`, `r2`, `l1`, `l2`; the ideal amplifier has no outgoing field.
pub fn build_sensor_network_with(
    p: &InstrumentParams,
    gain: Option<C64>,
    omega: f64,
    norm: AmplifierNorm,
) -> Result<LinearNetwork> {
    p.validate()?;
    let w = nonzero("omega", omega)?;
    let (k, h) = p.mechanics_at(w);
    let zt = transducer_impedance(p, w)?;
    let zf = p.zf_mag();
    let (chi, wt) = (p.coupling, p.omega_t);
    let s = norm.factor() * sqrt(2.0 * HBAR * wt * p.r_amp);
    let t = norm.factor() * sqrt(2.0 * HBAR * wt / p.r_amp);
    let one = C64::new(1.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    let i = C64::new(0.0, 1.0);

    let mut net = LinearNetwork::new(w);
    let f = net.drive("F");
    let mut line = [0usize; 9];
    for l in Line::ALL {
        let eta = match l {
            Line::M => w.signum(),
            l if l.conjugated() => -1.0,
            _ => 1.0,
        };
        line[l.index()] = net.line_input(l.name(), eta);
    }
    let inp = |l: Line| line[l.index()];
    for (a, b) in [(Line::A1, Line::A2), (Line::B1, Line::B2), (Line::R1, Line::R2), (Line::L1, Line::L2)] {
        net.pair_inputs(inp(a), inp(b));
    }

    let v = net.unknown("V");
    let fm = net.unknown("Fm");
    let mo = net.unknown("m_out");
    let un = [net.unknown("Un1"), net.unknown("Un2")];
    let it = [net.unknown("It1"), net.unknown("It2")];
    let il = [net.unknown("Il1"), net.unknown("Il2")];
    let ifb = [net.unknown("If1"), net.unknown("If2")];
    let ur = [net.unknown("Ur1"), net.unknown("Ur2")];
    let lo = [net.unknown("l1_out"), net.unknown("l2_out")];
    let ro = [net.unknown("r1_out"), net.unknown("r2_out")];

    // proof mass, with the transducer force and the optional servo force
    let mut mass = alloc::vec![(v, C64::new(0.0, k / w - p.mass * w)), (fm, one), (it[0], zt * chi)];
    if let Some(g) = gain {
        mass.push((ro[0], g));
    }
    net.equation(&mass, &[(f, one)]);

    // mechanical damping line
    let km = sqrt(2.0 * HBAR * w.abs() * h);
    net.equation(&[(fm, one), (v, r(-h))], &[(inp(Line::M), r(km))]);
    net.equation(&[(mo, one), (fm, r(-2.0 / km))], &[(inp(Line::M), -one)]);

    let amp = [(Line::A1, Line::B1), (Line::A2, Line::B2)];
    let loss = [Line::L1, Line::L2];
    let det = [Line::R1, Line::R2];
    let kl = sqrt(2.0 * HBAR * wt * p.r_loss);
    let kr = sqrt(2.0 * HBAR * wt * p.r_detect);
    for q in 0..2 {
        let (a, b) = amp[q];
        // amplifier input node voltage and current
        net.equation(&[(un[q], one)], &[(inp(a), r(s)), (inp(b), r(-s))]);
        net.equation(&[(il[q], one), (ifb[q], one), (it[q], one)], &[(inp(a), r(t)), (inp(b), r(t))]);
        // transducer: quadrature 2 carries the velocity signal
        if q == 0 {
            net.equation(&[(un[0], one), (it[0], -zt)], &[]);
        } else {
            net.equation(&[(un[1], one), (it[1], -zt), (v, -i * zt * (2.0 * chi * wt / w))], &[]);
        }
        // loss line
        net.equation(&[(un[q], one), (il[q], r(-p.r_loss))], &[(inp(loss[q]), r(kl))]);
        net.equation(&[(lo[q], one), (un[q], r(-2.0 / kl))], &[(inp(loss[q]), -one)]);
        // detection line
        net.equation(&[(ro[q], one), (ur[q], r(-2.0 / kr))], &[(inp(det[q]), -one)]);
    }
    // feedback capacitor on the carrier, mixing the two quadratures
    net.equation(&[(ur[0], one), (un[0], -one), (ifb[1], r(zf))], &[]);
    net.equation(&[(ur[1], one), (un[1], -one), (ifb[0], r(-zf))], &[]);

    net.output(mo, "m", w.signum());
    net.output(ro[0], "r1", 1.0);
    net.output(ro[1], "r2", 1.0);
    net.output(lo[0], "l1", 1.0);
    net.output(lo[1], "l2", 1.0);
    net.pair_outputs(ro[0], ro[1]);
    net.pair_outputs(lo[0], lo[1]);
    Ok(net)
}

/// Rows of a solved sensor network split into drive and line coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorTransfer {
    /// Velocity per unit external force.
    pub velocity_drive: C64,
    /// Velocity per unit incoming field.
    pub velocity: CoefficientSet,
    /// `r1_out` per unit external force.
    pub detection_drive: C64,
    /// `r1_out` per unit incoming field.
    pub detection: CoefficientSet,
}

impl SensorTransfer {
    pub fn from_result(res: &ScatteringResult) -> Self {
        let split = |name: &str| {
            let row = res.row(name).expect("sensor network row");
            (row[0], CoefficientSet(core::array::from_fn(|k| row[k + 1])))
        };
        let (velocity_drive, velocity) = split("V");
        let (detection_drive, detection) = split("r1_out");
        SensorTransfer { velocity_drive, velocity, detection_drive, detection }
    }

    /// Free-mass force noise `λ_α`: velocity row over its force coefficient.
    pub fn force_noise(&self) -> CoefficientSet {
        self.velocity * self.velocity_drive.inv()
    }

    /// Estimator noise `μ_α`: detection row normalized to unit force response.
    pub fn estimator(&self) -> CoefficientSet {
        self.detection * self.detection_drive.inv()
    }
}

/// Commutator deviation of the open-loop sensor S-matrix (sideband basis).
pub fn sensor_commutators(
    p: &InstrumentParams,
    omega: f64,
    norm: AmplifierNorm,
) -> Result<CommutatorDeviation> {
    Ok(build_sensor_network_with(p, None, omega, norm)?.solve()?.commutators())
}
