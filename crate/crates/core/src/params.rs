//! Instrument parameter set.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::error::{non_negative, positive, Error, Result};

/// Mechanical stiffness and damping measured at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalOverride {
    /// |Ω| in rad/s.
    pub omega: f64,
    pub stiffness: f64,
    pub damping: f64,
}

/// Parameters of one sensing channel.
///
/// Impedances of the reactive elements are stored as capacitances:
/// `Z_t = i/(2ΩC_t)` and `|Z_f| = 1/(ω_t C_f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentParams {
    /// Proof mass M, kg.
    pub mass: f64,
    /// Spring constant K, N/m.
    pub stiffness: f64,
    /// Viscous damping H_m, kg/s.
    pub damping: f64,
    /// Electromechanical coupling ϰ_t, C/m.
    pub coupling: f64,
    /// Carrier angular frequency ω_t, rad/s.
    pub omega_t: f64,
    /// Loss resistance R_l, ohm.
    pub r_loss: f64,
    /// Detection-line resistance R_r, ohm.
    pub r_detect: f64,
    /// Amplifier noise impedance R_a, ohm.
    pub r_amp: f64,
    /// Feedback capacitance C_f, F.
    pub c_feedback: f64,
    /// Transducer capacitance C_t, F.
    pub c_transducer: f64,
    /// Physical temperatures, K.
    pub temp_mech: f64,
    pub temp_amp: f64,
    pub temp_loss: f64,
    pub temp_detect: f64,
    /// Optional frequency-dependent K and H_m, sorted by ω.
    /// Empty means the constant values above apply everywhere.
    pub mechanical_table: Vec<MechanicalOverride>,
}

impl InstrumentParams {
    /// Reference measurement frequency of the microscope preset, rad/s.
    pub const MICROSCOPE_OMEGA: f64 = TAU * 5e-4;

    /// The space accelerometer channel of the reference design.
    ///
    /// `R_r` and the loss and detection temperatures are not given there;
    /// 50 Ω and 300 K are used.
    pub fn microscope() -> Self {
        let omega_t = TAU * 1e5;
        InstrumentParams {
            mass: 0.27,
            stiffness: 4e-6,
            damping: 1.3e-5,
            coupling: 1e-7,
            omega_t,
            r_loss: 2.5e5,
            r_detect: 50.0,
            r_amp: 1.5e5,
            c_feedback: 1.0 / (omega_t * 1.6e5),
            c_transducer: 1.0 / (2.0 * Self::MICROSCOPE_OMEGA * 1e14),
            temp_mech: 300.0,
            temp_amp: 1.5,
            temp_loss: 300.0,
            temp_detect: 300.0,
            mechanical_table: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("mass", self.mass)?;
        non_negative("stiffness", self.stiffness)?;
        positive("damping", self.damping)?;
        non_negative("coupling", self.coupling)?;
        positive("omega_t", self.omega_t)?;
        positive("r_loss", self.r_loss)?;
        positive("r_detect", self.r_detect)?;
        positive("r_amp", self.r_amp)?;
        positive("c_feedback", self.c_feedback)?;
        positive("c_transducer", self.c_transducer)?;
        non_negative("temp_mech", self.temp_mech)?;
        non_negative("temp_amp", self.temp_amp)?;
        non_negative("temp_loss", self.temp_loss)?;
        non_negative("temp_detect", self.temp_detect)?;
        let mut last = 0.0;
        for row in &self.mechanical_table {
            positive("mechanical_table.omega", row.omega)?;
            if row.omega <= last {
                return Err(Error::Invalid {
                    name: "mechanical_table.omega",
                    value: row.omega,
                    reason: "table must be strictly increasing in omega",
                });
            }
            last = row.omega;
            non_negative("mechanical_table.stiffness", row.stiffness)?;
            positive("mechanical_table.damping", row.damping)?;
        }
        Ok(())
    }

    /// `(K, H_m)` at `|Ω|`: linear in ln|Ω| between table rows, flat outside.
    pub fn mechanics_at(&self, omega: f64) -> (f64, f64) {
        let t = &self.mechanical_table;
        let w = omega.abs();
        match t.len() {
            0 => (self.stiffness, self.damping),
            _ if w <= t[0].omega => (t[0].stiffness, t[0].damping),
            n if w >= t[n - 1].omega => (t[n - 1].stiffness, t[n - 1].damping),
            _ => {
                let i = t.iter().position(|r| r.omega > w).unwrap_or(t.len() - 1);
                let (a, b) = (t[i - 1], t[i]);
                let f = libm::log(w / a.omega) / libm::log(b.omega / a.omega);
                (
                    a.stiffness + f * (b.stiffness - a.stiffness),
                    a.damping + f * (b.damping - a.damping),
                )
            }
        }
    }

    /// |Z_f| = 1/(ω_t C_f).
    pub fn zf_mag(&self) -> f64 {
        1.0 / (self.omega_t * self.c_feedback)
    }

    /// |Z_t| = 1/(2|Ω|C_t).
    pub fn zt_mag(&self, omega: f64) -> f64 {
        1.0 / (2.0 * omega.abs() * self.c_transducer)
    }

    /// Mechanical damping seen as an electrical resistance, R_m = H_m/ϰ_t².
    pub fn r_mech(&self, omega: f64) -> f64 {
        self.mechanics_at(omega).1 / (self.coupling * self.coupling)
    }

    /// Set C_f from a feedback impedance magnitude.
    pub fn set_zf_mag(&mut self, zf: f64) {
        self.c_feedback = 1.0 / (self.omega_t * zf);
    }

    /// Set C_t from a transducer impedance magnitude quoted at `omega`.
    pub fn set_zt_mag(&mut self, zt: f64, omega: f64) {
        self.c_transducer = 1.0 / (2.0 * omega.abs() * zt);
    }
}
