//! CSV tables and human-readable summaries.

use std::fmt::Write as _;

use coldamp_core::budget::{BudgetPoint, BudgetWarning, MatchingResult};
use coldamp_core::InstrumentParams;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const BUDGET_COLUMNS: [&str; 10] = [
    "omega_rad_s",
    "frequency_hz",
    "delta",
    "sigma_vfr",
    "sigma_vse",
    "sigma_cross",
    "sigma_ff",
    "accel_sensitivity",
    "config_digest",
    "tool_version",
];

/// First 16 hex digits of the SHA-256 of the configuration text.
pub fn config_digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// 12 significant digits, scientific notation, locale-free.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

fn budget_fields(b: &BudgetPoint) -> [String; 8] {
    [
        num(b.omega),
        num(b.omega / std::f64::consts::TAU),
        num(b.delta),
        num(b.sigma_vfr),
        num(b.sigma_vse),
        num(b.sigma_cross),
        num(b.sigma_ff),
        num(b.accel_sensitivity),
    ]
}

pub fn budget_csv(points: &[BudgetPoint], digest: &str) -> String {
    let mut s = BUDGET_COLUMNS.join(",");
    s.push('\n');
    for b in points {
        let _ = writeln!(s, "{},{digest},{TOOL_VERSION}", budget_fields(b).join(","));
    }
    s
}

/// Parameter sweeps prepend the swept key and its value.
pub fn sweep_csv(param: &str, values: &[f64], points: &[BudgetPoint], digest: &str) -> String {
    let mut s = format!("parameter,value,{}\n", BUDGET_COLUMNS.join(","));
    for (v, b) in values.iter().zip(points) {
        let _ = writeln!(s, "{param},{},{},{digest},{TOOL_VERSION}", num(*v), budget_fields(b).join(","));
    }
    s
}

fn warning_text(w: &BudgetWarning) -> String {
    match w {
        BudgetWarning::CarrierRatio { ratio } => {
            format!("carrier/signal frequency ratio {ratio:.3e} is not >> 1e3; quadrature model is marginal")
        }
    }
}

pub fn budget_summary(p: &InstrumentParams, reference: &BudgetPoint, points: &[BudgetPoint]) -> String {
    let mut s = String::new();
    let hz = reference.omega / std::f64::consts::TAU;
    let _ = writeln!(s, "coldamp {TOOL_VERSION} noise budget");
    let _ = writeln!(s, "reference frequency   {hz:.4e} Hz (Omega = {:.4e} rad/s)", reference.omega);
    let _ = writeln!(s, "Delta                 {:.4}", reference.delta);
    let _ = writeln!(s, "R_m = H_m/k_t^2       {:.4e} ohm", p.r_mech(reference.omega));
    let _ = writeln!(s, "force noise Sigma_FF  {:.4e} N^2/Hz", reference.sigma_ff);
    let _ = writeln!(s, "acceleration noise    {:.4e} m s^-2/sqrt(Hz)", reference.accel_sensitivity);
    let h = p.mechanics_at(reference.omega).1;
    let xi2 = h * h * (1.0 + reference.delta * reference.delta);
    let _ = writeln!(s, "  free-running part   {:.4e} N^2/Hz", xi2 * reference.sigma_vfr);
    let _ = writeln!(s, "  sensing error       {:.4e} N^2/Hz", xi2 * reference.sigma_vse);
    let _ = writeln!(s, "  interference        {:.4e} N^2/Hz", xi2 * reference.sigma_cross);
    if points.len() > 1 {
        let best = points.iter().min_by(|a, b| a.sigma_ff.total_cmp(&b.sigma_ff)).expect("nonempty");
        let _ = writeln!(
            s,
            "grid: {} points, lowest Sigma_FF {:.4e} N^2/Hz at {:.4e} Hz",
            points.len(),
            best.sigma_ff,
            best.omega / std::f64::consts::TAU
        );
    }
    for w in points.iter().flat_map(|b| b.warnings.iter()).chain(reference.warnings.iter()) {
        let _ = writeln!(s, "warning: {}", warning_text(w));
    }
    s
}

pub fn matching_report(m: &MatchingResult, delta: f64, r_mech: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Delta                      {delta:.6e}");
    let _ = writeln!(s, "ratio_opt (R_a/R_m)        {:.6e}", m.ratio_opt);
    let _ = writeln!(s, "R_a at optimum             {:.6e} ohm", m.ratio_opt * r_mech);
    let _ = writeln!(s, "Sigma_FF at optimum        {:.6e} N^2/Hz", m.sigma_opt);
    let _ = writeln!(s, "  Langevin part            {:.6e} N^2/Hz", m.langevin_part);
    let _ = writeln!(s, "  detection part           {:.6e} N^2/Hz", m.detection_part);
    let _ = writeln!(s, "numerical minimizer ratio  {:.6e}", m.ratio_numeric);
    let _ = writeln!(s, "cross-check residual       location {:.3e}, value {:.3e}", m.ratio_residual, m.value_residual);
    s
}
