//! Sectioned key-value parameter files.
//!
//! ```text
//! [mechanics]
//! mass = 0.27 kg        # comments run to end of line
//! ```
//!
//! Every value carries its unit. Frequencies accept `rad/s` or `Hz`. The
//! reactive impedances may be given as a magnitude (`zf_mag`, `zt_mag`, in
//! ohm) or as a capacitance (`c_feedback`, `c_transducer`, in F); `zt_mag`
//! is referred to the analysis frequency.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::Path;

use coldamp_core::InstrumentParams;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
    #[error("line {line}: `{key}` given twice (first on line {first})")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("missing key `{key}` in [{section}]")]
    Missing { section: &'static str, key: &'static str },
    #[error("line {line}: `{key}` value `{value}` is not a finite number")]
    BadValue { line: usize, key: String, value: String },
    #[error("line {line}: `{key}` expects unit `{expected}`, found `{found}`")]
    BadUnit { line: usize, key: String, expected: String, found: String },
    #[error("line {line}: `{key}` = {value:e} {reason}")]
    Range { line: usize, key: String, value: f64, reason: &'static str },
    #[error("line {line}: `{key}` conflicts with `{other}`; give only one")]
    Conflict { line: usize, key: String, other: &'static str },
}

/// Run settings from the `[analysis]` section.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// Reference angular frequency Ω, rad/s.
    pub omega: f64,
    /// Default budget grid, Hz.
    pub freq_min: Option<f64>,
    pub freq_max: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub params: InstrumentParams,
    pub analysis: Analysis,
}

#[derive(Clone, Copy, PartialEq)]
enum Unit {
    Fixed(&'static str),
    Frequency,
    Count,
}

#[derive(Clone, Copy, PartialEq)]
enum Sign {
    Positive,
    NonNegative,
}

struct KeySpec {
    section: &'static str,
    key: &'static str,
    unit: Unit,
    sign: Sign,
}

const fn spec(section: &'static str, key: &'static str, unit: Unit, sign: Sign) -> KeySpec {
    KeySpec { section, key, unit, sign }
}

use Sign::{NonNegative, Positive};
use Unit::{Count, Fixed, Frequency};

const KEYS: &[KeySpec] = &[
    spec("mechanics", "mass", Fixed("kg"), Positive),
    spec("mechanics", "stiffness", Fixed("N/m"), NonNegative),
    spec("mechanics", "damping", Fixed("kg/s"), Positive),
    spec("mechanics", "coupling", Fixed("C/m"), Positive),
    spec("electronics", "omega_t", Frequency, Positive),
    spec("electronics", "r_loss", Fixed("ohm"), Positive),
    spec("electronics", "r_detect", Fixed("ohm"), Positive),
    spec("electronics", "r_amp", Fixed("ohm"), Positive),
    spec("electronics", "zf_mag", Fixed("ohm"), Positive),
    spec("electronics", "c_feedback", Fixed("F"), Positive),
    spec("electronics", "zt_mag", Fixed("ohm"), Positive),
    spec("electronics", "c_transducer", Fixed("F"), Positive),
    spec("noise", "temp_mech", Fixed("K"), NonNegative),
    spec("noise", "temp_amp", Fixed("K"), NonNegative),
    spec("noise", "temp_loss", Fixed("K"), NonNegative),
    spec("noise", "temp_detect", Fixed("K"), NonNegative),
    spec("analysis", "omega", Frequency, Positive),
    spec("analysis", "freq_min", Fixed("Hz"), Positive),
    spec("analysis", "freq_max", Fixed("Hz"), Positive),
    spec("analysis", "points", Count, Positive),
];

const SECTIONS: [&str; 4] = ["mechanics", "electronics", "noise", "analysis"];

struct Entry {
    value: f64,
    line: usize,
}

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut section: Option<&str> = None;
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                message: "section header must end with `]`".into(),
            })?;
            let name = name.trim();
            section = Some(
                SECTIONS.iter().copied().find(|s| *s == name).ok_or_else(|| {
                    ConfigError::UnknownSection { line, section: name.into() }
                })?,
            );
            continue;
        }
        let Some(sec) = section else {
            return Err(ConfigError::Syntax { line, message: "entry before any [section]".into() });
        };
        let (key, rest) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            message: "expected `key = value unit`".into(),
        })?;
        let key = key.trim();
        let spec = KEYS.iter().find(|k| k.section == sec && k.key == key).ok_or_else(|| {
            ConfigError::UnknownKey { line, section: sec.into(), key: key.into() }
        })?;
        if let Some(prev) = entries.get(spec.key) {
            return Err(ConfigError::Duplicate { line, key: key.into(), first: prev.line });
        }
        let value = parse_value(spec, rest.trim(), line)?;
        entries.insert(spec.key, Entry { value, line });
    }
    build(&entries)
}

fn parse_value(spec: &KeySpec, text: &str, line: usize) -> Result<f64, ConfigError> {
    let mut parts = text.split_whitespace();
    let number = parts.next().unwrap_or("");
    let unit = parts.collect::<Vec<_>>().join(" ");
    let bad_value =
        || ConfigError::BadValue { line, key: spec.key.into(), value: number.to_string() };
    let bad_unit = |expected: &str| ConfigError::BadUnit {
        line,
        key: spec.key.into(),
        expected: expected.into(),
        found: unit.clone(),
    };
    let value = match spec.unit {
        Count => {
            if !unit.is_empty() {
                return Err(bad_unit(""));
            }
            number.parse::<usize>().map_err(|_| bad_value())? as f64
        }
        _ => {
            let v: f64 = number.parse().map_err(|_| bad_value())?;
            if !v.is_finite() {
                return Err(bad_value());
            }
            match spec.unit {
                Fixed(u) if unit == u => v,
                Fixed(u) => return Err(bad_unit(u)),
                Frequency if unit == "rad/s" => v,
                Frequency if unit == "Hz" => TAU * v,
                _ => return Err(bad_unit("rad/s or Hz")),
            }
        }
    };
    let ok = match spec.sign {
        Positive => value > 0.0,
        NonNegative => value >= 0.0,
    };
    if !ok {
        let reason = match spec.sign {
            Positive => "must be strictly positive",
            NonNegative => "must not be negative",
        };
        return Err(ConfigError::Range { line, key: spec.key.into(), value, reason });
    }
    Ok(value)
}

fn build(e: &BTreeMap<&'static str, Entry>) -> Result<Config, ConfigError> {
    let get = |key: &'static str| -> Result<f64, ConfigError> {
        e.get(key).map(|x| x.value).ok_or_else(|| ConfigError::Missing {
            section: KEYS.iter().find(|k| k.key == key).map(|k| k.section).unwrap_or(""),
            key,
        })
    };
    let opt = |key: &str| e.get(key).map(|x| x.value);
    let either = |mag: &'static str, cap: &'static str| -> Result<(), ConfigError> {
        match (e.get(mag), e.get(cap)) {
            (Some(_), Some(c)) => Err(ConfigError::Conflict { line: c.line, key: cap.into(), other: mag }),
            (None, None) => Err(ConfigError::Missing { section: "electronics", key: mag }),
            _ => Ok(()),
        }
    };
    either("zf_mag", "c_feedback")?;
    either("zt_mag", "c_transducer")?;

    let omega = get("omega")?;
    let omega_t = get("omega_t")?;
    let mut params = InstrumentParams {
        mass: get("mass")?,
        stiffness: get("stiffness")?,
        damping: get("damping")?,
        coupling: get("coupling")?,
        omega_t,
        r_loss: get("r_loss")?,
        r_detect: get("r_detect")?,
        r_amp: get("r_amp")?,
        c_feedback: opt("c_feedback").unwrap_or(f64::NAN),
        c_transducer: opt("c_transducer").unwrap_or(f64::NAN),
        temp_mech: get("temp_mech")?,
        temp_amp: get("temp_amp")?,
        temp_loss: get("temp_loss")?,
        temp_detect: get("temp_detect")?,
        mechanical_table: Vec::new(),
    };
    if let Some(z) = opt("zf_mag") {
        params.set_zf_mag(z);
    }
    if let Some(z) = opt("zt_mag") {
        params.set_zt_mag(z, omega);
    }
    let analysis = Analysis {
        omega,
        freq_min: opt("freq_min"),
        freq_max: opt("freq_max"),
        points: opt("points").map(|p| p as usize),
    };
    if let (Some(lo), Some(hi)) = (analysis.freq_min, analysis.freq_max) {
        if lo > hi {
            let line = e["freq_min"].line;
            return Err(ConfigError::Range { line, key: "freq_min".into(), value: lo, reason: "exceeds freq_max" });
        }
    }
    Ok(Config { params, analysis })
}

/// Canonical text form; parsing it gives back an identical [`Config`].
pub fn dump_config(cfg: &Config) -> String {
    let p = &cfg.params;
    let a = &cfg.analysis;
    let mut s = String::new();
    let line = |s: &mut String, k: &str, v: f64, u: &str| {
        let _ = writeln!(s, "{k} = {v:e} {u}");
    };
    s.push_str("[mechanics]\n");
    line(&mut s, "mass", p.mass, "kg");
    line(&mut s, "stiffness", p.stiffness, "N/m");
    line(&mut s, "damping", p.damping, "kg/s");
    line(&mut s, "coupling", p.coupling, "C/m");
    s.push_str("\n[electronics]\n");
    line(&mut s, "omega_t", p.omega_t, "rad/s");
    line(&mut s, "r_loss", p.r_loss, "ohm");
    line(&mut s, "r_detect", p.r_detect, "ohm");
    line(&mut s, "r_amp", p.r_amp, "ohm");
    line(&mut s, "c_feedback", p.c_feedback, "F");
    line(&mut s, "c_transducer", p.c_transducer, "F");
    s.push_str("\n[noise]\n");
    line(&mut s, "temp_mech", p.temp_mech, "K");
    line(&mut s, "temp_amp", p.temp_amp, "K");
    line(&mut s, "temp_loss", p.temp_loss, "K");
    line(&mut s, "temp_detect", p.temp_detect, "K");
    s.push_str("\n[analysis]\n");
    line(&mut s, "omega", a.omega, "rad/s");
    if let Some(v) = a.freq_min {
        line(&mut s, "freq_min", v, "Hz");
    }
    if let Some(v) = a.freq_max {
        line(&mut s, "freq_max", v, "Hz");
    }
    if let Some(n) = a.points {
        let _ = writeln!(s, "points = {n}");
    }
    s
}
