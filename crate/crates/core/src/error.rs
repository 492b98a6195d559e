use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A frequency that must be nonzero (or positive) was not.
    BadFrequency { name: &'static str, value: f64 },
    /// A physical parameter violates its sign or finiteness constraint.
    Invalid { name: &'static str, value: f64, reason: &'static str },
    /// The network matrix could not be factored.
    Singular { omega: f64, condition: f64 },
    /// A result overflowed or lost meaning in floating point.
    NonFinite { quantity: &'static str, omega: f64 },
    /// A sweep or search was given an unusable grid.
    BadGrid(&'static str),
    /// A sweep point failed; carries the grid value.
    AtGridPoint { value: f64, source: alloc::boxed::Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BadFrequency { name, value } => {
                write!(f, "frequency {name} = {value:e} is not allowed here")
            }
            Error::Invalid { name, value, reason } => write!(f, "{name} = {value:e}: {reason}"),
            Error::Singular { omega, condition } => write!(
                f,
                "singular network at omega = {omega:e} rad/s (condition estimate {condition:e})"
            ),
            Error::NonFinite { quantity, omega } => {
                write!(f, "{quantity} is not finite at omega = {omega:e} rad/s")
            }
            Error::BadGrid(why) => write!(f, "bad grid: {why}"),
            Error::AtGridPoint { value, source } => write!(f, "at grid value {value:e}: {source}"),
        }
    }
}

impl Error {
    /// True for failures of the arithmetic rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::NonFinite { .. } => true,
            Error::AtGridPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn nonzero(name: &'static str, value: f64) -> Result<f64> {
    if value == 0.0 || !value.is_finite() {
        Err(Error::BadFrequency { name, value })
    } else {
        Ok(value)
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Invalid { name, value, reason: "must be finite and strictly positive" })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Invalid { name, value, reason: "must be finite and non-negative" })
    }
}
