use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the design and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A value broke a type invariant at construction.
    Invalid {
        what: &'static str,
        field: &'static str,
        value: f64,
        rule: &'static str,
    },
    /// A function was called outside its mathematical domain.
    Domain(&'static str),
    /// The integration step is too coarse for the transient being resolved.
    Resolution { dt: f64, max_dt: f64 },
    /// Two catalog entries of the same kind share a name.
    DuplicateName(alloc::string::String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid {
                what,
                field,
                value,
                rule,
            } => write!(f, "invalid {what}: {field} = {value} violates {rule}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Resolution { dt, max_dt } => write!(
                f,
                "time step {dt} s too coarse, must be at most {max_dt} s (t_ext / 100)"
            ),
            Error::DuplicateName(name) => write!(f, "duplicate part name `{name}`"),
        }
    }
}

impl core::error::Error for Error {}
