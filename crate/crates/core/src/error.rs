use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its domain (for example `alpha <= -1`).
    InvalidParameter { name: &'static str, value: f64 },
    /// A value left the floating-point range; use the log-domain routines.
    Overflow { what: &'static str, degree: usize },
    /// The weight series did not reach the requested mass before the term cap.
    Truncation { cap: usize, mass: f64 },
    /// The tridiagonal eigen-solver did not converge.
    EigenSolver { order: usize, index: usize },
    /// An adaptive integrator stopped before meeting its tolerance.
    ToleranceNotMet { estimate: f64, error: f64 },
    /// The integrand returned NaN.
    NotANumber { at: f64 },
    /// A grid refinement did not stabilise.
    NoConvergence { last: f64, previous: f64 },
    /// An operation needs data the caller did not supply.
    Missing(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::Overflow { what, degree } => {
                write!(f, "{what} overflows at degree {degree}")
            }
            Error::Truncation { cap, mass } => write!(f, "weight series reached only mass {mass} after {cap} terms"),
            Error::EigenSolver { order, index } => {
                write!(f, "tridiagonal eigen-solver failed for order {order} at eigenvalue {index}")
            }
            Error::ToleranceNotMet { estimate, error } => {
                write!(f, "adaptive quadrature stopped at {estimate} with error estimate {error}")
            }
            Error::NotANumber { at } => write!(f, "integrand returned NaN at z = {at}"),
            Error::NoConvergence { last, previous } => {
                write!(f, "refinement did not stabilise (last {last}, previous {previous})")
            }
            Error::Missing(what) => write!(f, "missing {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub(crate) fn check(cond: bool, name: &'static str, value: f64) -> crate::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value })
    }
}
