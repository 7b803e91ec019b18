//! Error type shared by map construction, planning, and simulation.

use alloc::string::String;
use core::fmt;

/// Anything that can go wrong while building maps, planning routes, or
/// running a mission.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    Config(String),
    /// Roadmap or diagram construction failed.
    Construction(String),
    /// A query point lies outside the map bounds.
    OutOfBounds { x: f64, y: f64 },
    /// A zero-length edge where a proper segment is required.
    DegenerateEdge,
    /// No route exists between the requested endpoints.
    NoPath,
    /// A vehicle ran past its step budget without reaching the goal.
    StepBudget { vehicle: usize, limit: u32 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Construction(msg) => write!(f, "construction error: {msg}"),
            Error::OutOfBounds { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the map bounds")
            }
            Error::DegenerateEdge => write!(f, "zero-length edge"),
            Error::NoPath => write!(f, "no route between the requested endpoints"),
            Error::StepBudget { vehicle, limit } => {
                write!(f, "vehicle {vehicle} exceeded its step budget of {limit}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
