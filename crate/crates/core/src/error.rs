use alloc::string::String;
use core::fmt;

/// Errors shared across the solver crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A state with `vrho <= 0` was passed to an operation that needs a
    /// strictly positive density (invariants, eigenvalues, Riemann data).
    NonpositiveDensity { vrho: f64 },
    /// A radius below the wall at `x = 1`.
    RadiusBelowWall { x: f64 },
    /// NaN or infinity where a finite value is required.
    NonfiniteInput,
    /// Entropy-pair parameter outside `(-1, 1)`.
    InvalidXi { xi: f64 },
    /// Mesh width outside `(0, 1)`.
    InvalidMeshWidth { l: f64 },
    /// Sampling a wall fan on a ray pointing into the wall.
    NegativeRay { xi: f64 },
    /// A wave crosses the averaging box, so the divergence-theorem average
    /// does not apply.
    WaveLeavesBox,
    /// All three segment lengths are zero.
    EmptyInterval,
    /// The middle-state root could not be bracketed. This cannot happen for
    /// valid inputs and indicates an internal invariant violation.
    BracketFailure,
    /// Configuration rejected before the run started.
    InvalidConfig(String),
    /// The CFL condition failed; the run must stop.
    CflViolation {
        step: usize,
        max_speed: f64,
        limit: f64,
    },
    /// A cell left the monitored invariant region by more than the
    /// configured tolerance.
    MonitorViolation {
        step: usize,
        time: f64,
        sup_w: f64,
        inf_z: f64,
        bound: f64,
    },
    /// Strip width below what the mesh can resolve.
    StripTooNarrow { eps: f64, min: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonpositiveDensity { vrho } => {
                write!(f, "nonpositive weighted density {vrho}")
            }
            Error::RadiusBelowWall { x } => write!(f, "radius {x} is below the wall at x = 1"),
            Error::NonfiniteInput => write!(f, "non-finite input"),
            Error::InvalidXi { xi } => write!(f, "entropy parameter xi = {xi} outside (-1, 1)"),
            Error::InvalidMeshWidth { l } => write!(f, "mesh width l = {l} outside (0, 1)"),
            Error::NegativeRay { xi } => write!(f, "ray xi = {xi} points into the wall"),
            Error::WaveLeavesBox => write!(f, "a wave leaves the averaging box"),
            Error::EmptyInterval => write!(f, "all segment lengths are zero"),
            Error::BracketFailure => write!(f, "middle-state root bracket failed"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::CflViolation {
                step,
                max_speed,
                limit,
            } => write!(
                f,
                "CFL violation at step {step}: max wave speed {max_speed} >= l/h = {limit}"
            ),
            Error::MonitorViolation {
                step,
                time,
                sup_w,
                inf_z,
                bound,
            } => write!(
                f,
                "invariant monitor violation at step {step} (t = {time}): \
                 sup w = {sup_w}, inf z = {inf_z}, allowed bound {bound}"
            ),
            Error::StripTooNarrow { eps, min } => {
                write!(f, "strip width {eps} below mesh resolution {min}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
