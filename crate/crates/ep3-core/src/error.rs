use core::fmt;

/// Errors shared across the analysis modules.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Input violated a documented precondition (non-square, NaN entries,
    /// dimension mismatch, missing symmetry flag, ...).
    InvalidInput(&'static str),
    /// An iterative method exhausted its iteration budget.
    NonConvergence { iterations: usize, residual: f64 },
    /// A linear solve hit a pivot below the singularity threshold.
    Singular { pivot: f64 },
    /// A degenerate cluster has geometric multiplicity strictly between 1
    /// and its algebraic multiplicity; outside the single-Jordan-block case.
    AmbiguousStructure {
        algebraic: usize,
        geometric: usize,
    },
    /// The chain equation (H - lambda0) x = u became insoluble before the
    /// requested chain length was reached.
    ChainBreaks { solved_up_to: usize, residual: f64 },
    /// A bilinear scalar required by the normalization conditions vanished.
    DegenerateNormalization { scalar: &'static str, magnitude: f64 },
    /// A loop sample landed on (or numerically indistinguishable from) an EP.
    EpOnPath { step: usize, phi: f64 },
    /// Branch matching could not be disambiguated even after refinement.
    MatchingAmbiguous { phi: f64 },
    /// Monodromy cycle structure changed between fit radii.
    InconsistentCycles { radius_index: usize },
    /// EP search converged to a degeneracy of lower order than requested.
    WrongOrder { requested: usize, found: usize },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            CoreError::NonConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            CoreError::Singular { pivot } => {
                write!(f, "singular matrix (pivot magnitude {pivot:e})")
            }
            CoreError::AmbiguousStructure { algebraic, geometric } => write!(
                f,
                "ambiguous degeneracy structure: algebraic multiplicity {algebraic}, geometric multiplicity {geometric}"
            ),
            CoreError::ChainBreaks { solved_up_to, residual } => write!(
                f,
                "Jordan chain breaks after vector {solved_up_to} (residual {residual:e})"
            ),
            CoreError::DegenerateNormalization { scalar, magnitude } => write!(
                f,
                "degenerate normalization: scalar {scalar} has magnitude {magnitude:e}"
            ),
            CoreError::EpOnPath { step, phi } => {
                write!(f, "loop passes through an exceptional point at step {step} (phi = {phi})")
            }
            CoreError::MatchingAmbiguous { phi } => {
                write!(f, "branch matching ambiguous near phi = {phi} after refinement")
            }
            CoreError::InconsistentCycles { radius_index } => write!(
                f,
                "monodromy cycle structure changed at radius index {radius_index}; reduce the largest radius"
            ),
            CoreError::WrongOrder { requested, found } => write!(
                f,
                "converged to a degeneracy of order {found}, requested {requested}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}
