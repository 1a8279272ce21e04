use thiserror::Error;

/// Error type shared by every module of the toolkit.
///
/// The variants map onto the CLI exit codes: `Parse`/`Domain`/`Io` are usage
/// errors (exit 1), `Numeric`/`Accuracy` signal non-convergence or a grid too
/// coarse for the requested tolerance (exit 2), and `Hypothesis` means a
/// theorem hypothesis does not hold for the supplied laws (exit 3).
#[derive(Debug, Error)]
pub enum Error {
    /// Spec string does not match the grammar. `pos` is the byte offset of
    /// the offending token.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis required by the theory is violated (mu <= 1, lattice
    /// lifetime without override, theta outside (q, 1), ...).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// An iterative method failed to converge; the message carries the
    /// bracket or residual trace.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Grid step or horizon cannot deliver the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// Inputs are mutually inconsistent (e.g. a (beta, mu) pair whose tilted
    /// mass is far from one).
    #[error("consistency error: {0}")]
    Consistency(String),

    /// Too few usable samples to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
