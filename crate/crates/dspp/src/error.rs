//! Error type shared by every module of the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while evaluating a model or an estimator.
///
/// Variants are grouped by origin: bad inputs (`InvalidModel`, `InvalidArgument`,
/// `Config`), numerical failures (`QuadratureNoConverge`, `CauchyNoConverge`,
/// `NonIntegrable`, `GammaPole`, `NonFinite`), and analytic-structure violations
/// (`BranchCut`, `ImaginaryResidue`).
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Model parameters violate a documented constraint.
    InvalidModel(String),
    /// An operation argument is out of range (jump index, horizon ordering, ...).
    InvalidArgument(String),
    /// A run configuration is inconsistent or would produce estimates outside
    /// the advertised error budget.
    Config(String),
    /// The adaptive quadrature exhausted its subdivision budget.
    QuadratureNoConverge {
        /// Best available estimate when the budget ran out.
        estimate: f64,
        /// Error bound attached to that estimate.
        error_bound: f64,
    },
    /// The integrand is (or appears) non-integrable on the named region.
    NonIntegrable { region: String },
    /// The gamma function was evaluated at a non-positive integer.
    GammaPole { x: f64 },
    /// Contour differentiation did not stabilise under node doubling.
    CauchyNoConverge { detail: String },
    /// A characteristic exponent jumped branches along the evaluation path.
    BranchCut { model: &'static str },
    /// A cumulant derivative that must be real carried too much imaginary part.
    ImaginaryResidue { order: usize, residue: f64 },
    /// A computation produced NaN or an infinity.
    NonFinite { context: String },
    /// The requested route does not apply to the given model family.
    UnsupportedRoute { route: &'static str, model: &'static str },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::QuadratureNoConverge { estimate, error_bound } => write!(
                f,
                "quadrature did not converge: estimate {estimate:.6e} with error bound {error_bound:.3e}"
            ),
            Error::NonIntegrable { region } => {
                write!(f, "integrand is not integrable on {region}")
            }
            Error::GammaPole { x } => write!(f, "gamma function pole at x = {x}"),
            Error::CauchyNoConverge { detail } => {
                write!(f, "contour derivatives did not converge: {detail}")
            }
            Error::BranchCut { model } => write!(
                f,
                "characteristic exponent of {model} crossed a branch cut on the evaluation path"
            ),
            Error::ImaginaryResidue { order, residue } => write!(
                f,
                "cumulant derivative of order {order} has imaginary residue {residue:.3e} (must be real)"
            ),
            Error::NonFinite { context } => write!(f, "non-finite value produced in {context}"),
            Error::UnsupportedRoute { route, model } => {
                write!(f, "route {route} does not apply to model {model}")
            }
        }
    }
}

impl std::error::Error for Error {}
