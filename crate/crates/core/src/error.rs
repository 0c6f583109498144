use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("pole at z = {z}")]
    PoleAt { z: Complex64 },

    #[error("pole on the sampled circle near z = {z}")]
    PoleOnCircle { z: Complex64 },

    #[error("series division requires a nonzero constant term in the divisor")]
    ZeroConstantTerm,

    #[error("trigonometric polynomial is negative on the circle (min = {min:e})")]
    Negativity { min: f64 },

    #[error("spectral factorization failed: {0}")]
    FactorizationFailure(String),

    #[error("function is not in the closed unit ball (sup on circle = {sup})")]
    NotInBall { sup: f64 },

    #[error("symbol is inner: 1 - |b|^2 vanishes on the circle")]
    InnerFunction,

    #[error("function is not holomorphic on the closed disc: {0}")]
    NotHolomorphic(String),

    #[error("Besov-Dirichlet space with p = {p} is not a Hilbert space")]
    NonHilbertSpace { p: f64 },

    #[error("Gram system is numerically singular (condition number {condition:e})")]
    SingularGram { condition: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("domination |g| <= |f| fails at z = {witness}: |g| = {g_abs}, |f| = {f_abs}")]
    Domination {
        witness: Complex64,
        g_abs: f64,
        f_abs: f64,
    },

    #[error("function is not outer: {0}")]
    NotOuter(String),

    #[error("|lambda| = 1 is not allowed (lambda = {lambda})")]
    UnimodularLambda { lambda: Complex64 },

    #[error("series diverges: |lambda| = {modulus} must exceed 1")]
    Divergence { modulus: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("family is degenerate: only {converged} instances converged (need at least 4)")]
    DegenerateFamily { converged: usize },

    #[error("U_mu is singular at interior atom {z}")]
    Singularity { z: Complex64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("validation error at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
