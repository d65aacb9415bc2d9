use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid measurement basis: {0}")]
    InvalidBasis(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// The J convention with S(rho_B) as reference only matches
    /// -S(A|B) + M when S(rho_A) = S(rho_B).
    #[error("state is not exchange symmetric: S(A) = {s_a}, S(B) = {s_b}")]
    AsymmetricReference { s_a: f64, s_b: f64 },

    #[error("optimizer did not converge within {evaluations} evaluations (best value {best} at theta = {theta}, phi = {phi})")]
    NoConvergence {
        evaluations: usize,
        best: f64,
        theta: f64,
        phi: f64,
    },

    #[error("generator is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),

    #[error("step dtau * gamma_plus = {0} exceeds the stability limit 0.01; reduce dtau")]
    StepTooLarge(f64),

    #[error("state lost positivity at tau = {tau} (min eigenvalue {min_eigenvalue:e}); reduce dtau")]
    PositivityLost { tau: f64, min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        expected,
    }
}
