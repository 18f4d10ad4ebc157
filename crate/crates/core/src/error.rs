use alloc::string::String;

/// Errors raised by graph construction, solvers and checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("vertex {0} is not in the domain interior")]
    NotInDomain(usize),
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u64,
        budget: u64,
    },
    #[error("solver did not converge: worst relative residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("operator is not positive definite (gauge diverges)")]
    Indefinite,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("Monte Carlo divergence: {0}")]
    Divergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;
