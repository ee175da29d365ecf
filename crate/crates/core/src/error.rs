use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShellError {
    #[error("coordinate z = {z} outside the interval [{lo}, {hi}]")]
    Domain { z: f64, lo: f64, hi: f64 },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid profile description: {0}")]
    Profile(String),
    #[error("unknown model id `{0}`")]
    UnknownModel(String),
    #[error("reduction not applicable to {0} shells")]
    NotApplicable(&'static str),
    #[error("assembly error: {0}")]
    Assembly(String),
    #[error("admissibility violated: {0}")]
    Admissibility(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("factorization broke down at pivot {pivot} (value {value:e})")]
    Factorization { pivot: usize, value: f64 },
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("optimization failed: {0}")]
    Optimization(String),
    #[error("several global minimizers of H0 found at {0:?}")]
    MultipleMinima(alloc::vec::Vec<f64>),
    #[error("mesh error: {0}")]
    Mesh(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, ShellError>;
