use thiserror::Error;

use crate::szm::PoleRecord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} sites vs {right} sites")]
    Dimension { left: usize, right: usize },

    #[error("site count {0} outside supported range 1..=64")]
    SiteCount(usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid model: {0}")]
    Model(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} of {sites} sites exceeds the dense limit of {limit}")]
    Size { what: &'static str, sites: usize, limit: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("complex-valued Hamiltonians are not supported by the real eigensolver")]
    ComplexHamiltonian,

    #[error("eigensolver failed to converge")]
    Convergence,

    #[error("expansion pole at order {}: {} vanishes", .0.order, .0.denominator)]
    Pole(PoleRecord),

    #[error("order {order}: residual has a component in the kernel of the unperturbed adjoint map (norm {norm:e})")]
    KernelObstruction { order: usize, norm: f64 },

    #[error("requested order {requested} exceeds the cap of {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("memory budget exceeded: need {need_bytes} bytes per worker, cap is {cap_bytes}")]
    MemoryBudget { need_bytes: u64, cap_bytes: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Validation failures (exit code 2 in the CLI) as opposed to runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Model(_) | Error::Config { .. } | Error::Parse { .. } | Error::SiteCount(_) | Error::Domain(_)
        )
    }
}
