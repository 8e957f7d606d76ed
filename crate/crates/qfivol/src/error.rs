use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("operation requires a regular monotone function (f(0) > 0); got '{0}'")]
    RequiresRegular(String),

    #[error("regular mean requires strictly positive arguments (got {x:e}, {y:e})")]
    ZeroMeanArgument { x: f64, y: f64 },

    #[error("inverse mean superoperator requires faithful state (min eigenvalue {0:e})")]
    NotFaithful(f64),

    #[error("matrix is not self-adjoint (max deviation {0:e})")]
    NotSelfAdjoint(f64),

    #[error("not positive semidefinite (offending value {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("trace must be one (got {0})")]
    TraceNotOne(f64),

    #[error("imaginary residue {0:e} exceeds 1e-10; upstream input is likely not self-adjoint")]
    ImaginaryResidue(f64),

    #[error(
        "oracle budget exceeded: n = {n}, N = {n_obs} needs ~{terms} elementary terms \
         (caps: n <= {max_n}, N <= {max_obs})"
    )]
    BudgetExceeded {
        n: usize,
        n_obs: usize,
        terms: u128,
        max_n: usize,
        max_obs: usize,
    },

    #[error("state generation failed: {rejections} consecutive rejections below floor {floor:e} (n = {n})")]
    RejectionLimit {
        n: usize,
        floor: f64,
        rejections: usize,
    },

    #[error("cannot write '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("unknown monotone function token '{0}' (expected sld, rld, wy, or wyd:BETA)")]
    UnknownToken(String),

    #[error("unknown mode '{0}'")]
    UnknownMode(String),
}
