use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff mismatch: {lhs} vs {rhs}")]
    CutoffMismatch { lhs: u32, rhs: u32 },

    #[error("occupation {quad} exceeds the per-mode cutoff {n_max}")]
    OutOfCutoff { quad: String, n_max: u32 },

    #[error("sector N = {sector} not representable with per-mode cutoff {n_max}")]
    SectorTooLarge { sector: u32, n_max: u32 },

    #[error("subspace {0} has zero weight")]
    EmptySubspace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("cannot parse sector set {spec:?}: {reason}")]
    SectorSpec { spec: String, reason: String },

    #[error("no crossover of the dominant sector found in r ∈ [0, {max_r}]")]
    NoCrossover { max_r: f64 },

    #[error("no sign change of the witness over the noise range")]
    NoSignChange,

    #[error("fidelity is not monotone in the noise parameter near {at}")]
    NonMonotone { at: f64 },

    #[error("support of dimension {dim} exceeds the dense cap {cap}")]
    SupportTooLarge { dim: usize, cap: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
