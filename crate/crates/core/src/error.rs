use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A†| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("eigenvalue {value} at index {index} lies outside [-{tolerance:e}, 1+{tolerance:e}]")]
    SpectrumOutOfRange {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("Rényi order must be positive, got {kappa}")]
    InvalidKappa { kappa: f64 },

    #[error("Rényi order {kappa} is within the guard band around 1; use the von Neumann entropy")]
    VonNeumannLimit { kappa: f64 },

    #[error("operator ordering 0 <= σ_V <= σ <= 1 violated (smallest eigenvalue {min_eigenvalue:e})")]
    OrderingViolated { min_eigenvalue: f64 },

    #[error("eigenvalue {value} at index {index} is on the boundary of [0, 1]; the modular operator is singular")]
    BoundaryEigenvalue { index: usize, value: f64 },

    #[error("{n} modes requested, the Fock-space oracle supports at most {max}")]
    TooManyModes { n: usize, max: usize },

    #[error("not a statistical operator: {reason}")]
    NotDensity { reason: String },

    #[error("invalid index set: {reason}")]
    BadIndexSet { reason: String },

    #[error("lattice must have at least {min} sites, got {n}")]
    BadSize { n: usize, min: usize },

    #[error("inverse temperature must be non-negative, got {beta}")]
    NegativeBeta { beta: f64 },

    #[error("state is not particle-number preserving: squeezing block norm {max_squeezing:e} exceeds {tolerance:e}")]
    NotParticleNumberPreserving { max_squeezing: f64, tolerance: f64 },

    #[error("operator is not an orthogonal projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("point operator has {positive} positive and {negative} negative eigenvalues, spin dimension {spin_dim} allows at most {spin_dim} of each")]
    SpinDimensionExceeded {
        positive: usize,
        negative: usize,
        spin_dim: usize,
    },

    #[error("quadrature under-resolved: integrand tail {tail:e} at the momentum cutoff exceeds 1e-10")]
    QuadratureUnderResolved { tail: f64 },

    #[error("ε ladder has {len} points, at least {min} are required")]
    LadderTooShort { len: usize, min: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigendecomposition failed to converge")]
    Decomposition,
}
