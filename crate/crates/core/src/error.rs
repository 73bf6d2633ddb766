use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension N must be >= 1, got {0}")]
    InvalidDimension(u32),
    #[error("coupling g must be positive and finite, got {0}")]
    InvalidCoupling(f64),
    #[error("shape constant A must be positive and finite, got {0}")]
    InvalidShape(f64),
    #[error("trial parameter a must be positive and finite, got {0}")]
    InvalidTrialParameter(f64),
    #[error("reflected branch has zero slope at the origin; mixing coefficient undefined")]
    DegenerateMixing,
    #[error("mixing coefficient xi = {xi} makes the trial function vanish inside r0")]
    NonPositiveTrial { xi: f64 },
    #[error("grid needs at least {min} points, got {len}")]
    GridTooShort { len: usize, min: usize },
    #[error("grid is not strictly increasing at index {index}")]
    NonMonotoneGrid { index: usize },
    #[error("sample count {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("grid density {0} is below the minimum of 64 points per unit")]
    DensityTooLow(f64),
    #[error("no cutoff radius reaches overflow budget {0}")]
    CutoffSearch(f64),
    #[error("all log weights are -inf")]
    EmptyLogWeights,
    #[error("energy-correction denominator vanished")]
    VanishingDenominator,
    #[error("non-finite value in {stage} at r = {radius}")]
    NonFinite { stage: &'static str, radius: f64 },
    #[error("correction factor lost positivity at iteration {iteration}, r = {radius}")]
    PositivityViolation { iteration: usize, radius: f64 },
    #[error("Sturm bisection failed to bracket the lowest eigenvalue")]
    SturmBracket,
    #[error("inverse iteration did not converge")]
    InverseIterationStagnation,
    #[error("eigenvector changes sign at index {index}; not a ground state")]
    NodeInGroundState { index: usize },
    #[error("invalid option: {0}")]
    InvalidOption(String),
}
