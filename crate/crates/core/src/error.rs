use thiserror::Error;

use crate::solver::SolverFailure;

#[derive(Debug, Error)]
pub enum Error {
    #[error("an IFS needs at least two maps, got {0}")]
    TooFewMaps(usize),
    #[error("map {index} has contraction ratio {delta}, expected 0 < delta < 1")]
    NotContractive { index: usize, delta: f64 },
    #[error("two maps share the fixed point {0}")]
    DuplicateFixedPoints(f64),
    #[error("images of the hull under maps {left} and {right} overlap or touch")]
    OverlappingImages { left: usize, right: usize },
    #[error("interval [{lo}, {hi}] is degenerate")]
    DegenerateInterval { lo: f64, hi: f64 },
    #[error("generation {generation} has a band of width {width:e}, below the floor {floor:e}")]
    GenerationTooLarge { generation: usize, width: f64, floor: f64 },
    #[error("bands are not sorted and disjoint at index {0}")]
    UnsortedBands(usize),
    #[error("expected {expected} gap variables, got {got}")]
    VariableCount { expected: usize, got: usize },
    #[error("gap variable {index} = {value} is outside (-1, 1)")]
    VariableOutOfRange { index: usize, value: f64 },
    #[error("quadrature order must be positive")]
    EmptyRule,
    #[error("evaluation point {x} collides with a root or band endpoint")]
    ExactNodeCollision { x: f64 },
    #[error("point {0} lies outside the hull")]
    OutOfHull(f64),
    #[error("potential at {x} kept colliding with quadrature nodes after retries")]
    PersistentCollision { x: f64 },
    #[error("no convergence at generation {}: max residual {:e} after {} iterations", .0.generation, .0.max_residual(), .0.iterations)]
    NoConvergence(Box<SolverFailure>),
    #[error("singular Jacobian at generation {}", .0.generation)]
    SingularJacobian(Box<SolverFailure>),
    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),
    #[error("an exponential fit needs at least 3 points with distinct abscissae")]
    TooFewPoints,
    #[error("successive differences change sign or vanish; no exponential fit")]
    NonMonotoneInput,
    #[error("differences do not shrink; the sequence is not exponentially convergent")]
    NonDecayingInput,
    #[error("least-squares fit did not converge")]
    FitDiverged,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
