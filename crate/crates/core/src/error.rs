use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({0}, {1}) appears more than once")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("field vector has length {got}, graph has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("pruning vertex {vertex} hit the singular field lambda = -beta")]
    SingularPrune { vertex: usize },
    #[error("no simple connected graph with n = {n}, max degree = {max_degree} and min degree 2")]
    InfeasibleGraph { n: usize, max_degree: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid spin parameters beta = {beta}, gamma = {gamma}: {reason}")]
    InvalidParams { beta: f64, gamma: f64, reason: &'static str },
    #[error("{what} needs {needed} units of work, budget is {budget}; use the approximation pipeline")]
    OverBudget { what: &'static str, needed: u128, budget: u128 },

    #[error("polynomial has degree {degree}, expected at least {min}")]
    DegreeTooSmall { degree: usize, min: usize },
    #[error("polynomial of degree {degree} exceeds the polar-form bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("constant coefficient vanishes; logarithm is undefined at 0")]
    ZeroConstantTerm,
    #[error("root finder did not converge after {iterations} iterations (worst residual {residual:e})")]
    RootsNotConverged { iterations: usize, residual: f64, best: Vec<Complex64> },

    #[error("angle {theta} has no boundary crossing for this region")]
    AngleOutOfDomain { theta: f64 },
    #[error("no feasible point: target angle {target} is not reachable with {d} factors")]
    Infeasible { target: f64, d: usize },

    #[error("strip half-width {delta:e} fell below the floor {floor:e}")]
    DegenerateStrip { delta: f64, floor: f64 },
    #[error("stability precondition violated: root {root} lies outside the region")]
    RootOutsideRegion { root: Complex64 },

    #[error("field {field} is not below the zero-free threshold {lambda_star}")]
    OutOfRegime { field: f64, lambda_star: f64 },
    #[error("covering map budget {budget} exhausted (best alpha {alpha}, degree {degree}, worst excursion {excursion:e})")]
    CoveringBudget { budget: usize, alpha: f64, degree: usize, excursion: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
