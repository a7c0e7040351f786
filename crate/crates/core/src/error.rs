use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Numeric payloads are carried as `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{what}: index {index} exceeds configured maximum {max}")]
    IndexTooLarge {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("cross section is singular at theta = 0")]
    SingularPoint,

    #[error("{what} diverges for n = 0; use the regularized moment")]
    Divergent { what: &'static str },

    #[error(
        "quadrature for {what}{} did not reach tolerance: estimated error {error:e} > requested {requested:e} after {subdivisions} subdivisions",
        fmt_index(*index)
    )]
    QuadratureFailure {
        what: &'static str,
        index: Option<(usize, usize)>,
        error: f64,
        requested: f64,
        subdivisions: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("closed-form cascade requires data orthogonal to the collisional invariants (b0 = b1 = 0)")]
    NotOrthogonalToInvariants,

    #[error("mode {mode}: {terms} exponential terms exceed the budget of {budget}")]
    TermBudgetExceeded {
        mode: usize,
        terms: usize,
        budget: usize,
    },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("degenerate fit: {points} usable points, need at least {required}")]
    DegenerateFit { points: usize, required: usize },

    #[error("{what}: weight overflows the representable range")]
    Overflow { what: &'static str },

    #[error("bracket does not vanish at theta = 0 (residual {residual:e}); profiles are inconsistent at the origin")]
    NonRemovableSingularity { residual: f64 },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },
}

fn fmt_index(index: Option<(usize, usize)>) -> String {
    match index {
        Some((n, m)) => format!(" at (n, m) = ({n}, {m})"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
