use thiserror::Error;

/// Which clause of the instance assumptions was violated.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Total individual budget does not exceed the allocation budget.
    BudgetNotRestrictive { total: usize, budget: usize },
    /// Some individual budget exceeds the allocation budget.
    IndividualExceedsTotal { player: usize, cap: usize, budget: usize },
    /// A cost value lies outside `[0, M]` (or is not finite).
    ValueOutOfRange { player: usize, k: usize, value: f64, max: f64 },
    /// A cost row increases somewhere.
    NonMonotone { player: usize, k: usize },
    /// The instance is flagged convex but a row is not.
    NotConvex { player: usize, k: usize },
    /// Row lengths, budget vector and player count disagree.
    Shape(String),
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::BudgetNotRestrictive { total, budget } => {
                write!(f, "sum of individual budgets {total} must exceed B = {budget}")
            }
            Violation::IndividualExceedsTotal { player, cap, budget } => {
                write!(f, "b[{player}] = {cap} exceeds B = {budget}")
            }
            Violation::ValueOutOfRange { player, k, value, max } => {
                write!(f, "f[{player}]({k}) = {value} outside [0, {max}]")
            }
            Violation::NonMonotone { player, k } => {
                write!(f, "row {player} increases between k = {k} and k = {}", k + 1)
            }
            Violation::NotConvex { player, k } => {
                write!(f, "row {player} is not convex around k = {}", k + 1)
            }
            Violation::Shape(msg) => write!(f, "shape mismatch: {msg}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("assumption violated: {0}")]
    AssumptionViolation(Violation),

    #[error("point ({player}, {k}) out of range (b = {cap})")]
    IndexOutOfRange { player: usize, k: usize, cap: usize },

    #[error("value f[{player}]({k}) is not available")]
    MissingValue { player: usize, k: usize },

    #[error("convex bounds requested on an instance not flagged convex")]
    NotConvexFlagged,

    #[error("brute force needs {points} lattice points, cap is {cap}")]
    CapExceeded { points: u128, cap: u128 },

    #[error("every point has already been evaluated")]
    AllEvaluated,

    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Errors caused by bad user input rather than by the program.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::AssumptionViolation(_)
                | Error::NotConvexFlagged
                | Error::SpecInvalid(_)
                | Error::Config(_)
                | Error::CapExceeded { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
