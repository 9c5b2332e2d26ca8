use thiserror::Error;

use crate::degrees::ArithDegreeEstimate;
use crate::heights::HeightValue;

#[derive(Debug, Clone, Error)]
pub enum DynError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot mix elements of Q(sqrt({left})) and Q(sqrt({right}))")]
    FieldMismatch { left: i64, right: i64 },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not a morphism: {0}")]
    NotAMorphism(String),

    #[error("map is not defined at point {0}")]
    NotAMorphismAtPoint(String),

    #[error("well-definedness unverified: {0}")]
    Unverified(String),

    #[error("dynamical degree unresolvable: {0}")]
    Unresolvable(String),

    #[error("budget exceeded: {what}")]
    BudgetExceeded {
        what: String,
        partial: Option<HeightValue>,
    },

    #[error("budget exceeded while estimating arithmetic degree after {} steps", .0.ratio_trace.len())]
    ArithDegreeBudget(Box<ArithDegreeEstimate>),

    #[error("preperiodicity undecided: {0}")]
    Undecided(String),

    #[error("insufficient generators: {0}")]
    InsufficientGenerators(String),

    #[error("singular curve y^2 = x^3 + {a}x + {b}")]
    SingularCurve { a: i64, b: i64 },

    #[error("point not on curve: {0}")]
    NotOnCurve(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl DynError {
    pub(crate) fn parse(column: usize, message: impl Into<String>) -> Self {
        DynError::Parse {
            line: 1,
            column,
            message: message.into(),
        }
    }
}

pub type Result<T, E = DynError> = std::result::Result<T, E>;
