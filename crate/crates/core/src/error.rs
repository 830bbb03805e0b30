use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an expression that is identically zero")]
    DivisionByZero,

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{name}` (reserved names: {reserved})")]
    UnknownIdentifier { name: String, reserved: String },

    #[error("unsupported radical sqrt({0}); only sqrt(R^2 - 4*S) is available")]
    UnsupportedRadical(String),

    #[error("expected a single atom, found `{0}`")]
    NotAnAtom(String),

    #[error("jet order overflow: differentiating `{jet}` by `{var}` exceeds order {cap}")]
    JetOrderOverflow { jet: String, var: String, cap: u8 },

    #[error("expression `{0}` cannot be evaluated to an exact value")]
    NotEvaluable(String),

    #[error("invalid parameter binding: {0}")]
    InvalidBinding(String),

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("invalid vector field: {0}")]
    InvalidField(String),

    #[error("equation has explicit time dependence: {0}")]
    NonAutonomous(String),

    #[error("characteristic polynomial has non-rational roots (remaining factor {0}); choose a binding with a perfect-square discriminant R^2 - 4*S")]
    IrrationalEigenvalue(String),

    #[error("determining system did not stabilise: {0}")]
    NotStabilized(String),

    #[error("generator does not reduce this equation: {0}")]
    NotReducible(String),

    #[error("repeated-root case out of scope: R^2 - 4*S = 0 makes the solution symmetries coincide")]
    RepeatedRoot,

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    #[error("commutator [{0}, {1}] is not in the span of the basis")]
    NotClosed(usize, usize),

    #[error("unknown equation `{0}`")]
    UnknownEquation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
