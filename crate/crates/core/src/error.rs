use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("catalog error at line {line}: {msg}")]
    Catalog { line: usize, msg: String },
    #[error("unknown field label `{0}`")]
    UnknownField(String),
    #[error("requested {requested} digits but only {achieved} are attainable")]
    AccuracyFailure { requested: u32, achieved: u32 },
    #[error("form is not positive definite: leading minor {index} is {value}")]
    NotPositiveDefinite { index: usize, value: String },
    #[error("form space over {0} is not rational; the trace construction needs a complex conjugation")]
    FormSpaceNotRational(String),
    #[error("perfect form enumeration incomplete after {explored} forms; {frontier} still open")]
    IncompleteEnumeration { explored: usize, frontier: usize },
    #[error("facet enumeration failed for cell {0}")]
    FacetEnumeration(String),
    #[error("stabilizer search budget exceeded for cell {0}")]
    SearchBudget(String),
    #[error("assembly error: d_{degree} * d_{next} nonzero at row {row}, column {col}", next = .degree + 1)]
    BoundarySquare { degree: usize, row: usize, col: usize },
    #[error("element does not map the cell to itself")]
    NotInStabilizer,
    #[error("deficiency {0} is not 1; the limit constant is only defined for deficiency one")]
    DeficiencyNotOne(i64),
    #[error("no closed form for this group: {0}")]
    Unsupported(String),
    #[error(transparent)]
    ExactLa(#[from] vk_exactla::ExactLaError),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
