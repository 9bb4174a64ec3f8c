use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("{map} refers to unknown id `{id}`")]
    UnknownId { map: &'static str, id: String },

    #[error("edge `{edge}` has dangling end `{vertex}`")]
    DanglingIncidence { edge: String, vertex: String },

    #[error("{map} is not an involution: `{element}` maps to `{image}` which does not map back")]
    NotInvolutive { map: &'static str, element: String, image: String },

    #[error("involution incompatible with incidence at edge `{edge}`")]
    IncompatibleInvolution { edge: String },

    #[error("graph is disconnected: vertex `{vertex}` is unreachable from `{root}`")]
    Disconnected { root: String, vertex: String },

    #[error("divisor does not belong to this graph: {0}")]
    ForeignDivisor(String),

    #[error("enumeration needs {required} candidates, budget is {cap}")]
    EnumerationBudgetExceeded { required: u128, cap: u64 },

    #[error("divisor is not real")]
    NotReal,

    #[error("divisor is not real and effective")]
    NotRealEffective,

    #[error("divisors are not linearly equivalent")]
    NotEquivalent,

    #[error("graph is not an M-graph")]
    NotMGraph,

    #[error("graph is not a strong M-graph")]
    NotStrongMGraph,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("inadmissible (g, s, a) triple: {0}")]
    InadmissibleTriple(String),

    #[error("base graph has genus {0}, need at least 1")]
    GenusTooSmall(i64),

    #[error("search exhausted without a hit: {0}")]
    SearchExhausted(String),

    /// A runtime theorem check failed. Carries a description of the
    /// offending instance; reaching this is a defect, not a user error.
    #[error("counterexample: {0}")]
    Counterexample(String),

    #[error("invalid edge length for `{edge}`: {reason}")]
    InvalidLength { edge: String, reason: String },

    #[error("point is not a rational point of the metric graph: {0}")]
    IrrationalPoint(String),

    #[error("metric graph is not an M-metric graph")]
    NotMMetricGraph,

    #[error("metric graph is not a strong M-metric graph")]
    NotStrongMMetricGraph,

    #[error("unit model needs {required} edges, budget is {cap}")]
    BudgetExceeded { required: u128, cap: u64 },
}

impl Error {
    /// Whether the error is a resource cap rather than a domain problem.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::EnumerationBudgetExceeded { .. } | Error::BudgetExceeded { .. })
    }

    /// Whether the error certifies a violated theorem.
    pub fn is_counterexample(&self) -> bool {
        matches!(self, Error::Counterexample(_) | Error::SearchExhausted(_))
    }
}
