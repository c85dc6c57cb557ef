use thiserror::Error;

/// Counters reported by the elimination engine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QeStats {
    /// Polynomials produced by derivatives and pseudo-remainders.
    pub polys_generated: u64,
    /// Case splits opened on undetermined coefficient signs.
    pub case_splits: u64,
    /// Quantified variables removed by linear substitution.
    pub presolved_vars: u64,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("divisor is constant in the division variable")]
    DegenerateDivisor,
    #[error("polynomial vanishes at an interval endpoint")]
    EndpointRoot,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by the zero stream")]
    DivByZero,
    #[error("stream has negative valuation and is not a power series")]
    NotAPowerSeries,
    #[error("truncated series does not carry enough coefficients")]
    InsufficientOrder,
    #[error("head coefficient is not positive; no real square root")]
    NoRealRoot,
    #[error("head coefficient {0} is not the square of a rational")]
    IrrationalHead(String),
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unsupported fragment: {0}")]
    UnsupportedFragment(String),
    #[error("budget of {budget} polynomials exceeded ({} generated)", stats.polys_generated)]
    BudgetExceeded { budget: u64, stats: QeStats },
    #[error("formula is not ground: free variable `{0}`")]
    NotGround(String),
    #[error("formula has free variables: {0}")]
    NotASentence(String),
    #[error("formula is not in the pure ordered-field language: {0}")]
    NotPure(String),
    #[error("circuit references undefined node `{0}`")]
    DanglingReference(String),
    #[error("duplicate circuit node `{0}`")]
    DuplicateName(String),
    #[error("circuit has no input")]
    MissingInput,
    #[error("circuit has no output")]
    MissingOutput,
    #[error("algebraic loop: cycle without a delay through `{0}`")]
    AlgebraicLoop(String),
    #[error("transfer entry {0} is not causal")]
    NotCausal(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("unknown variable `{0}` in claim")]
    UnknownVariable(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Status token printed by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedFragment(_) => "UNSUPPORTED",
            Error::BudgetExceeded { .. } => "BUDGET",
            Error::AlgebraicLoop(_) => "ALGEBRAIC_LOOP",
            Error::NotCausal(_) => "NOT_CAUSAL",
            Error::Syntax { .. } | Error::UnknownIdentifier(_) => "PARSE_ERROR",
            Error::NotASentence(_) | Error::NotGround(_) | Error::UnboundVariable(_) => "NOT_A_SENTENCE",
            Error::DanglingReference(_)
            | Error::DuplicateName(_)
            | Error::MissingInput
            | Error::MissingOutput
            | Error::ArityMismatch(_)
            | Error::UnknownVariable(_) => "CIRCUIT_ERROR",
            _ => "ERROR",
        }
    }
}
