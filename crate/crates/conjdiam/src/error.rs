use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("group order {order} exceeds the configured cap {cap}")]
    OrderCapExceeded { order: u64, cap: u64 },
    #[error("generating set is empty")]
    EmptySet,
    #[error("set does not normally generate the group")]
    NotNormallyGenerating,
    #[error("no normally generating set of the requested size exists")]
    NoGeneratingSet,
    #[error("suite {suite} does not apply to the {family} family")]
    SuiteNotApplicable { suite: String, family: String },
    #[error("factor {0} lies outside X1 \u{222a} X2")]
    FactorNotInX(String),
    #[error("{0}")]
    NotFound(String),
    #[error("syntax error at token {token}: {message}")]
    SyntaxError { token: usize, message: String },
    #[error("token {token} not valid in this family: {message}")]
    TokenNotInFamily { token: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
