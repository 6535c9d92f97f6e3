use std::path::PathBuf;

/// Coarse classification used by callers to pick an exit code: bad input
/// versus a numerical breakdown on input that was structurally fine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}, column {column:?}: cannot parse {value:?} as a number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("need at least {need} complete rows, found {found}")]
    TooFewRows { need: usize, found: usize },

    #[error("need at least 2 indicator columns, found {0}")]
    TooFewColumns(usize),

    #[error("column {0:?} is constant")]
    ConstantColumn(String),

    #[error("duplicate indicator label {0:?}")]
    DuplicateLabel(String),

    #[error("non-finite value in row {row}, column {column:?}")]
    NonFinite { row: usize, column: String },

    #[error("{0}")]
    Dimension(String),

    #[error("weights must be nonnegative, entry {index} is {value}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights must have a positive sum")]
    ZeroWeightSum,

    #[error("geometric aggregation needs strictly positive scores; row {row}, column {column:?} is {value}")]
    NonPositiveScore {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("{0}")]
    Domain(String),

    #[error("constant response: the index has zero sample variance")]
    ConstantResponse,

    #[error("bandwidth selection needs at least {need} observations with positive x, found {found}")]
    TooFewPositive { need: usize, found: usize },

    #[error("plug-in selector: every candidate block fit is singular")]
    BlockFitsSingular,

    #[error("plug-in selector: variance estimate unstable even with the reduced block cap")]
    PluginUnstable,

    #[error("covariance matrix is not symmetric positive definite")]
    NotSpd,

    #[error("reference main effect is zero; relative importance undefined")]
    ZeroReference,

    #[error("bound enumeration over {0} indicators exceeds the 2^k guard (k <= 20)")]
    TooManyIndicators(usize),

    #[error("weight normalization impossible: the solved weights sum to zero")]
    ZeroNormalizer,

    #[error("forward importance ratios undefined: the reference covariance projection is zero")]
    ZeroDenominator,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::BlockFitsSingular
            | Error::PluginUnstable
            | Error::ZeroReference
            | Error::ZeroNormalizer
            | Error::ZeroDenominator => ErrorKind::Numerical,
            _ => ErrorKind::Input,
        }
    }
}
