use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("every point shares one coordinate; no positive distance exists")]
    AllCoincident,
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("bandwidth proportion must lie in (0, 1], got {0}")]
    InvalidProportion(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("weights sum to zero")]
    ZeroTotalWeight,
    #[error("invalid analysis: {0}")]
    InvalidSpec(String),
    #[error("variable not found: {0}")]
    SpecMismatch(String),
    #[error("pair ({0}, {1}) is not part of the analysed variable set")]
    PairNotInSurface(String, String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("mixed or unsupported geometry: {0}")]
    MixedGeometry(String),
    #[error("feature collection is empty")]
    EmptyCollection,
    #[error("need at least 3 features, got {0}")]
    FewerThanThreeFeatures(usize),
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("non-numeric coordinate in row {row}: {value:?}")]
    NonNumericCoordinate { row: usize, value: String },
    #[error("only {0} complete observations remain, need at least 3")]
    TooFewComplete(usize),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
}

impl Error {
    /// Stable machine-readable name, used in HTTP error bodies and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::AllCoincident => "AllCoincident",
            Error::NonPositiveBandwidth(_) => "NonPositiveBandwidth",
            Error::InvalidProportion(_) => "InvalidProportion",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::ZeroTotalWeight => "ZeroTotalWeight",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::SpecMismatch(_) => "SpecMismatch",
            Error::PairNotInSurface(..) => "PairNotInSurface",
            Error::MalformedInput(_) => "MalformedInput",
            Error::MixedGeometry(_) => "MixedGeometry",
            Error::EmptyCollection => "EmptyCollection",
            Error::FewerThanThreeFeatures(_) => "FewerThanThreeFeatures",
            Error::MissingColumn(_) => "MissingColumn",
            Error::NonNumericCoordinate { .. } => "NonNumericCoordinate",
            Error::TooFewComplete(_) => "TooFewComplete",
            Error::IndexMismatch(_) => "IndexMismatch",
        }
    }

    /// True for errors caused by the input data rather than the analysis request.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedInput(_)
                | Error::MixedGeometry(_)
                | Error::EmptyCollection
                | Error::FewerThanThreeFeatures(_)
                | Error::MissingColumn(_)
                | Error::NonNumericCoordinate { .. }
                | Error::TooFewComplete(_)
        )
    }
}
