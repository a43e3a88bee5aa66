use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants are coarse on purpose: callers (the CLI in particular) map
/// them onto exit codes, so they only need to tell configuration problems
/// apart from numerical ones.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("insufficient derivative capability: {0}")]
    Capability(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("outside of domain: {0}")]
    Domain(String),
    #[error("form degree error: {0}")]
    Degree(String),
    #[error("incompatible superpaths: {0}")]
    Compatibility(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("underdetermined probe set: {0}")]
    Underdetermined(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by bad input data rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Dimension(_) | Error::Parity(_) | Error::Degree(_))
    }

    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::Parity(_) => "parity",
            Error::Capability(_) => "capability",
            Error::Resolution(_) => "resolution",
            Error::Domain(_) => "domain",
            Error::Degree(_) => "degree",
            Error::Compatibility(_) => "compatibility",
            Error::Orientation(_) => "orientation",
            Error::Underdetermined(_) => "underdetermined",
            Error::Config(_) => "config",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
