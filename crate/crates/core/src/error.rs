use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Inputs do not live on compatible spaces or violate a structural rule.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// The request is legal but outside what this crate will compute.
    #[error("refused: {0}")]
    Refused(String),
    /// A bound that must hold by construction was violated; always a bug.
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(alloc::format!($($arg)*)) };
}
macro_rules! precondition {
    ($($arg:tt)*) => { $crate::error::Error::Precondition(alloc::format!($($arg)*)) };
}
macro_rules! refused {
    ($($arg:tt)*) => { $crate::error::Error::Refused(alloc::format!($($arg)*)) };
}
macro_rules! violated {
    ($($arg:tt)*) => { $crate::error::Error::BoundViolated(alloc::format!($($arg)*)) };
}
pub(crate) use {domain, precondition, refused, violated};
