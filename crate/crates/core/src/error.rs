use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("fixture verification failed: {0}")]
    Fixture(String),
    #[error("p-adic precision guard exceeded: {0}")]
    Precision(String),
    #[error("ideal is not principal")]
    NotPrincipal,
    #[error("internal defect: {0}")]
    Defect(String),
}

pub type Result<T> = std::result::Result<T, Error>;
