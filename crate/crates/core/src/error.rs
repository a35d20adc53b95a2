use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("word error: {0}")]
    Word(String),
    #[error("enumeration of {count} objects exceeds the cap of {cap}")]
    Explosion { count: u64, cap: u64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("family error: {0}")]
    Family(String),
    #[error("regularity error: {0}")]
    Regularity(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
