use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("first passage not reached within {max_duration} s (target {target})")]
    Timeout { target: f64, max_duration: f64 },

    #[error("infeasible run: {0}")]
    Infeasible(String),

    #[error("stream {stream_index} failed: {source}")]
    Worker {
        stream_index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
