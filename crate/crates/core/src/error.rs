use alloc::string::String;

/// Errors raised by the simulation, model and training code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("circuit error: {0}")]
    Circuit(String),
    #[error("embedding error: {0}")]
    Embedding(String),
    #[error("quantum layer error: {0}")]
    Layer(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("training aborted: non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
