use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed graph input: wrong arity, unknown or repeated vertex, duplicate edge.
    #[error("invalid k-graph: {0}")]
    InvalidGraph(String),
    #[error("vertex {0} lies in no edge")]
    IsolatedVertex(String),
    #[error("graph is not k-partite")]
    NotKPartite,
    #[error("graph has no edges")]
    NoEdges,
    /// A mathematical precondition does not hold for the given input.
    #[error("{0}")]
    Domain(String),
    /// Input is beyond the size an exhaustive routine is allowed to handle.
    #[error("{what} is {actual}, above the guard of {limit}")]
    Guard {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    /// The routine produced output that failed its own re-verification.
    #[error("internal defect: {0}")]
    Defect(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn guard(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::Guard {
            what,
            actual,
            limit,
        })
    } else {
        Ok(())
    }
}
