use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// The requested system size exceeds the configured dense-storage cap.
    #[error("resource limit: {what} needs N = {n}, cap is {cap}")]
    ResourceLimit {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    /// The success outcome has (numerically) zero probability.
    #[error("protocol impossible: success probability {0} leaves no state to renormalise")]
    ProtocolImpossible(f64),

    #[error("unsupported branch: {0}")]
    UnsupportedBranch(&'static str),
}
