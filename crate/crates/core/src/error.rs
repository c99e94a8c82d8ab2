use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("photon number must be at least 1")]
    ZeroPhotons,

    #[error("photon number {0} exceeds the supported maximum of {max}", max = crate::fock::MAX_PHOTONS)]
    TooManyPhotons(usize),

    #[error("photon numbers differ: {0} vs {1}")]
    PhotonMismatch(usize, usize),

    #[error("mode partition must contain at least one part")]
    EmptyPartition,

    #[error("mode partition contains a zero-photon part")]
    ZeroPart,

    #[error("joint dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("photon pair ({n_a}, {n_b}) is not valid here: {reason}")]
    WrongParity {
        n_a: usize,
        n_b: usize,
        reason: &'static str,
    },

    #[error("(delta, eps) = ({delta}, {eps}) lies outside the region where tau is defined")]
    Infeasible { delta: f64, eps: f64 },

    #[error("state vector has zero norm")]
    ZeroState,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),
}
