use thiserror::Error;

use crate::params::Phase;

/// Everything that can go wrong between parameter validation and the
/// logarithmic negativity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Domain(String),

    #[error("lattice sum did not converge: half-width {cutoff} reached, remainder {remainder:e} > {target:e}")]
    Convergence {
        cutoff: usize,
        remainder: f64,
        target: f64,
    },

    #[error("parameters sit on the phase boundary (residual {residual:e})")]
    Boundary { residual: f64 },

    #[error("no phase boundary for separations in [{lo}, {hi}]")]
    NoBoundary { lo: f64, hi: f64 },

    #[error("requested {requested:?} but the classical ground state is {actual:?}")]
    PhaseMismatch { requested: Phase, actual: Phase },

    #[error("lattice side {0} exceeds the brute-force cap of 64")]
    Size(usize),

    #[error("magnon mode softened: squared energy {0:e} < 0")]
    Instability(f64),

    #[error("mode energy {0:e} below the gap tolerance")]
    Gapless(f64),

    #[error("Hamiltonian matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("matrix has an eigenvalue on the logarithm branch cut: {0}")]
    LogBranch(String),

    #[error("matrix is not in the four-parameter family (projection residual {0:e})")]
    Projection(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
