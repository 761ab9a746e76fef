//! Magnons in two dipole-coupled square-lattice ferromagnets.
//!
//! The pipeline runs
//! [`dipole`] lattice sums → [`classical`] ground state → k = 0 block in
//! [`spinwave`] → [`bogoliubov`] diagonalisation → [`squeezing`] parameters
//! → [`entanglement`] between the two planes. [`sweep`] chains it over a grid
//! of plane separations.
//!
//! Units: ħ = a = 1, energies in units of the exchange J₁.

pub mod bogoliubov;
pub mod classical;
pub mod dipole;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod params;
pub mod spinwave;
pub mod squeezing;
pub mod sweep;

pub use bogoliubov::{analytic_bogoliubov, eigenenergies, numeric_paraunitary, BogoliubovDecomposition};
pub use classical::{classical_energy, determine_phase, phase_boundary_distance, ClassicalConfig};
pub use dipole::{inter_sum, intra_sum, Axis, DipoleSums, SumKind};
pub use entanglement::{
    covariance_from_bogoliubov, eta_minus_analytic, eta_minus_numeric, log_negativity,
    CovarianceMatrix,
};
pub use error::{Error, Result};
pub use params::{validate, LatticeSpec, ModelParams, Phase, ValidatedParams};
pub use spinwave::{bdg_block, brute_force_block, BdgBlock};
pub use squeezing::{extract, generator_matrices, reconstruct, GeneratorSet, SqueezingParams};
pub use sweep::{run_phase_diagram, run_sweep, SweepConfig, SweepRecord};
