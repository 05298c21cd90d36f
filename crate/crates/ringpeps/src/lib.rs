//! PEPS ground-state engine for two-dimensional ring-exchange Hamiltonians.
//!
//! The crate optimizes projected entangled pair states on L1 x L2 square
//! lattices (open or cylindrical boundaries) by Trotterized imaginary-time
//! evolution with plaquette gates, using Hermitian positive semi-definite
//! environment approximations (simple or cluster) for the local tensor
//! updates. A bond-local regularization sweep keeps the network's
//! "singularity" — the product of tensor norms over the contracted norm —
//! under control during the evolution. On top of the optimizer sit
//! measurement routines (energies, correlation functions, Fourier order
//! parameters), Rényi entanglement entropies across cylinder cuts, a
//! minimal-entanglement-state search over degenerate ground manifolds, and
//! the linear fit that extracts the topological entanglement entropy.

pub mod contraction;
pub mod entanglement;
pub mod environment;
pub mod error;
pub mod ite;
pub mod models;
pub mod observables;
pub mod peps;
pub mod regularization;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
