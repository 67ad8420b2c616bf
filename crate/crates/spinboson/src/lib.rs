//! Perturbation expansions for generalized spin-boson Hamiltonians.
//!
//! A finite-dimensional atomic system with Hamiltonian `H_at` is coupled to a
//! three-dimensional radiation field through an interaction `λ(a*(G) + a(G))`
//! with a rotation-invariant, matrix-valued form factor `G`.  This crate
//! computes the coefficients of the ground-state energy expansion
//! `E(λ) = Σ_n E_n λ^n` and of the ground-state norm expansion by two
//! independent strategies:
//!
//! * a **renormalized graph resummation** ([`renorm`]): energy coefficients are
//!   organized as contractions of linked pairing graphs with lower-order
//!   insertions subtracted, so every integral converges without any infrared
//!   regulator;
//! * a **regularized recursion** ([`renorm::energy_coefficient_eta`]): the same
//!   coefficients with an explicit spectral shift `η > 0`, extrapolated to
//!   `η → 0`.
//!
//! Two independent oracles validate the results: exact Rayleigh–Schrödinger
//! coefficients of arbitrary finite Hermitian pencils ([`matrix_pt`]) and exact
//! diagonalization of a mode-discretized, occupation-truncated model
//! ([`oracle`]).

pub mod error;
pub mod graph;
pub mod linalg;
pub mod matrix_pt;
pub mod model;
pub mod oracle;
pub mod pairings;
pub mod quadrature;
pub mod renorm;

pub use error::{Error, Result};
