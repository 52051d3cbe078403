//! Exact computation of the Klein-four module structure of holomorphic
//! differentials for totally ramified (Z/2 x Z/2)-covers of the projective
//! line in characteristic two.
//!
//! A cover is given by two rational functions p, q over GF(2^n), presenting
//! the function field as k(t)(u, v) with u^2 - u = p and v^2 - v = q. The
//! pipeline:
//!
//! 1. [`reduction`] brings p, q, p+q into standard form (all pole orders odd).
//! 2. [`cover`] classifies each branch point, checks total ramification, and
//!    computes different exponents and the genus.
//! 3. [`local`] solves the local coefficient equations at each branch point,
//!    producing the classifying invariants (lambda_y, delta_y).
//! 4. [`predict`] evaluates the closed-form decomposition of the space of
//!    holomorphic differentials into indecomposable Klein-four modules.
//! 5. [`holo`] materializes an explicit basis of holomorphic differentials,
//!    builds the action matrices of the two generators, and
//! 6. [`klein4rep`] independently decomposes that module by exact Kronecker
//!    pencil reduction, so prediction and linear algebra can be compared.
//!
//! Run `cargo run --example verify_basis` for the end-to-end flow, or use the
//! thin `klein4diff` binary (see the crate README).

pub mod cli;
pub mod cover;
pub mod field;
pub mod holo;
pub mod klein4rep;
pub mod linalg;
pub mod local;
pub mod predict;
pub mod ratfun;
pub mod reduction;
