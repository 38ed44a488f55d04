//! Tensor factorizations of finite-dimensional Hilbert spaces.
//!
//! A factorization is an orthonormal basis plus a labeling of its vectors by
//! multi-indices `(i, j, …)`; the labeling is what defines subsystems. The same
//! global state trajectory can look entangled and interacting under one
//! factorization ("Samsara") and completely trivial under another ("Nirvana").
//! This crate builds both kinds and measures the difference:
//!
//! - [`hilbert`]: states, operators, bases, partial traces, Schmidt decomposition.
//! - [`dynamics`]: propagators, piecewise-constant evolution, comoving frames.
//! - [`factorize`]: nearest local Hamiltonian, additive spectrum decomposition,
//!   static/dynamic Nirvana factorizations, numerical factorization search.
//! - [`scenarios`]: a pointer/spin measurement and an observer reading it off,
//!   told in both the entangling and the disentangled factorization.
//! - [`io`]: the JSON matrix format and trace/report export.

// Negated float comparisons are deliberate: NaN has to fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod factorize;
pub mod hilbert;
pub mod io;
pub mod random;
pub mod scenarios;

pub use error::{Error, Result};
pub use hilbert::{
    eigh, entanglement_entropy, gram_schmidt_complete, inner, kron, partial_trace, schmidt,
    swap_basis_unitary, tensor, BasisTrajectory, Factorization, Operator, OrthonormalBasis, State,
    TensorSplit,
};
