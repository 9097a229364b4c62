//! Exact combinatorics for partition generating functions with symplectic
//! and orthogonal contents.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: rationals, sparse Laurent polynomials, truncated `q`-series
//!   and infinite products.
//! - [`partitions`]: enumeration, hooks, contents and Frobenius coordinates.
//! - [`symfunc`]: symmetric functions in power-sum coordinates.
//! - [`fock`]: the bosonic Fock space with Heisenberg and vertex operators.
//! - [`identities`]: both sides of each generating-function identity and an
//!   exact checker.

pub mod arith;
pub mod fock;
pub mod identities;
pub mod partitions;
pub mod symfunc;
