//! Desk-scale experiments on mod-ell Galois images of elliptic curves
//! over Q.
//!
//! The library provides the computational pieces and the experiments glue
//! them together:
//!
//! - [`modarith`]: prime fields, quadratic characters, prime and squarefree
//!   streams.
//! - [`curves`]: Weierstrass curves over Q and F_p, point counting, traces
//!   of Frobenius, and the multiplicative-rank test on Frobenius
//!   eigenvalues.
//! - [`gl2`]: 2x2 matrix groups over Z/m, subgroup closure, commutator
//!   subgroups, characteristic-polynomial fibers and det cosets.
//! - [`galimage`]: a one-sided classifier for the image of the mod-ell
//!   Galois representation of a curve, driven by Frobenius samples.
//! - [`heights`]: height-ordered enumeration of rational points and of the
//!   Weierstrass family.
//! - [`sieve`]: the large-sieve quantity L(Q) in exact rationals and the
//!   associated counting bounds.
//! - [`equidist`]: Frobenius class histograms over the full family mod p
//!   against their equidistribution predictions.
//! - [`derangement`]: conjugate unions, derangement proportions, coset
//!   tables and a product-closure probe in SL2 x SL2.
//!
//! Grid sweeps are data-parallel via rayon when the default `parallel`
//! feature is enabled; disabling it swaps in a sequential path with
//! identical outputs.

pub mod curves;
pub mod derangement;
pub mod equidist;
pub mod error;
pub mod galimage;
pub mod gl2;
pub mod heights;
pub mod modarith;
pub mod par;
pub mod rng;
pub mod sieve;

pub use error::{Error, Result};
