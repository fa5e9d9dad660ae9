//! Randomized detection of `q`-monomials in multivariate polynomials that are
//! represented by tree-like arithmetic circuits.
//!
//! A *q-monomial* is a monomial `x_{i1}^{s1} ... x_{it}^{st}` with every
//! exponent in `1..=q-1`; a 2-monomial is a multilinear monomial. Given a
//! circuit of `+` gates (unbounded fan-in) and `x` gates (fan-in two) over
//! named variables, this crate decides with one-sided error whether the
//! circuit's sum-product expansion contains a q-monomial of degree exactly
//! `k`, without ever expanding the polynomial:
//!
//! 1. [`mod@reconstruct`] rewrites the circuit so that every surviving
//!    monomial picks up a unique multilinear tag of fresh `z`-variables,
//! 2. [`transform`] replaces each variable occurrence by a random `Z_2`-linear
//!    sum of `q-1` shared `y`-variables, and
//! 3. [`detect`] substitutes group-algebra elements of `F[Z_2^k]` for the
//!    `y`-variables and random field points for the `z`-variables, so the
//!    final value is nonzero only in the presence of the sought monomial.
//!
//! Everything probabilistic is checked against [`oracle`], an exact
//! (exponential-time) sum-product expansion used for small instances.
//!
//! The `examples/` directory contains one runnable program per capability;
//! the `qmono` binary is a thin command-line front end over the same API.

pub mod circuit;
pub mod cli;
pub mod detect;
pub mod gf2d;
pub mod group_algebra;
pub mod oracle;
pub mod reconstruct;
pub mod transform;

pub use circuit::{parse, Circuit};
pub use detect::{decision_with_confidence, run, Decision, DetectConfig, DetectReport};
pub use gf2d::{field_for_degree, FieldParams, GF2dElement};
pub use group_algebra::{GroupAlgebraElement, GroupVector};
pub use oracle::{expand, ExpandedPolynomial, Monomial};
pub use reconstruct::{reconstruct, ReconstructedCircuit};
pub use transform::ReplacementPlan;
