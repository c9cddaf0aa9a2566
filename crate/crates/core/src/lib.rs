//! Forward synthesis and constructive inversion for a shallow layered
//! acoustic waveguide.
//!
//! A point source at the bottom of the layer `z ∈ [0, 1]` produces boundary
//! data `g(r)` whose radial Fourier transform `G(λ)` is a sum over waveguide
//! modes. The inverse pipeline recovers the potential `q(z) = k² n(z)` from
//! that data in three stages:
//!
//! 1. [`invert::extract_spectral_data`]: poles and residues of `G(λ)` give
//!    the eigenvalues `λ_j²` and endpoint weights `t_j = ψ_j(1)²`.
//! 2. [`invert::ProductModel`]: the characteristic function is rebuilt as
//!    an infinite product, giving the norming constants `α_j = t_j b_j²`
//!    and the spectral function `ρ`.
//! 3. [`glevitan`]: the Gelfand–Levitan integral equation turns `ρ` into
//!    the transformation kernel, whose diagonal derivative is `q`.
//!
//! [`forward`] and [`synth`] produce the data the inverse stages consume.

// oracle tables keep every digit mpmath printed
#![allow(clippy::excessive_precision)]
// `!(a > b)` is how validation rejects NaN along with out-of-order values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod forward;
pub mod freelayer;
pub mod glevitan;
pub mod invert;
pub mod model;
pub mod numerics;
pub mod specfun;
pub mod synth;

pub use error::{Error, Result};
