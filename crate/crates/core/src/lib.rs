//! Positive linear operators built from modified Laguerre weights and a gamma
//! density integral kernel.
//!
//! For an integrable `Φ` on `[0, ∞)` the operator is
//!
//! ```text
//! R(Φ; x) = Σ_κ w_κ(x) · E_κ[Φ],
//! w_κ(x)  = exp(-ηx/2) · 2^(-α-1) · 2^(-κ) · L_κ^(α)(-ηx/2),
//! ```
//!
//! where `E_κ` is the expectation under a gamma law with shape `κβ` and rate
//! `ηβ` (the `κ = 0` term is the point evaluation `Φ(0)`).
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; `std` only adds the shared quadrature-rule cache and
//! `std::error::Error` impls.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
mod error;
pub mod function;
mod math;
pub mod operators;
pub mod quadrature;
pub mod special;
mod sum;

pub use error::Error;
pub use function::{Growth, TestFunction};
pub use operators::{
    apply_p, apply_r, apply_r_many, central_moments_closed, moments_numerical, raw_moments_closed, CentralMoments,
    MomentSet, OperatorParams, OperatorValue, RawMoments,
};
pub use quadrature::{build_rule, kernel_expectation, kernel_expectation_adaptive, GammaKernel, QuadratureRule};
pub use special::{log_gamma, log_weight, pochhammer, weight_sequence, WeightSequence};

pub type Result<T> = core::result::Result<T, Error>;
