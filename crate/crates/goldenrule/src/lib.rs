//! Time evolution of the hydrogen 2p → 1s survival probability in
//! first-order perturbation theory.
//!
//! The decay probability at time `t` is `λ² t² I(t)`, where `I(t)` is a
//! one-dimensional spectral integral over the photon frequency. This crate
//! evaluates `I(t)` three ways and cross-checks them against each other:
//!
//! * [`closedform`] — analytic results: the regularised dipole expression,
//!   the truncated (cutoff) dipole antiderivative, and the exact-coupling
//!   closed form built from the residue coefficients of [`model`];
//! * [`quadrature`] — an independent adaptive integration of the oscillatory
//!   spectral integrands in [`kernels`], used as the numerical oracle;
//! * [`analysis`] — survival-probability curves per model, deviation scans
//!   against the golden-rule line, and regime timescales (Zeno time, cutoff
//!   time, golden-rule convergence time).
//!
//! [`specfun`] supplies the sine/cosine/exponential integrals these need, in
//! cancellation-safe and overflow-safe (scaled) variants.

pub mod analysis;
pub mod closedform;
pub mod kernels;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod specfun;

pub use analysis::{DecayCurve, ModelId, RegimeReport, RegimeThresholds};
pub use closedform::{ClosedFormBranch, ClosedFormValue};
pub use model::{PhysicalConstants, ResidueCoefficients, TransitionParams};
pub use quadrature::QuadratureResult;
