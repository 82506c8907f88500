//! Simulation of a pulsed optomechanical state-swap interface operating
//! outside the resolved-sideband limit.
//!
//! Three QND light–mechanics interactions, separated by quarter-period
//! mechanical rotations and optical noise rotations, exchange the states of
//! a mechanical oscillator and an optical pulse. The crate builds that
//! protocol's linear phase-space map with thermal and optical decoherence,
//! propagates Gaussian states through it ([`gaussian`]), pushes non-Gaussian
//! states through it via characteristic functions ([`phasespace`]), and
//! provides independent brute-force validators ([`oracle`]).
//!
//! Conventions: quadratures `(X_M, P_M, X_L, P_L)` with `[X, P] = 2i`, so the
//! vacuum covariance is the identity. Numeric modules are generic over
//! [`Scalar`] (`f32` or `f64`); the `*64` aliases below fix `f64`.

pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod heating;
pub mod linalg;
pub mod optimize;
pub mod oracle;
pub mod params;
pub mod phasespace;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Convention statement embedded in every output file.
pub const CONVENTION: &str = "[X,P] = 2i, vacuum variance 1; quadrature order (X_M, P_M, X_L, P_L)";

pub type PhysicalParams64 = params::PhysicalParams<f64>;
pub type DerivedQuantities64 = params::DerivedQuantities<f64>;
pub type PulsePlan64 = params::PulsePlan<f64>;
pub type ProtocolMap64 = gaussian::ProtocolMap<f64>;
pub type GaussianState64 = gaussian::GaussianState<f64>;
pub type ModeState64 = gaussian::ModeState<f64>;
pub type StateSpec64 = phasespace::StateSpec<f64>;
pub type CharacteristicFunction64 = phasespace::CharacteristicFunction<f64>;
pub type WignerGrid64 = phasespace::WignerGrid<f64>;
pub type HeatingParams64 = heating::HeatingParams<f64>;

pub type ProtocolMap32 = gaussian::ProtocolMap<f32>;
pub type GaussianState32 = gaussian::GaussianState<f32>;
pub type WignerGrid32 = phasespace::WignerGrid<f32>;
