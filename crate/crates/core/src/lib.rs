//! Fidelity limits for phase-insensitive tasks on Gaussian-weighted coherent
//! state families.
//!
//! The library answers one question in several independent ways: given inputs
//! `|sqrt(N) alpha>` drawn with the Gaussian prior `p_lambda(alpha) =
//! (lambda/pi) exp(-lambda |alpha|^2)`, how well can any channel produce the
//! target `|sqrt(eta) alpha>` (or its conjugate), on average?
//!
//! * [`gaussian`] — 4x4 covariance algebra for the two-mode witness states:
//!   symplectic eigenvalues, squeezer/beamsplitter diagonalizers, and the
//!   closed-form max eigenvalue of a Gaussian mixture operator.
//! * [`fock`] — a truncated Fock-space oracle: coherent/squeezed/thermal
//!   constructions, the quadrature-built mixture operator, dense Hermitian
//!   eigensolves, and an exact Kraus form of the Gaussian amplifier.
//! * [`channels`] — concrete channel models and their average fidelities by
//!   closed form, by radial quadrature, and by seeded Monte Carlo.
//! * [`limits`] — the quantum bounds themselves (amplification, conjugation,
//!   attenuation), the witness-operator chain they come from, and numeric
//!   attainability checks.
//!
//! Everything is generic over the scalar via [`scalar::Real`] (any
//! `num-traits` float works; `f64` is the supported precision for the pinned
//! tolerances). The `*64` aliases at the crate root are the concrete API most
//! callers want.

pub mod channels;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod limits;
pub mod scalar;

mod linalg;
mod optimize;
mod quadrature;

pub use error::{Error, Result};
pub use scalar::Real;

/// Default Fock-space truncation dimension per mode.
pub const DEFAULT_FOCK_DIM: usize = 60;
/// Default tail/deficit budget for state constructions.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Default radial node count for Gauss-Laguerre quadrature.
pub const DEFAULT_RADIAL_NODES: usize = 80;

pub type CovarianceMatrix64 = gaussian::CovarianceMatrix<f64>;
pub type SymplecticForm64 = gaussian::SymplecticForm<f64>;
pub type SymplecticMatrix64 = gaussian::SymplecticMatrix<f64>;
pub type ThermalDecomposition64 = gaussian::ThermalDecomposition<f64>;
pub type GaussianMixtureSpec64 = gaussian::GaussianMixtureSpec<f64>;
pub type TruncationSpec64 = fock::TruncationSpec<f64>;
pub type FockVector64 = fock::FockVector<f64>;
pub type FockOperator64 = fock::FockOperator<f64>;
pub type ChannelSpec64 = channels::ChannelSpec<f64>;
pub type TaskSpec64 = channels::TaskSpec<f64>;
pub type BoundResult64 = limits::BoundResult<f64>;
pub type WitnessParams64 = limits::WitnessParams<f64>;
