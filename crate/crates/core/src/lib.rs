//! Rydberg molecular dressing of ground-state atoms: pair potentials,
//! dressed interactions, open-system dynamics and spin-echo squeezing.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the common `f64` instantiation.

pub mod config;
pub mod dressing;
pub mod error;
pub mod linalg;
pub mod lindblad;
pub mod meanfield_nh;
pub mod pair_potential;
pub mod real;
pub mod spin;
pub mod squeezing;
pub mod validation;

pub use error::{Error, Result};
pub use real::Real;

pub type DressingParams = dressing::DressingParams<f64>;
pub type MolecularPotential = pair_potential::MolecularPotential<f64>;
pub type SpinChainModel = lindblad::SpinChainModel<f64>;
pub type DensityState = lindblad::DensityState<f64>;
pub type SpinMoments = spin::SpinMoments<f64>;
pub type SqueezingResult = squeezing::SqueezingResult<f64>;
pub type EchoProtocol = squeezing::EchoProtocol<f64>;
