//! Special functions, quadrature and constants shared by the physics modules.

pub mod bessel;
pub mod constants;
pub mod quadrature;

pub use bessel::{bessel_k0, bessel_k01, bessel_k1};
pub use constants::PhysicalConstants;
pub use quadrature::{
    gauss_legendre, integrate_adaptive, integrate_periodic, integrate_periodic_with, KahanSum,
    PeriodicOptions,
};
