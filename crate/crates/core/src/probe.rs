//! Probe kinematics, the evanescent magnetic field of a uniformly moving
//! charge, and the Coulomb-limited minimum impact parameter.

use crate::error::{domain, Result};
use crate::numerics::bessel_k1;
use crate::numerics::constants::{C_NM_S, E2_EV_NM, ELECTRON_MASS_EV, PROTON_MASS_EV};

/// A point charge `Z e` moving with constant speed along `+z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    z_charge: i32,
    rest_energy_ev: f64,
    beta: f64,
}

impl Probe {
    pub fn new(z_charge: i32, rest_energy_ev: f64, beta: f64) -> Result<Self> {
        if z_charge == 0 {
            return domain("probe charge number must be nonzero");
        }
        if !(rest_energy_ev > 0.0 && rest_energy_ev.is_finite()) {
            return domain(format!("rest energy must be > 0, got {rest_energy_ev}"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return domain(format!("beta must be in (0, 1), got {beta}"));
        }
        Ok(Self {
            z_charge,
            rest_energy_ev,
            beta,
        })
    }

    pub fn electron(beta: f64) -> Result<Self> {
        Self::new(-1, ELECTRON_MASS_EV, beta)
    }

    pub fn proton(beta: f64) -> Result<Self> {
        Self::new(1, PROTON_MASS_EV, beta)
    }

    pub fn from_kinetic_energy(z_charge: i32, rest_energy_ev: f64, kinetic_ev: f64) -> Result<Self> {
        Self::new(z_charge, rest_energy_ev, beta_from_kinetic(kinetic_ev, rest_energy_ev)?)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.z_charge, self.rest_energy_ev, beta)
    }

    pub fn z_charge(&self) -> i32 {
        self.z_charge
    }

    pub fn rest_energy_ev(&self) -> f64 {
        self.rest_energy_ev
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.beta * self.beta).sqrt()
    }

    /// Speed, nm/s.
    pub fn speed(&self) -> f64 {
        self.beta * C_NM_S
    }

    pub fn kinetic_energy_ev(&self) -> f64 {
        (self.gamma() - 1.0) * self.rest_energy_ev
    }

    /// Transverse decay length `v gamma / omega` of the evanescent field, nm.
    pub fn field_range(&self, omega: f64) -> f64 {
        self.speed() * self.gamma() / omega
    }
}

pub fn lorentz_gamma(beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return domain(format!("beta must be in [0, 1), got {beta}"));
    }
    Ok(1.0 / (1.0 - beta * beta).sqrt())
}

pub fn beta_from_kinetic(kinetic_ev: f64, rest_energy_ev: f64) -> Result<f64> {
    if !(kinetic_ev > 0.0) || !(rest_energy_ev > 0.0) {
        return domain("kinetic and rest energies must be > 0");
    }
    let gamma = 1.0 + kinetic_ev / rest_energy_ev;
    Ok((1.0 - 1.0 / (gamma * gamma)).sqrt())
}

pub fn kinetic_from_beta(beta: f64, rest_energy_ev: f64) -> Result<f64> {
    Ok((lorentz_gamma(beta)? - 1.0) * rest_energy_ev)
}

/// Impact point of the trajectory in the plane normal to the velocity, nm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransverseGeometry {
    pub r_p: [f64; 2],
}

/// Prefactor `2 e Z omega / (v c gamma)` of the field, in Gaussian units
/// expressed as sqrt(eV/nm^3) (so that `H^2 / 8 pi` is an energy density in
/// eV/nm^3).
pub fn field_prefactor(probe: &Probe, omega: f64) -> f64 {
    let e = E2_EV_NM.sqrt();
    2.0 * e * probe.z_charge() as f64 * omega / (probe.speed() * C_NM_S * probe.gamma())
}

/// Bessel kernel `K1(omega r / (v gamma))` of the field.
pub fn field_kernel(probe: &Probe, r_perp: f64, omega: f64) -> Result<f64> {
    bessel_k1(r_perp / probe.field_range(omega))
}

/// `|H_ext|` at transverse distance `r_perp` (nm) and frequency `omega`.
/// The field is azimuthal; the `exp(i omega z / v)` phase is left to callers.
pub fn evanescent_field_magnitude(probe: &Probe, r_perp: f64, omega: f64) -> Result<f64> {
    if !(r_perp > 0.0) {
        return domain(format!("r_perp must be > 0 (clamp to R_min first), got {r_perp}"));
    }
    if !(omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    Ok(field_prefactor(probe, omega).abs() * field_kernel(probe, r_perp, omega)?)
}

/// Smallest admissible clamped `R_min`, nm.
pub const R_MIN_FLOOR_NM: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMinEstimate {
    pub r_min_nm: f64,
    /// Transverse energy `theta^2 E_0`, eV.
    pub transverse_energy_ev: f64,
    /// The closed form fell below [`R_MIN_FLOOR_NM`] and was clamped.
    pub clamped: bool,
}

/// Minimum beam-row distance from equating the transverse kinetic energy
/// `theta_inc^2 E_0` with the row-averaged Coulomb barrier
/// `(2 Z_row e^2 / a) ln(a / 2R)`. Atomic screening is ignored.
pub fn estimate_r_min(theta_inc: f64, e_kinetic_ev: f64, z_row: u32, a_nm: f64) -> Result<RMinEstimate> {
    if !(theta_inc > 0.0 && theta_inc < 0.2) {
        return domain(format!("theta_inc must be in (0, 0.2) rad, got {theta_inc}"));
    }
    if !(e_kinetic_ev > 0.0) || !(a_nm > 0.0) || z_row == 0 {
        return domain("kinetic energy, lattice constant and row charge must be positive");
    }
    let e_perp = theta_inc * theta_inc * e_kinetic_ev;
    let r = 0.5 * a_nm * (-e_perp * a_nm / (2.0 * z_row as f64 * E2_EV_NM)).exp();
    let clamped = r < R_MIN_FLOOR_NM;
    Ok(RMinEstimate {
        r_min_nm: r.max(R_MIN_FLOOR_NM),
        transverse_energy_ev: e_perp,
        clamped,
    })
}
