//! CODATA-2018 constants in the crate's internal unit system.
//!
//! Energies are in eV, lengths in nm, times in s. Angular frequencies follow
//! from energies through `omega = E / hbar`. Every other module takes its
//! constants from here.

/// Reduced Planck constant, eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Speed of light, m/s (exact).
pub const C_M_S: f64 = 299_792_458.0;
/// Speed of light, nm/s.
pub const C_NM_S: f64 = C_M_S * 1.0e9;
/// Fine-structure constant.
pub const ALPHA_FS: f64 = 7.297_352_569_3e-3;
/// Electron rest energy, eV.
pub const ELECTRON_MASS_EV: f64 = 0.510_998_950_00e6;
/// Proton rest energy, eV.
pub const PROTON_MASS_EV: f64 = 938.272_088_16e6;
/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `hbar * c` in eV·nm.
pub const HBAR_C_EV_NM: f64 = HBAR_EV_S * C_NM_S;
/// Gaussian `e^2 = alpha * hbar * c`, eV·nm.
pub const E2_EV_NM: f64 = ALPHA_FS * HBAR_C_EV_NM;

/// The constant set as a value, for callers that want to pass it around or
/// print it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar_ev_s: f64,
    pub c_m_s: f64,
    pub alpha_fs: f64,
    pub e2_ev_nm: f64,
    pub electron_mass_ev: f64,
    pub proton_mass_ev: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: Self = Self {
        hbar_ev_s: HBAR_EV_S,
        c_m_s: C_M_S,
        alpha_fs: ALPHA_FS,
        e2_ev_nm: E2_EV_NM,
        electron_mass_ev: ELECTRON_MASS_EV,
        proton_mass_ev: PROTON_MASS_EV,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Angular frequency (rad/s) of a photon of energy `energy_ev`.
#[inline]
pub fn omega_from_ev(energy_ev: f64) -> f64 {
    energy_ev / HBAR_EV_S
}

/// Photon energy (eV) of angular frequency `omega`.
#[inline]
pub fn ev_from_omega(omega: f64) -> f64 {
    omega * HBAR_EV_S
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fine_structure_matches_inverse() {
        assert!((ALPHA_FS - 1.0 / 137.035_999).abs() < 1e-6);
    }

    #[test]
    fn coulomb_constant_is_consistent() {
        let c = PhysicalConstants::default();
        let e2 = c.alpha_fs * c.hbar_ev_s * c.c_m_s * 1e9;
        assert!((e2 - c.e2_ev_nm).abs() < 1e-15 * e2);
        assert!((c.e2_ev_nm - 1.439_964_5).abs() < 1e-6);
    }

    #[test]
    fn energy_frequency_round_trip() {
        let w = omega_from_ev(14_412.9);
        assert!((ev_from_omega(w) - 14_412.9).abs() < 1e-9);
    }
}
