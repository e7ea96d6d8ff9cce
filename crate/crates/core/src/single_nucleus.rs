//! Observables of one excited nucleus: the coherent photon yield, the
//! emitted line shape, its temporal decay, and the incoherent angular
//! distribution of a set of independent nuclei.
//!
//! Line shape and yield are weighted by the coherent radiative rate through
//! `kappa_r^2 / kappa`, while the population (and hence the photon arrival
//! time) decays with the total rate `kappa`. Mixing the two up is an easy
//! mistake, so both appear explicitly below.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::nuclide::{coherent_fraction, radiative_rate, surd::ratio_to_f64, NuclideRecord};
use crate::numerics::bessel_k1;
use crate::numerics::constants::{ALPHA_FS, HBAR_EV_S};
use crate::probe::Probe;

/// Dimensionless spectral weight `kappa_r^2 / (omega_0 kappa)`.
pub fn spectral_weight(rec: &NuclideRecord) -> Result<f64> {
    let kr = radiative_rate(rec)?;
    Ok(kr * kr / (rec.omega0() * rec.kappa()))
}

/// Charge and velocity factor `Z^2 alpha / (beta gamma)^2`.
pub(crate) fn kinematic_factor(probe: &Probe) -> f64 {
    let bg = probe.beta() * probe.gamma();
    let z = probe.z_charge() as f64;
    z * z * ALPHA_FS / (bg * bg)
}

/// Probability that a probe passing at transverse distance `r_perp` (nm)
/// from a single nucleus makes it emit one coherent photon.
///
/// Narrow-line limit: `omega ~ omega_0` everywhere except in the resonance
/// denominator.
pub fn coherent_yield(probe: &Probe, rec: &NuclideRecord, r_perp: f64) -> Result<f64> {
    if !(r_perp > 0.0) {
        return domain(format!("r_perp must be > 0, got {r_perp}"));
    }
    let k1 = bessel_k1(r_perp / probe.field_range(rec.omega0()))?;
    Ok(3.0 * kinematic_factor(probe) * spectral_weight(rec)? * k1 * k1)
}

/// Unit-normalized Lorentzian line of width `hbar kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionSpectrum {
    pub center_ev: f64,
    pub fwhm_ev: f64,
}

impl EmissionSpectrum {
    /// Density per eV at photon energy `energy_ev`.
    pub fn density(&self, energy_ev: f64) -> f64 {
        self.density_at_detuning(energy_ev - self.center_ev)
    }

    /// Density per eV at `delta_ev` from line center. Prefer this near the
    /// line: the width is far below the resolution of absolute keV energies.
    pub fn density_at_detuning(&self, delta_ev: f64) -> f64 {
        let half = 0.5 * self.fwhm_ev;
        half / (PI * (delta_ev * delta_ev + half * half))
    }

    pub fn peak_density(&self) -> f64 {
        self.density_at_detuning(0.0)
    }

    /// Fraction of the line within `±half_window_ev` of the center.
    pub fn window_fraction(&self, half_window_ev: f64) -> f64 {
        2.0 / PI * (half_window_ev / (0.5 * self.fwhm_ev)).atan()
    }
}

pub fn spectral_profile(rec: &NuclideRecord) -> EmissionSpectrum {
    EmissionSpectrum {
        center_ev: rec.e0_kev * 1e3,
        fwhm_ev: HBAR_EV_S * rec.kappa(),
    }
}

/// Photon arrival-time distribution after excitation at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProfile {
    /// Total decay rate `kappa`, 1/s.
    pub rate_s: f64,
}

impl DecayProfile {
    /// `kappa exp(-kappa t)` for `t >= 0`, zero before.
    pub fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.rate_s * (-self.rate_s * t).exp()
        }
    }

    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            1.0
        } else {
            (-self.rate_s * t).exp()
        }
    }
}

pub fn decay_profile(rec: &NuclideRecord) -> DecayProfile {
    DecayProfile {
        rate_s: rec.kappa(),
    }
}

/// Angular density (per sr) of incoherent photons from nuclei at transverse
/// positions `nuclei` (nm) excited by a probe crossing at `r_p`.
///
/// Each nucleus radiates like the average of two magnetic dipoles, one along
/// `R_j - R_p` and one along the beam axis, weighted by `(1/f - 1)` relative
/// to its coherent yield.
pub fn incoherent_angular(
    probe: &Probe,
    rec: &NuclideRecord,
    nuclei: &[[f64; 2]],
    r_p: [f64; 2],
    theta: f64,
    phi: f64,
) -> Result<f64> {
    let f = ratio_to_f64(&coherent_fraction(rec.jg2, rec.je2)?);
    incoherent_angular_with_fraction(probe, rec, nuclei, r_p, theta, phi, f)
}

/// As [`incoherent_angular`] with an explicit coherent fraction `f`.
pub fn incoherent_angular_with_fraction(
    probe: &Probe,
    rec: &NuclideRecord,
    nuclei: &[[f64; 2]],
    r_p: [f64; 2],
    theta: f64,
    phi: f64,
    f: f64,
) -> Result<f64> {
    if !(f > 0.0 && f <= 1.0) {
        return domain(format!("coherent fraction must be in (0, 1], got {f}"));
    }
    let sin2t = theta.sin().powi(2);
    let mut total = 0.0;
    for nucleus in nuclei {
        let dx = nucleus[0] - r_p[0];
        let dy = nucleus[1] - r_p[1];
        let r = dx.hypot(dy);
        if r == 0.0 {
            return domain("nucleus coincides with the impact point");
        }
        let phi_jp = dy.atan2(dx);
        let profile = 1.0 + sin2t * (phi - phi_jp).sin().powi(2);
        total += profile * coherent_yield(probe, rec, r)?;
    }
    Ok(3.0 / (16.0 * PI) * (1.0 / f - 1.0) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, integrate_periodic};

    #[test]
    fn reference_yield_electron_fe57() {
        // 30-digit evaluation of the closed form with the same constants.
        let p = Probe::electron(0.9).unwrap();
        let y = coherent_yield(&p, &NuclideRecord::fe57(), 0.001).unwrap();
        assert!((y / 6.407_453_545_583_324e-15 - 1.0).abs() < 1e-9, "{y:e}");
        let w = spectral_weight(&NuclideRecord::fe57()).unwrap();
        assert!((w / 1.569_215_792_080_118e-15 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scaling_laws() {
        let fe = NuclideRecord::fe57();
        let p = Probe::new(1, 1e9, 0.9).unwrap();
        let p2 = Probe::new(2, 1e9, 0.9).unwrap();
        let a = coherent_yield(&p, &fe, 0.01).unwrap();
        assert!((coherent_yield(&p2, &fe, 0.01).unwrap() / a - 4.0).abs() < 1e-12);
        let r = 1e-7;
        let ratio = coherent_yield(&p, &fe, r).unwrap() / coherent_yield(&p, &fe, 2.0 * r).unwrap();
        assert!((ratio - 4.0).abs() < 1e-6);
        assert!(coherent_yield(&p, &fe, 0.0).is_err());
    }

    #[test]
    fn yield_increases_with_velocity() {
        let fe = NuclideRecord::fe57();
        let mut prev = 0.0;
        for i in 0..=79 {
            let beta = 0.2 + 0.01 * i as f64;
            let y = coherent_yield(&Probe::electron(beta).unwrap(), &fe, 0.001).unwrap();
            assert!(y > prev, "beta={beta}");
            prev = y;
        }
    }

    #[test]
    fn exponential_tail() {
        let fe = NuclideRecord::fe57();
        let p = Probe::electron(0.9).unwrap();
        let range = p.field_range(fe.omega0());
        // y * r^k still collapses for any fixed power
        let y1 = coherent_yield(&p, &fe, 20.0 * range).unwrap() * 20f64.powi(8);
        let y2 = coherent_yield(&p, &fe, 40.0 * range).unwrap() * 40f64.powi(8);
        assert!(y2 < 1e-6 * y1);
    }

    #[test]
    fn line_shape() {
        let s = spectral_profile(&NuclideRecord::fe57());
        assert!((s.fwhm_ev / 4.635_295_471_126_76e-9 - 1.0).abs() < 1e-12);
        let half = 0.5 * s.fwhm_ev;
        assert!((s.density_at_detuning(half) / s.peak_density() - 0.5).abs() < 1e-12);
        assert_eq!(s.density_at_detuning(3.0 * half), s.density_at_detuning(-3.0 * half));
        assert!((s.density(s.center_ev + half) / s.peak_density() - 0.5).abs() < 1e-2);
        let w = 1e3 * s.fwhm_ev;
        let v = integrate_adaptive(|d| s.density_at_detuning(d), -w, w, 1e-12).unwrap();
        assert!((v - s.window_fraction(w)).abs() < 1e-10);
    }

    #[test]
    fn decay_one_over_e() {
        let fe = decay_profile(&NuclideRecord::fe57());
        assert!((fe.survival(142e-9) - (-1f64).exp()).abs() < 1e-12);
        assert_eq!(fe.survival(0.0), 1.0);
        assert!((fe.density(142e-9) - fe.rate_s / std::f64::consts::E).abs() < 1e-6);
        let dy = decay_profile(&NuclideRecord::dy161());
        assert!((dy.survival(1.2e-9) - (-1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn incoherent_integrates_to_rescaled_coherent() {
        let fe = NuclideRecord::fe57();
        let p = Probe::electron(0.8).unwrap();
        let nuclei = [[0.01, 0.0], [-0.004, 0.02], [0.03, -0.01]];
        let rp = [0.001, 0.002];
        let total = integrate_adaptive(
            |t| {
                t.sin()
                    * integrate_periodic(|ph| incoherent_angular(&p, &fe, &nuclei, rp, t, ph).unwrap())
                        .unwrap()
            },
            0.0,
            PI,
            1e-12,
        )
        .unwrap();
        let coh: f64 = nuclei
            .iter()
            .map(|n| coherent_yield(&p, &fe, (n[0] - rp[0]).hypot(n[1] - rp[1])).unwrap())
            .sum();
        let f = 2.0 / 3.0;
        assert!((total / ((1.0 / f - 1.0) * coh) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn incoherent_pattern_properties() {
        let fe = NuclideRecord::fe57();
        let p = Probe::electron(0.8).unwrap();
        let nuclei = [[0.01, 0.005]];
        let phi_jp = 0.005f64.atan2(0.01);
        let t = 1.1;
        for &d in &[0.2, 0.9, 2.5] {
            let a = incoherent_angular(&p, &fe, &nuclei, [0.0, 0.0], t, phi_jp + d).unwrap();
            let b = incoherent_angular(&p, &fe, &nuclei, [0.0, 0.0], t, phi_jp + d + PI).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
        let y = coherent_yield(&p, &fe, 0.01f64.hypot(0.005)).unwrap();
        let mean = 0.5 * y / (4.0 * PI);
        for i in 0..50 {
            let v = incoherent_angular(&p, &fe, &nuclei, [0.0, 0.0], 0.07 * i as f64, 0.3 * i as f64).unwrap();
            assert!(v >= 0.0 && v <= 2.0 * mean);
        }
        assert!(incoherent_angular(&p, &fe, &nuclei, [0.01, 0.005], 0.1, 0.1).is_err());
    }

    #[test]
    fn fully_coherent_limit() {
        let fe = NuclideRecord::fe57();
        let p = Probe::electron(0.8).unwrap();
        let nuclei = [[0.01, 0.0], [0.0, 0.02]];
        for i in 0..10 {
            let v = incoherent_angular_with_fraction(&p, &fe, &nuclei, [0.0, 0.0], 0.3 * i as f64, 0.5 * i as f64, 1.0)
                .unwrap();
            assert_eq!(v, 0.0);
        }
    }
}
