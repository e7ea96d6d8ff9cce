//! Bremsstrahlung of a probe deflected by a bare nuclear charge, to first
//! order in the Coulomb deflection.
//!
//! The beam-nucleus separation defines the `+x` axis; emission azimuths are
//! measured from it.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::numerics::constants::{ALPHA_FS, C_NM_S, HBAR_EV_S};
use crate::numerics::{bessel_k01, gauss_legendre, KahanSum};
use crate::probe::Probe;

/// Argument and field vector of the first-order bremsstrahlung amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BremsKernel {
    /// `(1 - beta cos(theta)) omega R / v`.
    pub zeta: f64,
    /// `F = K1(zeta) R_hat + (i / gamma^2) K0(zeta) z_hat`.
    pub f_vec: [Complex64; 3],
    pub beta: f64,
}

impl BremsKernel {
    pub fn new(probe: &Probe, r_vec: [f64; 2], theta: f64, omega: f64) -> Result<Self> {
        let r = r_vec[0].hypot(r_vec[1]);
        if !(r > 0.0 && r.is_finite()) {
            return domain(format!("beam-nucleus distance must be > 0, got {r}"));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("omega must be > 0, got {omega}"));
        }
        let beta = probe.beta();
        let zeta = doppler_factor(beta, theta) * omega * r / probe.speed();
        let (k0, k1) = bessel_k01(zeta)?;
        let g2 = probe.gamma().powi(2);
        Ok(Self {
            zeta,
            f_vec: [
                Complex64::new(k1 * r_vec[0] / r, 0.0),
                Complex64::new(k1 * r_vec[1] / r, 0.0),
                Complex64::new(0.0, k0 / g2),
            ],
            beta,
        })
    }

    /// `|(1 - beta cos(theta)) rhat x F + beta (rhat x z)(rhat . F)|^2`.
    pub fn polarization_norm_sqr(&self, rhat: [f64; 3]) -> f64 {
        let f = &self.f_vec;
        let dop = 1.0 - self.beta * rhat[2];
        let rxf = [
            f[2] * rhat[1] - f[1] * rhat[2],
            f[0] * rhat[2] - f[2] * rhat[0],
            f[1] * rhat[0] - f[0] * rhat[1],
        ];
        let rxz = [rhat[1], -rhat[0], 0.0];
        let rdotf = f[0] * rhat[0] + f[1] * rhat[1] + f[2] * rhat[2];
        (0..3)
            .map(|k| (rxf[k] * dop + rdotf * (self.beta * rxz[k])).norm_sqr())
            .sum()
    }
}

/// `1 - beta cos(theta)`.
pub fn doppler_factor(beta: f64, theta: f64) -> f64 {
    1.0 - beta * theta.cos()
}

/// `alpha^3 Z^4 Zn^2 hbar^2 omega / (pi^2 M^2 gamma^2 v^4)`, in seconds.
fn prefactor(probe: &Probe, z_nucleus: u32, omega: f64) -> f64 {
    let z2 = (probe.z_charge() as f64).powi(2);
    let zn = z_nucleus as f64;
    // hbar / M in nm^2 / s
    let hbar_over_m = HBAR_EV_S * C_NM_S * C_NM_S / probe.rest_energy_ev();
    let v2 = probe.speed().powi(2);
    ALPHA_FS.powi(3) * z2 * z2 * zn * zn * hbar_over_m * hbar_over_m * omega
        / (PI * PI * probe.gamma().powi(2) * v2 * v2)
}

fn rhat(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Emission probability per steradian and per unit angular frequency (s),
/// for a nucleus of charge `z_nucleus` at transverse distance `r_perp_nm`.
pub fn br_density(probe: &Probe, z_nucleus: u32, r_perp_nm: f64, theta: f64, phi: f64, omega: f64) -> Result<f64> {
    if !(r_perp_nm > 0.0) {
        return domain(format!("r_perp must be > 0, got {r_perp_nm}"));
    }
    br_density_oriented(probe, z_nucleus, [r_perp_nm, 0.0], theta, phi, omega)
}

/// As [`br_density`] with an arbitrary in-plane separation vector.
pub fn br_density_oriented(
    probe: &Probe,
    z_nucleus: u32,
    r_vec_nm: [f64; 2],
    theta: f64,
    phi: f64,
    omega: f64,
) -> Result<f64> {
    let kernel = BremsKernel::new(probe, r_vec_nm, theta, omega)?;
    Ok(prefactor(probe, z_nucleus, omega) * kernel.polarization_norm_sqr(rhat(theta, phi)))
}

const ANGULAR_REL_TOL: f64 = 1e-4;
const ANGULAR_START_NODES: usize = 64;
const ANGULAR_MAX_DOUBLINGS: usize = 5;

/// Gauss-Legendre in `cos(theta)` times trapezoid in `phi`.
fn solid_angle_pass<F>(f: &F, n: usize) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let rows: Vec<f64> = gauss_legendre(n)
        .par_iter()
        .map(|&(x, w)| {
            let theta = x.clamp(-1.0, 1.0).acos();
            let s: KahanSum = (0..n).map(|k| f(theta, TAU * k as f64 / n as f64)).collect();
            w * s.value() * TAU / n as f64
        })
        .collect();
    rows.into_iter().collect::<KahanSum>().value()
}

fn solid_angle_integral<F>(f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let mut n = ANGULAR_START_NODES;
    let mut prev = solid_angle_pass(&f, n);
    for _ in 0..ANGULAR_MAX_DOUBLINGS {
        n *= 2;
        let next = solid_angle_pass(&f, n);
        if (next - prev).abs() <= ANGULAR_REL_TOL * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    let last = solid_angle_pass(&f, n);
    Err(Error::Convergence {
        iterations: ANGULAR_MAX_DOUBLINGS,
        last,
        previous: prev,
    })
}

/// Angle-integrated emission probability per unit angular frequency (s).
pub fn br_spectral_density(probe: &Probe, z_nucleus: u32, r_perp_nm: f64, omega: f64) -> Result<f64> {
    // validate once so the integrand can be infallible
    BremsKernel::new(probe, [r_perp_nm, 0.0], 0.0, omega)?;
    solid_angle_integral(|t, p| br_density(probe, z_nucleus, r_perp_nm, t, p, omega).unwrap_or(0.0))
}

/// Angle-integrated emission probability per eV of photon energy.
pub fn br_spectral_density_per_ev(probe: &Probe, z_nucleus: u32, r_perp_nm: f64, energy_ev: f64) -> Result<f64> {
    Ok(br_spectral_density(probe, z_nucleus, r_perp_nm, energy_ev / HBAR_EV_S)? / HBAR_EV_S)
}

/// Probability of emitting a photon within `window_ev` centered on
/// `center_ev`, over all directions.
pub fn br_window_yield(probe: &Probe, z_nucleus: u32, r_perp_nm: f64, center_ev: f64, window_ev: f64) -> Result<f64> {
    if !(window_ev > 0.0 && window_ev.is_finite()) {
        return domain(format!("window must be > 0, got {window_ev}"));
    }
    if !(center_ev - 0.5 * window_ev > 0.0) {
        return domain("window must lie at positive photon energies");
    }
    let half = 0.5 * window_ev / HBAR_EV_S;
    let mid = center_ev / HBAR_EV_S;
    let mut acc = KahanSum::new();
    for (x, w) in gauss_legendre(3) {
        acc.add(w * half * br_spectral_density(probe, z_nucleus, r_perp_nm, mid + half * x)?);
    }
    Ok(acc.value())
}

/// Time scale of the prompt bremsstrahlung flash, `R / (v gamma)`, s.
pub fn br_duration(probe: &Probe, r_perp_nm: f64) -> f64 {
    r_perp_nm / (probe.speed() * probe.gamma())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::numerics::constants::{ELECTRON_MASS_EV, PROTON_MASS_EV};

    const E_FE_EV: f64 = 14412.9;

    fn omega_fe() -> f64 {
        E_FE_EV / HBAR_EV_S
    }

    #[test]
    fn agrees_with_time_integral_up_to_doppler_factor() {
        // First-order time integral of the radiation formula evaluated
        // independently; the closed form differs from it by (1 - beta cos)^2.
        let cases = [
            (1, 26, ELECTRON_MASS_EV, 0.9, 0.001, 0.7, 0.3, omega_fe(), 1.1369223503367313e-25),
            (1, 26, ELECTRON_MASS_EV, 0.5, 0.002, 2.0, 1.2, omega_fe(), 7.5908759418780322e-26),
            (2, 26, PROTON_MASS_EV, 0.8, 0.0005, 1.3, -0.4, omega_fe() / 2.0, 3.3914831360999682e-30),
        ];
        for (z, zn, m, beta, r, t, p, w, reference) in cases {
            let probe = Probe::new(z, m, beta).unwrap();
            let d = br_density(&probe, zn, r, t, p, w).unwrap();
            let corrected = d / doppler_factor(beta, t).powi(2);
            assert!((corrected / reference - 1.0).abs() < 1e-9, "{corrected} vs {reference}");
        }
    }

    #[test]
    fn mass_scaling() {
        let e = Probe::electron(0.9).unwrap();
        let p = Probe::proton(0.9).unwrap();
        let ratio = br_density(&p, 26, 0.001, 0.4, 0.2, omega_fe()).unwrap()
            / br_density(&e, 26, 0.001, 0.4, 0.2, omega_fe()).unwrap();
        let expect = (ELECTRON_MASS_EV / PROTON_MASS_EV).powi(2);
        assert!((ratio / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn charge_scaling() {
        let one = Probe::new(1, 1e9, 0.8).unwrap();
        let two = Probe::new(2, 1e9, 0.8).unwrap();
        let a = br_density(&one, 26, 0.001, 1.0, 0.5, omega_fe()).unwrap();
        let b = br_density(&two, 26, 0.001, 1.0, 0.5, omega_fe()).unwrap();
        assert!((b / a - 16.0).abs() < 1e-12);
        let c = br_density(&one, 13, 0.001, 1.0, 0.5, omega_fe()).unwrap();
        assert!((a / c - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_invariance() {
        let e = Probe::electron(0.9).unwrap();
        let rot = 1.234f64;
        for &(t, p) in &[(0.3, 0.1), (1.7, 2.5)] {
            let a = br_density_oriented(&e, 26, [0.001, 0.0], t, p, omega_fe()).unwrap();
            let b = br_density_oriented(&e, 26, [0.001 * rot.cos(), 0.001 * rot.sin()], t, p + rot, omega_fe()).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exponential_suppression_far_away() {
        let e = Probe::electron(0.5).unwrap();
        let near = br_density(&e, 26, 0.0005, 1.0, 0.0, omega_fe()).unwrap();
        let far = br_density(&e, 26, 0.5, 1.0, 0.0, omega_fe()).unwrap();
        assert!(far < 1e-20 * near);
        assert_eq!(br_density(&e, 26, 50.0, 1.0, 0.0, omega_fe()).unwrap(), 0.0);
    }

    #[test]
    fn longitudinal_component_fades_with_gamma() {
        for beta in [0.9, 0.99, 0.999] {
            let probe = Probe::electron(beta).unwrap();
            let k = BremsKernel::new(&probe, [0.001, 0.0], 0.5, omega_fe()).unwrap();
            let (k0, _) = bessel_k01(k.zeta).unwrap();
            assert!((k.f_vec[2].im * probe.gamma().powi(2) - k0).abs() < 1e-12 * k0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = Probe::electron(0.9).unwrap();
        assert!(br_density(&e, 26, 0.0, 1.0, 0.0, omega_fe()).is_err());
        assert!(br_density(&e, 26, -1.0, 1.0, 0.0, omega_fe()).is_err());
        assert!(br_density(&e, 26, 0.001, 1.0, 0.0, 0.0).is_err());
        assert!(br_window_yield(&e, 26, 0.001, E_FE_EV, 0.0).is_err());
    }

    #[test]
    fn window_yield_is_linear_for_narrow_windows() {
        let e = Probe::electron(0.9).unwrap();
        let a = br_window_yield(&e, 26, 0.001, E_FE_EV, 1.0).unwrap();
        let b = br_window_yield(&e, 26, 0.001, E_FE_EV, 0.5).unwrap();
        assert!((a / b - 2.0).abs() < 1e-4);
        let dens = br_spectral_density_per_ev(&e, 26, 0.001, E_FE_EV).unwrap();
        assert!((a / dens - 1.0).abs() < 1e-4);
    }

    #[test]
    fn duration_scale() {
        let e = Probe::electron(0.9).unwrap();
        let tau = br_duration(&e, 0.001);
        assert!(tau > 1e-21 && tau < 1e-20);
    }
}
