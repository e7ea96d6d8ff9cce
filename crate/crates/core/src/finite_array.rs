//! Direct real-space sums over a finite set of nuclei: the far-field
//! amplitude, the coherent angular emission density, and the linear-array
//! pattern that exhibits the Smith-Purcell cones.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::nuclide::NuclideRecord;
use crate::numerics::{bessel_k1, KahanSum};
use crate::probe::Probe;
use crate::single_nucleus::{kinematic_factor, spectral_weight};

/// Positions of identical nuclei, nm. The probe moves along `+z`.
#[derive(Debug, Clone, PartialEq)]
pub struct NucleusSet {
    positions: Vec<[f64; 3]>,
}

impl NucleusSet {
    pub fn new(positions: Vec<[f64; 3]>) -> Result<Self> {
        if positions.is_empty() {
            return domain("nucleus set is empty");
        }
        let mut seen = HashSet::with_capacity(positions.len());
        for p in &positions {
            if !p.iter().all(|c| c.is_finite()) {
                return domain(format!("non-finite nucleus position {p:?}"));
            }
            // +0.0 and -0.0 must compare equal
            let key = p.map(|c| (c + 0.0).to_bits());
            if !seen.insert(key) {
                return domain(format!("duplicate nucleus position {p:?}"));
            }
        }
        Ok(Self { positions })
    }

    /// `n` nuclei along `z` with period `d`, at transverse position `(x, 0)`.
    pub fn linear_chain(n: usize, d: f64, x: f64) -> Result<Self> {
        Self::new((0..n).map(|j| [x, 0.0, j as f64 * d]).collect())
    }

    /// Square patch of `w x w` sites with period `a` in the plane `z = 0`,
    /// centered on the origin.
    pub fn square_patch(w: usize, a: f64) -> Result<Self> {
        let half = (w as f64 - 1.0) / 2.0;
        let mut pos = Vec::with_capacity(w * w);
        for i in 0..w {
            for j in 0..w {
                pos.push([(i as f64 - half) * a, (j as f64 - half) * a, 0.0]);
            }
        }
        Self::new(pos)
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Unit emission direction for polar angle `theta` (from `+z`) and azimuth `phi`.
pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Dimensionless far-field amplitude
/// `g = sum_j K1(w0 |R_j - R_p| / v gamma) exp(i w0 z_j / v - i k0 . r_j) phi_jp`,
/// in Cartesian components.
pub fn far_field_amplitude(
    probe: &Probe,
    rec: &NuclideRecord,
    set: &NucleusSet,
    r_p: [f64; 2],
    theta: f64,
    phi: f64,
) -> Result<[Complex64; 3]> {
    let omega0 = rec.omega0();
    let k0 = rec.k0();
    let range = probe.field_range(omega0);
    let rhat = direction(theta, phi);
    // longitudinal phase per unit z, combined before reduction
    let kz = omega0 / probe.speed() - k0 * rhat[2];
    let kx = k0 * rhat[0];
    let ky = k0 * rhat[1];

    let mut acc = [KahanSum::new(); 4]; // re x, im x, re y, im y
    for p in set.positions() {
        let dx = p[0] - r_p[0];
        let dy = p[1] - r_p[1];
        let r = dx.hypot(dy);
        if r == 0.0 {
            return domain(format!("impact point coincides with nucleus at {p:?}"));
        }
        let k1 = bessel_k1(r / range)?;
        if k1 == 0.0 {
            continue;
        }
        let phase = (kz * p[2] - kx * p[0] - ky * p[1]).rem_euclid(TAU);
        let (s, c) = phase.sin_cos();
        // phi_jp = z x R_jp / |R_jp|
        let ux = -dy / r;
        let uy = dx / r;
        acc[0].add(k1 * c * ux);
        acc[1].add(k1 * s * ux);
        acc[2].add(k1 * c * uy);
        acc[3].add(k1 * s * uy);
    }
    Ok([
        Complex64::new(acc[0].value(), acc[1].value()),
        Complex64::new(acc[2].value(), acc[3].value()),
        Complex64::new(0.0, 0.0),
    ])
}

/// `|rhat x g|^2` for real unit `rhat` and complex `g`.
pub fn transverse_norm_sqr(rhat: [f64; 3], g: &[Complex64; 3]) -> f64 {
    let full: f64 = g.iter().map(|c| c.norm_sqr()).sum();
    let along = g[0] * rhat[0] + g[1] * rhat[1] + g[2] * rhat[2];
    (full - along.norm_sqr()).max(0.0)
}

/// Prefactor `9 Z^2 alpha / (8 pi beta^2 gamma^2) * kappa_r^2 / (omega_0 kappa)`
/// multiplying `|rhat x g|^2`.
pub fn angular_prefactor(probe: &Probe, rec: &NuclideRecord) -> Result<f64> {
    Ok(9.0 / (8.0 * PI) * kinematic_factor(probe) * spectral_weight(rec)?)
}

/// Coherent emission probability per unit solid angle in direction
/// `(theta, phi)`.
pub fn angular_density(
    probe: &Probe,
    rec: &NuclideRecord,
    set: &NucleusSet,
    r_p: [f64; 2],
    theta: f64,
    phi: f64,
) -> Result<f64> {
    let g = far_field_amplitude(probe, rec, set, r_p, theta, phi)?;
    Ok(angular_prefactor(probe, rec)? * transverse_norm_sqr(direction(theta, phi), &g))
}

/// Densities sampled on a `theta x phi` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    /// `values[i][j]` at `(thetas[i], phis[j])`, per sr.
    pub values: Vec<Vec<f64>>,
}

impl AngularGrid {
    pub fn cos_thetas(&self) -> Vec<f64> {
        self.thetas.iter().map(|t| t.cos()).collect()
    }

    /// Values along the first azimuth.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }
}

/// `n` polar angles, increasing, equally spaced in `cos(theta)` from 1 to -1.
pub fn uniform_cos_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| {
            let c = 1.0 - 2.0 * i as f64 / (n - 1) as f64;
            c.clamp(-1.0, 1.0).acos()
        })
        .collect()
}

pub fn sample_grid(
    probe: &Probe,
    rec: &NuclideRecord,
    set: &NucleusSet,
    r_p: [f64; 2],
    thetas: &[f64],
    phis: &[f64],
) -> Result<AngularGrid> {
    for axis in [thetas, phis] {
        if axis.is_empty() || axis.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("angular grid axes must be non-empty and strictly increasing");
        }
    }
    let values = thetas
        .par_iter()
        .map(|&t| {
            phis.iter()
                .map(|&p| angular_density(probe, rec, set, r_p, t, p))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AngularGrid {
        thetas: thetas.to_vec(),
        phis: phis.to_vec(),
        values,
    })
}

/// Emission pattern of `n_nuclei` nuclei spaced `d_nm` along the beam at
/// transverse distance `standoff_nm`, observed in the plane containing the
/// chain and the trajectory (`phi = 0`, toward the chain).
pub fn linear_array_pattern(
    probe: &Probe,
    rec: &NuclideRecord,
    n_nuclei: usize,
    d_nm: f64,
    standoff_nm: f64,
    thetas: &[f64],
) -> Result<AngularGrid> {
    if n_nuclei < 2 {
        return domain("a linear array needs at least 2 nuclei");
    }
    if !(d_nm > 0.0) || !(standoff_nm > 0.0) {
        return domain("array period and standoff must be > 0");
    }
    let set = NucleusSet::linear_chain(n_nuclei, d_nm, standoff_nm)?;
    sample_grid(probe, rec, &set, [0.0, 0.0], thetas, &[0.0])
}
