//! Smith-Purcell emission from crystal films, evaluated in reciprocal space.
//!
//! Each film emits along discrete cones `cos(theta_n) = c/v - n lambda / d`.
//! The azimuthal density on a cone is a sum over 2D reciprocal vectors `G`
//! restricted by the stacking offset of consecutive layers and cut off at
//! `|G| <= 1 / r_min`, the sum being logarithmically divergent otherwise.

mod lattice;

pub use lattice::{LatticeFilm, LatticeRegistry};

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::nuclide::NuclideRecord;
use crate::numerics::{integrate_periodic_with, KahanSum, PeriodicOptions};
use crate::numerics::constants::ALPHA_FS;
use crate::probe::Probe;
use crate::single_nucleus::spectral_weight;

/// Smooth cutoffs are summed out to this multiple of `g_max`.
const SMOOTH_REACH: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffKind {
    /// Keep `|G| <= g_max` with unit weight.
    Hard,
    /// Weight every `G` by `exp(-(|G| / g_max)^2)`.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    pub r_min_nm: f64,
    pub kind: CutoffKind,
}

impl CutoffPolicy {
    pub fn hard(r_min_nm: f64) -> Result<Self> {
        Self::new(r_min_nm, CutoffKind::Hard)
    }

    pub fn smooth(r_min_nm: f64) -> Result<Self> {
        Self::new(r_min_nm, CutoffKind::Smooth)
    }

    pub fn new(r_min_nm: f64, kind: CutoffKind) -> Result<Self> {
        if !(r_min_nm > 0.0 && r_min_nm.is_finite()) {
            return domain(format!("r_min must be > 0, got {r_min_nm}"));
        }
        Ok(Self { r_min_nm, kind })
    }

    /// Reciprocal cutoff, nm^-1.
    pub fn g_max(&self) -> f64 {
        1.0 / self.r_min_nm
    }

    fn reach(&self) -> f64 {
        match self.kind {
            CutoffKind::Hard => self.g_max(),
            CutoffKind::Smooth => SMOOTH_REACH * self.g_max(),
        }
    }

    fn weight(&self, g: f64) -> f64 {
        match self.kind {
            CutoffKind::Hard => 1.0,
            CutoffKind::Smooth => (-(g * self.g_max().recip()).powi(2)).exp(),
        }
    }
}

/// One emission cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpCone {
    pub n: i32,
    pub cos_theta: f64,
}

/// Cone directions `cos(theta_n) = 1/beta - n lambda / d` for every order
/// `n >= 1` that lands inside `[-1, 1]`.
pub fn sp_angles(beta: f64, d_nm: f64, lambda_nm: f64) -> Result<Vec<SpCone>> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("beta must lie in (0, 1), got {beta}"));
    }
    if !(d_nm > 0.0 && d_nm.is_finite()) || !(lambda_nm > 0.0 && lambda_nm.is_finite()) {
        return domain("period and wavelength must be positive and finite");
    }
    let mut out = Vec::new();
    for n in 1.. {
        let cos_theta = cone_cosine(beta, n, d_nm, lambda_nm);
        if cos_theta < -1.0 {
            break;
        }
        if cos_theta <= 1.0 {
            out.push(SpCone { n, cos_theta });
        }
    }
    Ok(out)
}

pub fn cone_cosine(beta: f64, n: i32, d_nm: f64, lambda_nm: f64) -> f64 {
    1.0 / beta - n as f64 * lambda_nm / d_nm
}

/// Reciprocal vectors selected for a sum, in shell order: by `i^2 + j^2`,
/// then `i`, then `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReciprocalSet {
    pub indices: Vec<[i32; 2]>,
    /// `G = (2 pi / a)(i, j)`, nm^-1.
    pub vectors: Vec<[f64; 2]>,
    /// Cutoff weights, all 1 for the hard cutoff.
    pub weights: Vec<f64>,
    /// Set when the cutoff excludes every allowed vector.
    pub empty_warning: bool,
}

impl ReciprocalSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn enumerate_reciprocal(a_nm: f64, policy: &CutoffPolicy, keep: impl Fn(i32, i32) -> bool) -> ReciprocalSet {
    let b = TAU / a_nm;
    let reach = policy.reach() / b;
    let reach2 = reach * reach;
    let m = reach.floor() as i32;
    let mut indices = Vec::new();
    for i in -m..=m {
        for j in -m..=m {
            if ((i * i + j * j) as f64) <= reach2 && keep(i, j) {
                indices.push([i, j]);
            }
        }
    }
    indices.sort_by_key(|&[i, j]| (i * i + j * j, i, j));
    let vectors: Vec<[f64; 2]> = indices.iter().map(|&[i, j]| [b * i as f64, b * j as f64]).collect();
    let weights = vectors.iter().map(|g| policy.weight(g[0].hypot(g[1]))).collect();
    ReciprocalSet {
        empty_warning: indices.is_empty(),
        indices,
        vectors,
        weights,
    }
}

/// Reciprocal vectors contributing to the cone of order `n`.
pub fn reciprocal_vectors(film: &LatticeFilm, n: i32, policy: &CutoffPolicy) -> ReciprocalSet {
    enumerate_reciprocal(film.a_nm, policy, |i, j| film.allows(n, i, j))
}

/// The whole 2D reciprocal lattice inside the cutoff.
pub fn reciprocal_lattice(a_nm: f64, policy: &CutoffPolicy) -> ReciprocalSet {
    enumerate_reciprocal(a_nm, policy, |_, _| true)
}

/// `|q|^2 cos^2(theta) + (q . rhat)^2` for in-plane `q`.
pub fn numerator_projected(q: [f64; 2], rhat: [f64; 3]) -> f64 {
    let dot = q[0] * rhat[0] + q[1] * rhat[1];
    (q[0] * q[0] + q[1] * q[1]) * rhat[2] * rhat[2] + dot * dot
}

/// `|q|^2 |rhat x phi_q|^2` with `phi_q = z x q / |q|`.
pub fn numerator_cross(q: [f64; 2], rhat: [f64; 3]) -> f64 {
    let q2 = q[0] * q[0] + q[1] * q[1];
    if q2 == 0.0 {
        return 0.0;
    }
    let qn = q2.sqrt();
    let phi = [-q[1] / qn, q[0] / qn, 0.0];
    let c = [
        rhat[1] * phi[2] - rhat[2] * phi[1],
        rhat[2] * phi[0] - rhat[0] * phi[2],
        rhat[0] * phi[1] - rhat[1] * phi[0],
    ];
    q2 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2])
}

fn unit(cos_theta: f64, phi: f64) -> [f64; 3] {
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    [sin_theta * c, sin_theta * s, cos_theta]
}

/// `sum_G w_G N(k_par + G) / (|k_par + G|^2 + delta^2)^2` in shell order.
fn kernel_sum(set: &ReciprocalSet, rhat: [f64; 3], k0: f64, delta: f64, numerator: fn([f64; 2], [f64; 3]) -> f64) -> f64 {
    let kx = k0 * rhat[0];
    let ky = k0 * rhat[1];
    let d2 = delta * delta;
    let mut acc = KahanSum::new();
    for (g, w) in set.vectors.iter().zip(&set.weights) {
        let q = [kx + g[0], ky + g[1]];
        let den = q[0] * q[0] + q[1] * q[1] + d2;
        acc.add(w * numerator(q, rhat) / (den * den));
    }
    acc.value()
}

/// `9 pi^2 Z^2 alpha kappa_r^2 c^3 / (A^2 omega_0^4 b_z kappa)`.
pub fn film_prefactor(probe: &Probe, rec: &NuclideRecord, film: &LatticeFilm) -> Result<f64> {
    let z = probe.z_charge() as f64;
    let k0 = rec.k0();
    let area = film.cell_area();
    Ok(9.0 * PI * PI * z * z * ALPHA_FS * spectral_weight(rec)? / (k0 * k0 * k0 * area * area * film.b_z_nm))
}

fn admissible_cone(probe: &Probe, rec: &NuclideRecord, film: &LatticeFilm, n: i32) -> Result<f64> {
    let c = cone_cosine(probe.beta(), n, film.z_period(), rec.wavelength_nm());
    if n < 1 || !(-1.0..=1.0).contains(&c) {
        return domain(format!(
            "order {n} has no emission cone at beta = {} (cos theta would be {c})",
            probe.beta()
        ));
    }
    Ok(c)
}

/// Emission probability per unit azimuth on the cone of order `n`, per
/// atomic layer.
pub fn azimuthal_profile(
    probe: &Probe,
    rec: &NuclideRecord,
    film: &LatticeFilm,
    n: i32,
    phi: f64,
    policy: &CutoffPolicy,
) -> Result<f64> {
    let cos_theta = admissible_cone(probe, rec, film, n)?;
    let set = reciprocal_vectors(film, n, policy);
    let pre = film_prefactor(probe, rec, film)?;
    let delta = 1.0 / probe.field_range(rec.omega0());
    Ok(pre * kernel_sum(&set, unit(cos_theta, phi), rec.k0(), delta, numerator_projected))
}

/// Same as [`azimuthal_profile`], with the numerator written as
/// `|q|^2 |rhat x phi_q|^2`.
pub fn azimuthal_profile_cross_form(
    probe: &Probe,
    rec: &NuclideRecord,
    film: &LatticeFilm,
    n: i32,
    phi: f64,
    policy: &CutoffPolicy,
) -> Result<f64> {
    let cos_theta = admissible_cone(probe, rec, film, n)?;
    let set = reciprocal_vectors(film, n, policy);
    let pre = film_prefactor(probe, rec, film)?;
    let delta = 1.0 / probe.field_range(rec.omega0());
    Ok(pre * kernel_sum(&set, unit(cos_theta, phi), rec.k0(), delta, numerator_cross))
}

/// A cone with its sampled azimuthal profile and total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionCone {
    pub n: i32,
    pub cos_theta: f64,
    pub phis: Vec<f64>,
    /// Per layer per radian, at `phis`.
    pub phi_profile: Vec<f64>,
    /// Integral of the profile over azimuth, per layer.
    pub weight: f64,
}

struct ConeEvaluator {
    set: ReciprocalSet,
    pre: f64,
    cos_theta: f64,
    k0: f64,
    delta: f64,
}

impl ConeEvaluator {
    fn new(probe: &Probe, rec: &NuclideRecord, film: &LatticeFilm, n: i32, policy: &CutoffPolicy) -> Result<Self> {
        Ok(Self {
            cos_theta: admissible_cone(probe, rec, film, n)?,
            set: reciprocal_vectors(film, n, policy),
            pre: film_prefactor(probe, rec, film)?,
            k0: rec.k0(),
            delta: 1.0 / probe.field_range(rec.omega0()),
        })
    }

    fn at(&self, phi: f64) -> f64 {
        self.pre * kernel_sum(&self.set, unit(self.cos_theta, phi), self.k0, self.delta, numerator_projected)
    }

    fn weight(&self, rel_tol: f64) -> Result<f64> {
        integrate_periodic_with(
            |phi| self.at(phi),
            PeriodicOptions {
                rel_tol,
                ..PeriodicOptions::default()
            },
        )
    }
}

pub fn emission_cone(
    probe: &Probe,
    rec: &NuclideRecord,
    film: &LatticeFilm,
    n: i32,
    policy: &CutoffPolicy,
    n_phi: usize,
    rel_tol: f64,
) -> Result<EmissionCone> {
    if n_phi == 0 {
        return domain("n_phi must be >= 1");
    }
    let ev = ConeEvaluator::new(probe, rec, film, n, policy)?;
    let phis: Vec<f64> = (0..n_phi).map(|k| TAU * k as f64 / n_phi as f64).collect();
    let phi_profile = phis.iter().map(|&p| ev.at(p)).collect();
    Ok(EmissionCone {
        n,
        cos_theta: ev.cos_theta,
        phis,
        phi_profile,
        weight: ev.weight(rel_tol)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YieldOptions {
    /// Highest order included; `None` keeps every cone.
    pub order_cap: Option<i32>,
    /// Relative tolerance of the azimuthal integrals.
    pub rel_tol: f64,
}

impl Default for YieldOptions {
    fn default() -> Self {
        Self {
            order_cap: None,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderYield {
    pub n: i32,
    pub cos_theta: f64,
    /// Per layer, per unit probe charge squared.
    pub yield_per_layer_per_z2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerYield {
    pub orders: Vec<OrderYield>,
    pub total_per_layer_per_z2: f64,
}

/// Photon yield per atomic layer and per `Z^2`, summed over cones.
pub fn layer_yield(probe: &Probe, rec: &NuclideRecord, film: &LatticeFilm, policy: &CutoffPolicy) -> Result<LayerYield> {
    layer_yield_with(probe, rec, film, policy, &YieldOptions::default())
}

pub fn layer_yield_with(
    probe: &Probe,
    rec: &NuclideRecord,
    film: &LatticeFilm,
    policy: &CutoffPolicy,
    opts: &YieldOptions,
) -> Result<LayerYield> {
    let z2 = (probe.z_charge() as f64).powi(2);
    let cones: Vec<SpCone> = sp_angles(probe.beta(), film.z_period(), rec.wavelength_nm())?
        .into_iter()
        .filter(|c| opts.order_cap.is_none_or(|cap| c.n <= cap))
        .collect();
    let orders = cones
        .par_iter()
        .map(|c| {
            let ev = ConeEvaluator::new(probe, rec, film, c.n, policy)?;
            Ok(OrderYield {
                n: c.n,
                cos_theta: c.cos_theta,
                yield_per_layer_per_z2: ev.weight(opts.rel_tol)? / z2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = orders.iter().map(|o| o.yield_per_layer_per_z2).collect::<KahanSum>().value();
    Ok(LayerYield {
        orders,
        total_per_layer_per_z2: total,
    })
}

/// Mean over impact parameters in a unit cell of `|rhat x g|^2` for a single
/// atomic plane, `g` being the dimensionless far-field amplitude of
/// [`crate::finite_array::far_field_amplitude`].
pub fn single_plane_averaged_intensity(
    probe: &Probe,
    rec: &NuclideRecord,
    film: &LatticeFilm,
    theta: f64,
    phi: f64,
    policy: &CutoffPolicy,
) -> Result<f64> {
    let range = probe.field_range(rec.omega0());
    let set = reciprocal_lattice(film.a_nm, policy);
    let pre = (TAU * range / film.cell_area()).powi(2);
    Ok(pre * kernel_sum(&set, unit(theta.cos(), phi), rec.k0(), 1.0 / range, numerator_cross))
}
