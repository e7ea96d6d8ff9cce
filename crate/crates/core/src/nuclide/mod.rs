//! Nuclear level data and the dipolar response built from it: transition
//! strength diagrams, the coherent fraction, the coherent radiative rate and
//! the magnetic polarizability.

pub mod angular;
pub mod registry;
pub mod surd;

use std::collections::BTreeMap;

use num_complex::Complex64;

pub use angular::{clebsch_gordan_half, y1m_matrix_element, Realization};
pub use registry::NuclideRegistry;
pub use surd::Rational;

use crate::error::{domain, Error, Result};
use crate::numerics::constants::{omega_from_ev, C_NM_S};

/// Parameters of a two-level nuclear M1 resonance.
///
/// Spins are stored doubled (`jg2 = 2 j_g`).
#[derive(Debug, Clone, PartialEq)]
pub struct NuclideRecord {
    pub name: String,
    pub e0_kev: f64,
    /// Total (1/e) lifetime `1/kappa`, s.
    pub lifetime_s: f64,
    /// Internal-conversion ratio.
    pub alpha_ic: f64,
    pub jg2: i32,
    pub je2: i32,
    /// Extra reduction of the coherent radiative rate (decay through
    /// intermediate states). 1 when absent.
    pub branch_divisor: f64,
}

impl NuclideRecord {
    pub fn new(
        name: impl Into<String>,
        e0_kev: f64,
        lifetime_s: f64,
        alpha_ic: f64,
        jg2: i32,
        je2: i32,
        branch_divisor: f64,
    ) -> Result<Self> {
        let rec = Self {
            name: name.into(),
            e0_kev,
            lifetime_s,
            alpha_ic,
            jg2,
            je2,
            branch_divisor,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn fe57() -> Self {
        Self::new("Fe-57", 14.4129, 1.42e-7, 8.544, 1, 3, 1.0).expect("built-in record")
    }

    pub fn dy161() -> Self {
        Self::new("Dy-161", 43.8201, 1.20e-9, 4.213, 5, 7, 2.25).expect("built-in record")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e0_kev > 0.0 && self.e0_kev.is_finite()) {
            return domain(format!("{}: e0_keV must be > 0", self.name));
        }
        if !(self.lifetime_s > 0.0 && self.lifetime_s.is_finite()) {
            return domain(format!("{}: lifetime_s must be > 0", self.name));
        }
        if !(self.alpha_ic >= 0.0 && self.alpha_ic.is_finite()) {
            return domain(format!("{}: alpha_ic must be >= 0", self.name));
        }
        if !(self.branch_divisor >= 1.0 && self.branch_divisor.is_finite()) {
            return domain(format!("{}: branch_divisor must be >= 1", self.name));
        }
        check_spin_pair(self.jg2, self.je2)
    }

    /// Resonance angular frequency `omega_0`, rad/s.
    pub fn omega0(&self) -> f64 {
        omega_from_ev(self.e0_kev * 1e3)
    }

    /// Total decay rate `kappa`, 1/s.
    pub fn kappa(&self) -> f64 {
        1.0 / self.lifetime_s
    }

    /// Resonant wavelength `2 pi c / omega_0`, nm.
    pub fn wavelength_nm(&self) -> f64 {
        std::f64::consts::TAU * C_NM_S / self.omega0()
    }

    /// Resonant wavevector `omega_0 / c`, 1/nm.
    pub fn k0(&self) -> f64 {
        self.omega0() / C_NM_S
    }
}

fn check_spin_pair(jg2: i32, je2: i32) -> Result<()> {
    if jg2 <= 0 || je2 <= 0 || jg2 % 2 != 1 || je2 % 2 != 1 {
        return domain(format!(
            "spins must be positive half-integers, got j_g = {jg2}/2, j_e = {je2}/2"
        ));
    }
    if (je2 - jg2).abs() != 2 {
        return domain(format!(
            "only dipole pairs |j_e - j_g| = 1 are supported, got j_g = {jg2}/2, j_e = {je2}/2"
        ));
    }
    Ok(())
}

/// Relative strengths of the sublevel transitions of a dipole pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionDiagram {
    pub jg2: i32,
    pub je2: i32,
    /// `(mu_e2, mu_g2) -> strength`; zero-strength pairs are not stored.
    pub strengths: BTreeMap<(i32, i32), Rational>,
}

impl TransitionDiagram {
    pub fn strength(&self, mue2: i32, mug2: i32) -> Rational {
        self.strengths
            .get(&(mue2, mug2))
            .copied()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    /// Sum of strengths leaving excited sublevel `mue2`.
    pub fn downward_sum(&self, mue2: i32) -> Rational {
        self.strengths
            .iter()
            .filter(|((e, _), _)| *e == mue2)
            .map(|(_, s)| *s)
            .sum()
    }

    /// Sum of strengths reaching ground sublevel `mug2`.
    pub fn upward_sum(&self, mug2: i32) -> Rational {
        self.strengths
            .iter()
            .filter(|((_, g), _)| *g == mug2)
            .map(|(_, s)| *s)
            .sum()
    }
}

/// Strength diagram from squared `Y_{1m}` matrix elements, normalized so that
/// each excited sublevel decays with total strength 1.
pub fn transition_diagram(jg2: i32, je2: i32) -> Result<TransitionDiagram> {
    transition_diagram_in(jg2, je2, Realization::Upper)
}

pub fn transition_diagram_in(jg2: i32, je2: i32, realization: Realization) -> Result<TransitionDiagram> {
    check_spin_pair(jg2, je2)?;
    let mut raw = BTreeMap::new();
    for mue2 in (-je2..=je2).step_by(2) {
        for mug2 in (-jg2..=jg2).step_by(2) {
            let element = angular::y1m_matrix_element_scaled(je2, mue2, jg2, mug2, realization)?;
            let sq = element.square_rational().ok_or_else(|| {
                Error::Domain(format!(
                    "matrix element for mu_e = {mue2}/2, mu_g = {mug2}/2 has irrational square"
                ))
            })?;
            if sq != Rational::from_integer(0) {
                raw.insert((mue2, mug2), sq);
            }
        }
    }
    // normalize per excited sublevel; the Wigner-Eckart structure makes the
    // raw downward sums identical, so one factor fits every row
    let mut strengths = BTreeMap::new();
    for mue2 in (-je2..=je2).step_by(2) {
        let row: Rational = raw
            .iter()
            .filter(|((e, _), _)| *e == mue2)
            .map(|(_, s)| *s)
            .sum();
        if row == Rational::from_integer(0) {
            return domain(format!("excited sublevel {mue2}/2 has no dipole decay"));
        }
        for (&(e, g), s) in raw.iter().filter(|((e, _), _)| *e == mue2) {
            strengths.insert((e, g), s / row);
        }
    }
    Ok(TransitionDiagram {
        jg2,
        je2,
        strengths,
    })
}

/// Average of all nonzero downward strengths: the fraction of radiative
/// decays that return the nucleus to its original sublevel.
pub fn coherent_fraction(jg2: i32, je2: i32) -> Result<Rational> {
    let diagram = transition_diagram(jg2, je2)?;
    let total: Rational = diagram.strengths.values().copied().sum();
    Ok(total / Rational::from_integer(diagram.strengths.len() as i128))
}

/// Coherent radiative rate `kappa_r = kappa f / (1 + alpha_IC) / divisor`, 1/s.
pub fn radiative_rate(rec: &NuclideRecord) -> Result<f64> {
    let f = coherent_fraction(rec.jg2, rec.je2)?;
    Ok(coherent_radiative_rate(
        rec.kappa(),
        surd::ratio_to_f64(&f),
        rec.alpha_ic,
        rec.branch_divisor,
    ))
}

pub fn coherent_radiative_rate(kappa: f64, fraction: f64, alpha_ic: f64, branch_divisor: f64) -> f64 {
    kappa * fraction / (1.0 + alpha_ic) / branch_divisor
}

/// Isotropic magnetic polarizability `alpha_M(omega)`, nm^3.
///
/// The wavevector is pinned to the resonance, `k = omega_0 / c`; the
/// response is only ever sampled within a few `kappa` of `omega_0`.
pub fn polarizability(rec: &NuclideRecord, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return domain(format!("omega must be > 0, got {omega}"));
    }
    let k = rec.k0();
    let kappa_r = radiative_rate(rec)?;
    let denom = Complex64::new(rec.omega0() - omega, -0.5 * rec.kappa());
    Ok(Complex64::new(0.75 * kappa_r / (k * k * k), 0.0) / denom)
}
