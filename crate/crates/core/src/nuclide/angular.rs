//! Spin-orbit realization of nuclear sublevels and their dipolar matrix
//! elements.
//!
//! A level of total angular momentum `j` is realized as
//! `|l j mu> = sum_s C_{l j mu s} Y_{l, mu-s} |s>` with `l = j ± 1/2`.
//! All half-integers are carried as doubled integers (`j2 = 2j`).

use super::surd::{Rational, Surd};
use crate::error::{domain, Result};

/// Which orbital realization `l = j ± 1/2` to use for both levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realization {
    /// `l = j + 1/2`
    Upper,
    /// `l = j - 1/2`
    Lower,
}

impl Realization {
    /// Orbital number for a level with doubled total angular momentum `j2`.
    pub fn orbital(self, j2: i32) -> i32 {
        match self {
            Realization::Upper => (j2 + 1) / 2,
            Realization::Lower => (j2 - 1) / 2,
        }
    }
}

fn check_half_integer(name: &str, x2: i32) -> Result<()> {
    if x2.rem_euclid(2) != 1 {
        return domain(format!("{name} must be half-integer, got {x2}/2"));
    }
    Ok(())
}

/// Spin-1/2 coupling coefficient `C_{l j mu s}` in closed form.
///
/// `j2`, `mu2`, `s2` are doubled values; `s2` is `±1`.
pub fn clebsch_gordan_half(l: i32, j2: i32, mu2: i32, s2: i32) -> Result<Surd> {
    check_half_integer("j", j2)?;
    check_half_integer("mu", mu2)?;
    if j2 <= 0 {
        return domain(format!("j must be positive, got {j2}/2"));
    }
    if s2 != 1 && s2 != -1 {
        return domain(format!("s must be ±1/2, got {s2}/2"));
    }
    if mu2.abs() > j2 {
        return domain(format!("|mu| = {}/2 exceeds j = {j2}/2", mu2.abs()));
    }
    let upper = 2 * l == j2 + 1;
    let lower = 2 * l == j2 - 1;
    if !upper && !lower {
        return domain(format!("l = {l} is not j ± 1/2 for j = {j2}/2"));
    }
    // orbital projection mu - s must fit in l
    if (mu2 - s2).abs() > 2 * l {
        return Ok(Surd::zero());
    }
    let j2 = j2 as i128;
    let mu2 = mu2 as i128;
    // Written with doubled quantities: (j+mu+1)/(2(j+1)) = (j2+mu2+2)/(2(j2+2)), etc.
    let (sign, num, den) = match (upper, s2) {
        (true, -1) => (1, j2 + mu2 + 2, 2 * (j2 + 2)),
        (true, _) => (-1, j2 - mu2 + 2, 2 * (j2 + 2)),
        (false, -1) => (1, j2 - mu2, 2 * j2),
        (false, _) => (1, j2 + mu2, 2 * j2),
    };
    Ok(Surd::signed_sqrt(sign, Rational::new(num, den)))
}

fn factorial(n: i64) -> i128 {
    debug_assert!(n >= 0);
    (1..=n as i128).product()
}

/// Wigner 3j symbol for integer angular momenta, exact (Racah formula).
pub fn wigner_3j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> Surd {
    if m1 + m2 + m3 != 0
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
        || j3 < (j1 - j2).abs()
        || j3 > j1 + j2
    {
        return Surd::zero();
    }
    let triangle = Rational::new(
        factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
        factorial(j1 + j2 + j3 + 1),
    );
    let moments = Rational::from_integer(
        factorial(j1 + m1)
            * factorial(j1 - m1)
            * factorial(j2 + m2)
            * factorial(j2 - m2)
            * factorial(j3 + m3)
            * factorial(j3 - m3),
    );
    let kmin = 0.max(j2 - j3 - m1).max(j1 - j3 + m2);
    let kmax = (j1 + j2 - j3).min(j1 - m1).min(j2 + m2);
    let mut sum = Rational::from_integer(0);
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(j3 - j2 + k + m1)
            * factorial(j3 - j1 + k - m2)
            * factorial(j1 + j2 - j3 - k)
            * factorial(j1 - k - m1)
            * factorial(j2 - k + m2);
        let term = Rational::new(1, den);
        sum += if k % 2 == 0 { term } else { -term };
    }
    let phase = if (j1 - j2 - m3).rem_euclid(2) == 0 { 1 } else { -1 };
    let root = Surd::signed_sqrt(1, triangle * moments);
    &root * &Surd::from_rational(sum * Rational::from_integer(phase))
}

/// `sqrt(4 pi) * ∫ dΩ Y*_{l1 m1} Y_{1 m} Y_{l2 m2}`, exact.
pub fn gaunt_dipole_scaled(l1: i64, m1: i64, m: i64, l2: i64, m2: i64) -> Surd {
    // Y*_{l1 m1} = (-1)^m1 Y_{l1,-m1}
    let a = wigner_3j(l1, 1, l2, 0, 0, 0);
    if a.is_zero() {
        return Surd::zero();
    }
    let b = wigner_3j(l1, 1, l2, -m1, m, m2);
    let norm = Surd::signed_sqrt(1, Rational::from_integer(((2 * l1 + 1) * 3 * (2 * l2 + 1)) as i128));
    let phase = Surd::from_int(if m1.rem_euclid(2) == 0 { 1 } else { -1 });
    &(&(&norm * &a) * &b) * &phase
}

/// `sqrt(4 pi) * <l_e j_e mu_e | Y_{1m} | l_g j_g mu_g>` with `m = mu_e - mu_g`,
/// exact. Returns zero when `|m| > 1`.
pub fn y1m_matrix_element_scaled(
    je2: i32,
    mue2: i32,
    jg2: i32,
    mug2: i32,
    realization: Realization,
) -> Result<Surd> {
    for (name, v) in [("j_e", je2), ("mu_e", mue2), ("j_g", jg2), ("mu_g", mug2)] {
        check_half_integer(name, v)?;
    }
    if mue2.abs() > je2 || mug2.abs() > jg2 {
        return domain("sublevel projection exceeds its total angular momentum");
    }
    let m2 = mue2 - mug2;
    if m2.abs() > 2 {
        return Ok(Surd::zero());
    }
    let le = realization.orbital(je2);
    let lg = realization.orbital(jg2);
    let mut total = Surd::zero();
    for s2 in [-1, 1] {
        let ce = clebsch_gordan_half(le, je2, mue2, s2)?;
        let cg = clebsch_gordan_half(lg, jg2, mug2, s2)?;
        if ce.is_zero() || cg.is_zero() {
            continue;
        }
        let gaunt = gaunt_dipole_scaled(
            le as i64,
            ((mue2 - s2) / 2) as i64,
            (m2 / 2) as i64,
            lg as i64,
            ((mug2 - s2) / 2) as i64,
        );
        total = &total + &(&(&ce * &cg) * &gaunt);
    }
    Ok(total)
}

/// `<e_{mu_e} | Y_{1m} | g_{mu_g}>` as a float, in the default `l = j + 1/2`
/// realization.
pub fn y1m_matrix_element(je2: i32, mue2: i32, jg2: i32, mug2: i32) -> Result<f64> {
    let scaled = y1m_matrix_element_scaled(je2, mue2, jg2, mug2, Realization::Upper)?;
    Ok(scaled.to_f64() / (4.0 * std::f64::consts::PI).sqrt())
}
