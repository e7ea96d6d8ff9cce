//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Small arguments (`x < 2`) use the ascending series around the logarithmic
//! singularity. Larger arguments use Steed's continued fraction for the ratio
//! `K1/K0` together with Temme's normalization sum, which converges quickly
//! for `x >= 2` and stays accurate to a few ulps.

use super::constants::EULER_GAMMA;
use crate::error::{domain, Result};

/// Above this argument both functions underflow and are returned as zero.
pub const BESSEL_MAX_ARG: f64 = 700.0;

const SERIES_CROSSOVER: f64 = 2.0;
const MAX_TERMS: usize = 500;

/// `K0(x)`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x > BESSEL_MAX_ARG {
        return Ok(0.0);
    }
    Ok(if x < SERIES_CROSSOVER {
        series(x).0
    } else {
        steed(x).0
    })
}

/// `K1(x)`.
///
/// Near the `1/x` pole the value is returned unclamped; physical cutoffs live
/// with the callers.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x > BESSEL_MAX_ARG {
        return Ok(0.0);
    }
    Ok(if x < SERIES_CROSSOVER {
        series(x).1
    } else {
        steed(x).1
    })
}

/// Both orders at once, sharing the work.
pub fn bessel_k01(x: f64) -> Result<(f64, f64)> {
    check_arg(x)?;
    if x > BESSEL_MAX_ARG {
        return Ok((0.0, 0.0));
    }
    Ok(if x < SERIES_CROSSOVER {
        series(x)
    } else {
        steed(x)
    })
}

fn check_arg(x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return domain(format!("modified Bessel K needs x > 0, got {x}"));
    }
    Ok(())
}

/// Ascending series.
///
/// `K0 = -(ln(x/2) + g) I0 + sum_k q^k/(k!)^2 H_k`
/// `K1 = 1/x + ln(x/2) I1 - (x/4) sum_k [psi(k+1) + psi(k+2)] q^k/(k!(k+1)!)`
/// with `q = x^2/4`, `H_k` the harmonic numbers and `psi(k+1) = H_k - g`.
fn series(x: f64) -> (f64, f64) {
    let q = 0.25 * x * x;
    let ln_half = (0.5 * x).ln();

    // k = 0 terms
    let mut t0 = 1.0; // q^k / (k!)^2
    let mut t1 = 1.0; // q^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = t0;
    let mut i1 = t1;
    let mut s0 = 0.0; // sum t0 * H_k
    let mut s1 = t1 * (2.0 * harmonic + 1.0 - 2.0 * EULER_GAMMA); // psi(1)+psi(2)

    for k in 1..MAX_TERMS {
        let kf = k as f64;
        t0 *= q / (kf * kf);
        t1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t0;
        i1 += t1;
        s0 += t0 * harmonic;
        // psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2g
        s1 += t1 * (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -(ln_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + ln_half * i1 - 0.25 * x * s1;
    (k0, k1)
}

/// Steed's continued fraction (order 0 seed), valid for `x >= 2`.
fn steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
