//! Quadrature rules used by the emission integrals.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Controls for [`integrate_periodic`].
#[derive(Debug, Clone, Copy)]
pub struct PeriodicOptions {
    pub rel_tol: f64,
    /// Number of nodes on the first pass.
    pub initial_nodes: usize,
    /// Maximum number of grid doublings.
    pub max_doublings: usize,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            initial_nodes: 8,
            max_doublings: 16,
        }
    }
}

/// Integral of a 2π-periodic function over one period, by the trapezoidal
/// rule on a uniform grid that is doubled until two successive estimates
/// agree. Previously evaluated nodes are reused at each doubling.
pub fn integrate_periodic<F>(f: F) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_periodic_with(f, PeriodicOptions::default())
}

pub fn integrate_periodic_with<F>(mut f: F, opts: PeriodicOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut n = opts.initial_nodes.max(1);
    let h = TAU / n as f64;
    let mut sum: f64 = (0..n).map(|k| f(k as f64 * h)).sum();
    let mut estimate = sum * h;
    for _ in 0..opts.max_doublings {
        let h = TAU / (2 * n) as f64;
        let mid: f64 = (0..n).map(|k| f((2 * k + 1) as f64 * h)).sum();
        sum += mid;
        n *= 2;
        let next = sum * h;
        if (next - estimate).abs() <= opts.rel_tol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        estimate = next;
    }
    let h = TAU / n as f64;
    Err(Error::Convergence {
        iterations: opts.max_doublings,
        last: sum * h,
        previous: estimate,
    })
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

const MAX_DEPTH: usize = 50;

/// Adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Panels are bisected until each one's Kronrod/Gauss difference is within
/// its share of `tol * max(1, |I|)`.
pub fn integrate_adaptive<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(a < b) {
        return crate::error::domain(format!("integration bounds must satisfy a < b, got [{a}, {b}]"));
    }
    let (whole, err) = gk15(&mut f, a, b);
    let target = tol * whole.abs().max(1.0);
    if err <= target {
        return Ok(whole);
    }
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut stack = vec![(a, b, whole, 0usize)];
    while let Some((lo, hi, _, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, el) = gk15(&mut f, lo, mid);
        let (right, er) = gk15(&mut f, mid, hi);
        let share = target * (hi - lo) / (b - a);
        if el + er <= share || (hi - lo) < 1e-15 * (b - a) {
            // Kahan accumulation keeps many small panels from drifting.
            let y = left + right - comp;
            let t = total + y;
            comp = (t - total) - y;
            total = t;
        } else if depth + 1 >= MAX_DEPTH {
            return Err(Error::Convergence {
                iterations: depth + 1,
                last: left + right,
                previous: whole,
            });
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Compensated (Kahan-Babuska) accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}
