//! End-to-end acceptance checks. Each test prints one PASS/FAIL line with
//! the numbers it compared (visible with `--nocapture`) and fails when the
//! check does not hold.

use std::f64::consts::{E, PI, TAU};
use std::path::Path;
use std::process::Command;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use nucsp::brems::{br_density, br_spectral_density_per_ev, br_window_yield};
use nucsp::crystal_sp::{
    layer_yield, reciprocal_vectors, single_plane_averaged_intensity, sp_angles, CutoffPolicy, LatticeFilm,
};
use nucsp::finite_array::{
    angular_density, direction, far_field_amplitude, linear_array_pattern, transverse_norm_sqr, uniform_cos_grid,
    NucleusSet,
};
use nucsp::nuclide::{coherent_fraction, radiative_rate, transition_diagram, Rational};
use nucsp::numerics::constants::{ELECTRON_MASS_EV, PROTON_MASS_EV};
use nucsp::numerics::{integrate_adaptive, integrate_periodic};
use nucsp::single_nucleus::{coherent_yield, decay_profile, incoherent_angular, spectral_profile};
use nucsp::{NuclideRecord, Probe};

fn report(id: &str, what: &str, pass: bool, detail: String) {
    println!("{} {id} {what}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} {what}: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn c01_radiative_lifetimes() {
    let fe = 1.0 / radiative_rate(&NuclideRecord::fe57()).unwrap();
    let dy = 1.0 / radiative_rate(&NuclideRecord::dy161()).unwrap();
    let pass = rel(fe, 2.03e-6) < 5e-3 && rel(dy, 3.17e-8) < 5e-3;
    report("c01", "radiative lifetimes", pass, format!("Fe-57 {fe:.5e} s, Dy-161 {dy:.5e} s"));
}

#[test]
fn c02_coherent_fractions() {
    let fe = coherent_fraction(1, 3).unwrap();
    let dy = coherent_fraction(5, 7).unwrap();
    let pass = fe == Ratio::new(2, 3) && dy == Ratio::new(4, 9);
    report("c02", "coherent fractions", pass, format!("1/2->3/2: {fe}, 5/2->7/2: {dy}"));
}

#[test]
fn c03_sum_rules() {
    let mut detail = Vec::new();
    let mut pass = true;
    for (jg2, je2) in [(1, 3), (5, 7)] {
        let d = transition_diagram(jg2, je2).unwrap();
        let up = Rational::new((je2 + 1) as i128, (jg2 + 1) as i128);
        let down_ok = (-je2..=je2).step_by(2).all(|m| d.downward_sum(m) == Rational::from_integer(1));
        let up_ok = (-jg2..=jg2).step_by(2).all(|m| d.upward_sum(m) == up);
        pass &= down_ok && up_ok;
        detail.push(format!("{jg2}/2->{je2}/2 down=1:{down_ok} up={up}:{up_ok}"));
    }
    report("c03", "sum rules", pass, detail.join(", "));
}

#[test]
fn c04_angular_integral_matches_closed_form() {
    let fe = NuclideRecord::fe57();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let set = NucleusSet::new(vec![[0.0, 0.0, 0.0]]).unwrap();
    let mut worst = 0.0f64;
    let mut pts = Vec::new();
    for _ in 0..5 {
        let beta = rng.gen_range(0.3..0.99);
        let r = 10f64.powf(rng.gen_range(-4.0..-1.5));
        let a = rng.gen_range(0.0..TAU);
        let rp = [-r * a.cos(), -r * a.sin()];
        let p = Probe::electron(beta).unwrap();
        let total = integrate_adaptive(
            |t| t.sin() * integrate_periodic(|ph| angular_density(&p, &fe, &set, rp, t, ph).unwrap()).unwrap(),
            0.0,
            PI,
            1e-12,
        )
        .unwrap();
        let closed = coherent_yield(&p, &fe, r).unwrap();
        worst = worst.max(rel(total, closed));
        pts.push(format!("({beta:.3},{r:.2e})"));
    }
    report("c04", "angular integral", worst < 1e-6, format!("worst rel {worst:.2e} at {}", pts.join(" ")));
}

#[test]
fn c05_array_peaks_at_cone_angles() {
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.94).unwrap();
    let d = 0.286;
    let thetas = uniform_cos_grid(2001);
    let grid = linear_array_pattern(&p, &fe, 10, d, 0.01, &thetas).unwrap();
    let v = grid.column(0);
    let c = grid.cos_thetas();
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    let mut maxima = Vec::new();
    for i in 0..v.len() {
        let left = i == 0 || v[i] > v[i - 1];
        let right = i + 1 == v.len() || v[i] >= v[i + 1];
        if left && right && v[i] >= 0.25 * vmax {
            maxima.push(c[i]);
        }
    }
    let cones = sp_angles(p.beta(), d, fe.wavelength_nm()).unwrap();
    let predicted: Vec<f64> = cones.iter().map(|c| c.cos_theta).collect();
    let near = |x: f64, ys: &[f64]| ys.iter().any(|y| (x - y).abs() <= 0.02);
    let all_predicted = maxima.iter().all(|&m| near(m, &predicted));
    let all_found = predicted.iter().all(|&c| near(c, &maxima));
    report(
        "c05",
        "array pattern peaks",
        all_predicted && all_found && !cones.is_empty(),
        format!(
            "maxima {:?} vs cones {:?}",
            maxima.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            cones.iter().map(|c| format!("{}:{:.4}", c.n, c.cos_theta)).collect::<Vec<_>>()
        ),
    );
}

/// Mean of `|rhat x g|^2` over impact points in the unit cell around the
/// central nucleus of a `w x w` patch, excluding a disk of radius `r_min`.
///
/// Points are drawn from a mixture of a uniform density on the cell and a
/// log-uniform radial density around the nucleus, which tames the `1/R^2`
/// growth of the integrand.
#[allow(clippy::too_many_arguments)]
fn monte_carlo_cell_average(p: &Probe, rec: &NuclideRecord, w: usize, a: f64, r_min: f64, theta: f64, phi: f64, n: usize, seed: u64) -> (f64, f64) {
    let set = NucleusSet::square_patch(w, a).unwrap();
    let area = a * a;
    let r_max = a / 2.0;
    let log_span = (r_max / r_min).ln();
    let p_uniform = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            if rng.gen::<f64>() < p_uniform {
                [rng.gen_range(-r_max..r_max), rng.gen_range(-r_max..r_max)]
            } else {
                let rho = r_min * (rng.gen::<f64>() * log_span).exp();
                let ang = rng.gen_range(0.0..TAU);
                [rho * ang.cos(), rho * ang.sin()]
            }
        })
        .collect();
    let rhat = direction(theta, phi);
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&x| {
            let rho = x[0].hypot(x[1]);
            if rho < r_min {
                return 0.0;
            }
            let radial = if rho <= r_max { 1.0 / (TAU * rho * rho * log_span) } else { 0.0 };
            let q = p_uniform / area + (1.0 - p_uniform) * radial;
            let g = far_field_amplitude(p, rec, &set, x, theta, phi).unwrap();
            transverse_norm_sqr(rhat, &g) / (area * q)
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[test]
fn c06_reciprocal_sum_matches_direct_average() {
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.9).unwrap();
    let a = 0.2856;
    let film = LatticeFilm::sc100_with(a);
    let r_min = 0.001;
    let policy = CutoffPolicy::hard(r_min).unwrap();
    // A hard disk |G| <= 1/R in reciprocal space removes the same logarithm
    // as excluding rho < 2 exp(-gamma_E) R in real space.
    let r_matched = 2.0 * (-0.577_215_664_901_532_9f64).exp() * r_min;
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, &(theta, phi)) in [(0.5, 0.3), (1.2, 1.0), (2.2, 2.5)].iter().enumerate() {
        let recip = single_plane_averaged_intensity(&p, &fe, &film, theta, phi, &policy).unwrap();
        let seed = 60 + k as u64;
        let (mc, err) = monte_carlo_cell_average(&p, &fe, 41, a, r_matched, theta, phi, 40_000, seed);
        let (raw, _) = monte_carlo_cell_average(&p, &fe, 41, a, r_min, theta, phi, 40_000, seed);
        let d = rel(recip, mc);
        pass &= d < 0.05;
        detail.push(format!(
            "({theta},{phi}) G-sum {recip:.4e} MC {mc:.4e}±{:.1}% diff {:.2}% [disk at R_min itself: {:+.2}%]",
            100.0 * err / mc,
            100.0 * d,
            100.0 * (raw / recip - 1.0)
        ));
    }
    report("c06", "reciprocal vs direct", pass, detail.join("; "));
}

#[test]
fn c07_parity_selection() {
    let bcc = LatticeFilm::bcc100();
    let policy = CutoffPolicy::hard(0.002).unwrap();
    let mut structural = true;
    for n in 1..=8 {
        let set = reciprocal_vectors(&bcc, n, &policy);
        structural &= set.indices.iter().all(|&[i, j]| (i + j + n).rem_euclid(2) == 0);
        let forbidden = if n % 2 == 1 { [1, 1] } else { [1, 0] };
        structural &= !set.indices.contains(&forbidden);
    }
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.94).unwrap();
    let sc = LatticeFilm::sc100();
    let zero_offset = LatticeFilm::new("bcc100-unshifted", bcc.a_nm, [0.0, 0.0], bcc.a_nm).unwrap();
    let pol = CutoffPolicy::hard(0.004).unwrap();
    let ys = layer_yield(&p, &fe, &sc, &pol).unwrap();
    let yz = layer_yield(&p, &fe, &zero_offset, &pol).unwrap();
    let identical = ys == yz;
    report(
        "c07",
        "parity selection",
        structural && identical,
        format!("only i+j+n even emitted: {structural}; sc100 == zero-offset bcc: {identical} ({:e})", ys.total_per_layer_per_z2),
    );
}

#[test]
fn c08_logarithmic_cutoff_law() {
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.94).unwrap();
    let film = LatticeFilm::bcc100();
    let y: Vec<f64> = [0.004, 0.002, 0.001]
        .iter()
        .map(|&r| layer_yield(&p, &fe, &film, &CutoffPolicy::hard(r).unwrap()).unwrap().total_per_layer_per_z2)
        .collect();
    let d1 = y[1] - y[0];
    let d2 = y[2] - y[1];
    let pass = d1 > 0.0 && d2 > 0.0 && rel(d2, d1) < 0.15;
    report("c08", "logarithmic cutoff law", pass, format!("yields {:.4e}, {:.4e}, {:.4e}; differences {d1:.4e}, {d2:.4e}", y[0], y[1], y[2]));
}

#[test]
fn c09_absolute_scale() {
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.94).unwrap();
    let y = layer_yield(&p, &fe, &LatticeFilm::bcc100(), &CutoffPolicy::hard(0.001).unwrap())
        .unwrap()
        .total_per_layer_per_z2;
    let per_ion = y * 1e4 * 100.0;
    let pass = (1e-18..=1e-16).contains(&y);
    report("c09", "absolute scale", pass, format!("per layer per Z^2 {y:.3e}; N=1e4, Z=10 gives {per_ion:.2e} per ion"));
}

#[test]
fn c10_order_opening_jump() {
    let fe = NuclideRecord::fe57();
    let film = LatticeFilm::bcc100();
    let policy = CutoffPolicy::hard(0.001).unwrap();
    let lambda = fe.wavelength_nm();
    let d = film.z_period();
    // the seventh cone appears when 1/beta - 7 lambda/d reaches -1
    let beta_star = 1.0 / (7.0 * lambda / d - 1.0);
    let step = 1e-4;
    let scan: Vec<(f64, f64, usize)> = (-10..10)
        .map(|k| {
            let beta = beta_star + (k as f64 + 0.5) * step;
            let p = Probe::electron(beta).unwrap();
            let y = layer_yield(&p, &fe, &film, &policy).unwrap();
            (beta, y.total_per_layer_per_z2, y.orders.len())
        })
        .collect();
    let diffs: Vec<f64> = scan.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let jump_at = scan.windows(2).position(|w| w[0].2 != w[1].2);
    let pass = match jump_at {
        Some(j) => {
            let smooth = diffs.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.abs()).fold(0.0, f64::max);
            diffs[j].abs() > 10.0 * smooth && scan[j].1 < scan[j].1 + diffs[j].abs()
        }
        None => false,
    };
    let j = jump_at.unwrap_or(0);
    let smooth = diffs.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, v)| v.abs()).fold(0.0, f64::max);
    report(
        "c10",
        "order-opening jump",
        pass,
        format!(
            "threshold beta {beta_star:.6}; orders {}->{}; jump {:.3e} vs largest other step {smooth:.3e}",
            scan[j].2,
            scan[j + 1].2,
            diffs[j]
        ),
    );
}

#[test]
fn c11_incoherent_normalization() {
    let fe = NuclideRecord::fe57();
    let p = Probe::electron(0.8).unwrap();
    let nuclei = [[0.004, 0.0], [-0.002, 0.003], [0.001, -0.006], [0.01, 0.01]];
    let rp = [0.0005, -0.0003];
    let total = integrate_adaptive(
        |t| t.sin() * integrate_periodic(|ph| incoherent_angular(&p, &fe, &nuclei, rp, t, ph).unwrap()).unwrap(),
        0.0,
        PI,
        1e-13,
    )
    .unwrap();
    let f = 2.0 / 3.0;
    let coh: f64 = nuclei
        .iter()
        .map(|n| coherent_yield(&p, &fe, (n[0] - rp[0]).hypot(n[1] - rp[1])).unwrap())
        .sum();
    let expect = (1.0 / f - 1.0) * coh;
    let r = rel(total, expect);
    report("c11", "incoherent normalization", r < 1e-6, format!("integral {total:.6e} vs {expect:.6e} (rel {r:.1e})"));
}

#[test]
fn c12_bremsstrahlung() {
    let fe = NuclideRecord::fe57();
    let e = Probe::electron(0.9).unwrap();
    let pr = Probe::proton(0.9).unwrap();
    let omega = fe.omega0();
    let mass = br_density(&pr, 26, 0.001, 0.6, 0.4, omega).unwrap() / br_density(&e, 26, 0.001, 0.6, 0.4, omega).unwrap();
    let expect = (ELECTRON_MASS_EV / PROTON_MASS_EV).powi(2);
    let a = rel(mass, expect) < 1e-12;

    let center = fe.e0_kev * 1e3;
    let br = br_window_yield(&e, 26, 0.001, center, 1.0).unwrap();
    let coh = coherent_yield(&e, &fe, 0.001).unwrap();
    let b = br >= 1e2 * coh;

    let line_peak = coh * spectral_profile(&fe).peak_density();
    let br_per_ev = br_spectral_density_per_ev(&e, 26, 0.001, center).unwrap();
    let c = line_peak > br_per_ev;
    report(
        "c12",
        "bremsstrahlung",
        a && b && c,
        format!(
            "(a) mass ratio {mass:.6e} vs {expect:.6e}; (b) window {br:.3e} / coherent {coh:.3e} = {:.2e}; (c) line peak {line_peak:.3e}/eV vs BR {br_per_ev:.3e}/eV",
            br / coh
        ),
    );
}

#[test]
fn c13_decay_times() {
    let fe = decay_profile(&NuclideRecord::fe57()).survival(142e-9);
    let dy = decay_profile(&NuclideRecord::dy161()).survival(1.2e-9);
    let pass = (fe - 1.0 / E).abs() < 1e-12 && (dy - 1.0 / E).abs() < 1e-12;
    report("c13", "decay times", pass, format!("S(142 ns) = {fe:.15}, S(1.2 ns) = {dy:.15}"));
}

fn body_without_volatile(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("# wall_clock_s") && !l.starts_with("# started_unix_s"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn c14_thread_count_independence() {
    let exe = env!("CARGO_BIN_EXE_nucsp");
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("nuclide-info", "scenario = \"nuclide-info\"\nnuclide = \"Dy-161\"\n[probe]\nspecies = \"electron\"\nbeta = 0.9\n"),
        (
            "single-sweep",
            "scenario = \"single-sweep\"\n[probe]\nspecies = \"electron\"\nbeta_grid = [0.6, 0.8, 0.9]\n[geometry]\nr_perp_grid_nm = [0.001, 0.003]\n",
        ),
        (
            "array-pattern",
            "scenario = \"array-pattern\"\n[probe]\nspecies = \"electron\"\nbeta = 0.94\n[output]\nangular_points = 401\n",
        ),
        (
            "crystal-yield",
            "scenario = \"crystal-yield\"\n[probe]\ncharge = 10\nrest_energy_eV = 1.86e10\nbeta_grid = [0.9, 0.94]\n[geometry]\nlattice = \"bcc100\"\nn_layers = 10000\nr_min_grid_nm = [0.004, 0.002]\n",
        ),
        (
            "brems-compare",
            "scenario = \"brems-compare\"\n[probe]\nspecies = \"electron\"\nbeta = 0.9\n[geometry]\nr_perp_nm = 0.001\n[output]\nspectral_points = 21\ntime_points = 21\n",
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, text) in configs {
        let cfg = dir.path().join(format!("{name}.toml"));
        std::fs::write(&cfg, text).unwrap();
        let mut bodies = Vec::new();
        for threads in ["1", "4"] {
            let out = dir.path().join(format!("t{threads}"));
            let status = Command::new(exe)
                .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads])
                .output()
                .unwrap();
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            let mut files: Vec<_> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.file_name().unwrap().to_str().unwrap().starts_with(name))
                .collect();
            files.sort();
            bodies.push(files.iter().map(|f| body_without_volatile(f)).collect::<Vec<_>>());
        }
        let same = bodies[0] == bodies[1] && !bodies[0].is_empty();
        pass &= same;
        detail.push(format!("{name}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    report("c14", "thread-count independence", pass, detail.join(", "));
}
