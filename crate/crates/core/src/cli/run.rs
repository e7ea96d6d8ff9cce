//! Scenario execution. Grid points are computed independently on the current
//! rayon pool and collected in grid order, so tables do not depend on the
//! number of worker threads.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{Scenario, ScenarioConfig};
use super::table::ResultTable;
use crate::brems::{br_duration, br_spectral_density_per_ev, br_window_yield};
use crate::crystal_sp::{layer_yield_with, reciprocal_vectors, sp_angles, CutoffPolicy, YieldOptions};
use crate::error::{Error, Result};
use crate::finite_array::{linear_array_pattern, uniform_cos_grid};
use crate::nuclide::{coherent_fraction, radiative_rate, surd::ratio_to_f64};
use crate::numerics::constants::HBAR_EV_S;
use crate::probe::Probe;
use crate::single_nucleus::{coherent_yield, decay_profile, spectral_profile};

/// Tables produced by one run. The first is the primary table; the others
/// are written next to it as `<stem>.<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub primary: ResultTable,
    pub extra: Vec<(String, ResultTable)>,
}

impl ScenarioOutput {
    fn tables_mut(&mut self) -> impl Iterator<Item = &mut ResultTable> {
        std::iter::once(&mut self.primary).chain(self.extra.iter_mut().map(|(_, t)| t))
    }
}

/// Run-level information recorded in every table header.
#[derive(Debug, Clone, Default)]
pub struct RunInfo {
    pub config_text: String,
    pub seed: u64,
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn probe_at(cfg: &ScenarioConfig, beta: f64) -> Result<Probe> {
    Probe::new(cfg.probe.charge, cfg.probe.rest_energy_ev, beta)
}

/// Computes the tables for a validated config on the current rayon pool.
pub fn run_scenario(cfg: &ScenarioConfig, info: &RunInfo) -> Result<ScenarioOutput> {
    let started = Instant::now();
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let mut out = match cfg.scenario {
        Scenario::NuclideInfo => nuclide_info(cfg)?,
        Scenario::SingleSweep => single_sweep(cfg)?,
        Scenario::ArrayPattern => array_pattern(cfg)?,
        Scenario::CrystalYield => crystal_yield(cfg)?,
        Scenario::BremsCompare => brems_compare(cfg)?,
    };
    let hash = config_hash(&info.config_text);
    let elapsed = started.elapsed().as_secs_f64();
    for t in out.tables_mut() {
        let mut head = ResultTable::default();
        head.meta("scenario", cfg.scenario.name());
        head.meta("nuclide", &cfg.nuclide.name);
        head.meta("version", crate::VERSION);
        head.meta("config_sha256", &hash);
        head.meta("seed", info.seed);
        head.metadata.append(&mut t.metadata);
        head.meta("started_unix_s", unix);
        head.meta("wall_clock_s", format!("{elapsed:.3}"));
        t.metadata = head.metadata;
    }
    Ok(out)
}

/// Writes the tables of `output`. The primary table goes to `primary`.
pub fn write_outputs(output: &ScenarioOutput, primary: &Path) -> Result<Vec<PathBuf>> {
    let mut written = vec![primary.to_path_buf()];
    output.primary.write_file(primary)?;
    let stem = primary.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let dir = primary.parent().unwrap_or(Path::new(""));
    for (name, table) in &output.extra {
        let path = dir.join(format!("{stem}.{name}.csv"));
        table.write_file(&path)?;
        written.push(path);
    }
    Ok(written)
}

fn nuclide_info(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let rec = &cfg.nuclide;
    let f = coherent_fraction(rec.jg2, rec.je2)?;
    let kr = radiative_rate(rec)?;
    let mut t = ResultTable::new(&[
        "e0[keV]",
        "wavelength[nm]",
        "lifetime[s]",
        "alpha_ic[dimensionless]",
        "jg[doubled]",
        "je[doubled]",
        "coherent_fraction[dimensionless]",
        "radiative_lifetime[s]",
        "fwhm[eV]",
    ]);
    t.meta("coherent_fraction_exact", f);
    t.push(vec![
        rec.e0_kev,
        rec.wavelength_nm(),
        rec.lifetime_s,
        rec.alpha_ic,
        rec.jg2 as f64,
        rec.je2 as f64,
        ratio_to_f64(&f),
        1.0 / kr,
        spectral_profile(rec).fwhm_ev,
    ])?;
    Ok(ScenarioOutput {
        primary: t,
        extra: vec![],
    })
}

fn single_sweep(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let points: Vec<(f64, f64)> = cfg
        .probe
        .betas
        .iter()
        .flat_map(|&b| g.r_perp_nm.iter().map(move |&r| (b, r)))
        .collect();
    let center = cfg.nuclide.e0_kev * 1e3;
    let rows = points
        .par_iter()
        .map(|&(beta, r)| {
            let p = probe_at(cfg, beta)?;
            Ok(vec![
                beta,
                p.gamma(),
                r,
                coherent_yield(&p, &cfg.nuclide, r)?,
                br_window_yield(&p, g.z_nucleus, r, center, cfg.output.window_ev)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(&[
        "beta[dimensionless]",
        "gamma[dimensionless]",
        "r_perp[nm]",
        "coherent_yield[probability]",
        "br_window_yield[probability]",
    ]);
    t.meta("window_eV", cfg.output.window_ev);
    t.meta("z_nucleus", g.z_nucleus);
    for row in rows {
        t.push(row)?;
    }
    Ok(ScenarioOutput {
        primary: t,
        extra: vec![],
    })
}

fn array_pattern(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let p = probe_at(cfg, cfg.probe.betas[0])?;
    let thetas = uniform_cos_grid(cfg.output.angular_points);
    let grid = linear_array_pattern(&p, &cfg.nuclide, g.array_length, g.array_period_nm, g.standoff_nm, &thetas)?;
    let cones = sp_angles(p.beta(), g.array_period_nm, cfg.nuclide.wavelength_nm())?;
    let mut t = ResultTable::new(&["cos_theta[dimensionless]", "theta[rad]", "density[1/sr]"]);
    t.meta("beta", p.beta());
    t.meta("array_length", g.array_length);
    t.meta("array_period_nm", g.array_period_nm);
    t.meta("standoff_nm", g.standoff_nm);
    t.meta(
        "cones",
        cones
            .iter()
            .map(|c| format!("{}:{}", c.n, c.cos_theta))
            .collect::<Vec<_>>()
            .join(" "),
    );
    for (theta, row) in grid.thetas.iter().zip(&grid.values) {
        t.push(vec![theta.cos(), *theta, row[0]])?;
    }
    Ok(ScenarioOutput {
        primary: t,
        extra: vec![],
    })
}

fn crystal_yield(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let film = g
        .film
        .as_ref()
        .ok_or_else(|| Error::Domain("crystal-yield needs a lattice".into()))?;
    let points: Vec<(usize, f64)> = g
        .r_min
        .iter()
        .enumerate()
        .flat_map(|(i, _)| cfg.probe.betas.iter().map(move |&b| (i, b)))
        .collect();
    let opts = YieldOptions {
        order_cap: cfg.output.order_cap,
        rel_tol: cfg.output.angular_tol,
    };
    let z2 = (cfg.probe.charge as f64).powi(2);
    let layers = film.n_layers as f64;
    let blocks = points
        .par_iter()
        .map(|&(i, beta)| {
            let spec = &g.r_min[i];
            let policy = CutoffPolicy::new(spec.r_min_nm, g.cutoff)?;
            let p = probe_at(cfg, beta)?;
            let y = layer_yield_with(&p, &cfg.nuclide, film, &policy, &opts)?;
            let clamped = if spec.clamped { 1.0 } else { 0.0 };
            let mut rows = Vec::with_capacity(y.orders.len() + 1);
            for o in &y.orders {
                let empty = reciprocal_vectors(film, o.n, &policy).empty_warning;
                rows.push(vec![
                    spec.r_min_nm,
                    beta,
                    o.n as f64,
                    o.cos_theta,
                    o.yield_per_layer_per_z2,
                    o.yield_per_layer_per_z2 * z2 * layers,
                    clamped,
                    if empty { 1.0 } else { 0.0 },
                ]);
            }
            rows.push(vec![
                spec.r_min_nm,
                beta,
                0.0,
                0.0,
                y.total_per_layer_per_z2,
                y.total_per_layer_per_z2 * z2 * layers,
                clamped,
                0.0,
            ]);
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(&[
        "r_min[nm]",
        "beta[dimensionless]",
        "order[integer]",
        "cos_theta[dimensionless]",
        "yield_per_layer_per_Z2[dimensionless]",
        "yield_per_particle[probability]",
        "r_min_clamped[flag]",
        "empty_cutoff[flag]",
    ]);
    t.meta("lattice", &film.preset);
    t.meta("n_layers", film.n_layers);
    t.meta("cutoff", format!("{:?}", g.cutoff).to_lowercase());
    t.meta(
        "order_cap",
        cfg.output.order_cap.map_or("none".to_string(), |c| c.to_string()),
    );
    t.meta("total_rows", "order 0 holds the sum over orders; its cos_theta is 0");
    for row in blocks.into_iter().flatten() {
        t.push(row)?;
    }
    Ok(ScenarioOutput {
        primary: t,
        extra: vec![],
    })
}

fn brems_compare(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    let g = &cfg.geometry;
    let rec = &cfg.nuclide;
    let p = probe_at(cfg, cfg.probe.betas[0])?;
    let r = g.r_perp_nm[0];
    let center = rec.e0_kev * 1e3;
    let nuclear = coherent_yield(&p, rec, r)?;
    let line = spectral_profile(rec);
    let br_window = br_window_yield(&p, g.z_nucleus, r, center, cfg.output.window_ev)?;
    let tau_br = br_duration(&p, r);

    let o = &cfg.output;
    let detunings: Vec<f64> = (0..o.spectral_points)
        .map(|i| -o.spectral_span_ev + 2.0 * o.spectral_span_ev * i as f64 / (o.spectral_points - 1) as f64)
        .collect();
    let spectral_rows = detunings
        .par_iter()
        .map(|&d| {
            Ok(vec![
                d,
                nuclear * line.density_at_detuning(d),
                br_spectral_density_per_ev(&p, g.z_nucleus, r, center + d)?,
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut spectral = ResultTable::new(&["detuning[eV]", "nuclear_density[1/eV]", "br_density[1/eV]"]);
    spectral.meta("beta", p.beta());
    spectral.meta("r_perp_nm", r);
    spectral.meta("z_nucleus", g.z_nucleus);
    spectral.meta("center_eV", center);
    spectral.meta("coherent_yield", nuclear);
    spectral.meta("br_window_yield", br_window);
    spectral.meta("window_eV", o.window_ev);
    for row in spectral_rows {
        spectral.push(row)?;
    }

    let decay = decay_profile(rec);
    let t_end = o.time_span_lifetimes / decay.rate_s;
    let mut temporal = ResultTable::new(&[
        "time[s]",
        "nuclear_rate[1/s]",
        "nuclear_cumulative[probability]",
        "br_cumulative[probability]",
    ]);
    temporal.meta("br_duration_s", tau_br);
    temporal.meta("br_model", "prompt flash spread uniformly over R/(v gamma)");
    temporal.meta("hbar_eV_s", HBAR_EV_S);
    for i in 0..o.time_points {
        let t = t_end * i as f64 / (o.time_points - 1) as f64;
        temporal.push(vec![
            t,
            nuclear * decay.density(t),
            nuclear * (1.0 - decay.survival(t)),
            br_window * (t / tau_br).min(1.0),
        ])?;
    }
    Ok(ScenarioOutput {
        primary: spectral,
        extra: vec![("temporal".to_string(), temporal)],
    })
}
