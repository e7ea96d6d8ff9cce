//! Scenario configuration: a TOML document validated into a fully resolved
//! [`ScenarioConfig`], or an exhaustive list of problems.

use std::fmt;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use crate::crystal_sp::{CutoffKind, LatticeFilm, LatticeRegistry};
use crate::nuclide::{NuclideRecord, NuclideRegistry};
use crate::numerics::constants::{ELECTRON_MASS_EV, PROTON_MASS_EV};
use crate::probe::{beta_from_kinetic, estimate_r_min};

pub const DEFAULT_ORDER_CAP: i32 = 12;
pub const DEFAULT_ANGULAR_TOL: f64 = 1e-8;
pub const DEFAULT_WINDOW_EV: f64 = 1.0;
pub const DEFAULT_Z_NUCLEUS: u32 = 26;
pub const DEFAULT_ANGULAR_POINTS: usize = 2001;
pub const DEFAULT_SPECTRAL_POINTS: usize = 201;
pub const DEFAULT_TIME_POINTS: usize = 201;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    NuclideInfo,
    SingleSweep,
    ArrayPattern,
    CrystalYield,
    BremsCompare,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::NuclideInfo,
        Scenario::SingleSweep,
        Scenario::ArrayPattern,
        Scenario::CrystalYield,
        Scenario::BremsCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::NuclideInfo => "nuclide-info",
            Scenario::SingleSweep => "single-sweep",
            Scenario::ArrayPattern => "array-pattern",
            Scenario::CrystalYield => "crystal-yield",
            Scenario::BremsCompare => "brems-compare",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|sc| sc.name() == s)
    }
}

/// Probe species and the velocities to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub charge: i32,
    pub rest_energy_ev: f64,
    pub betas: Vec<f64>,
}

/// Where the minimum beam-nucleus distances come from.
#[derive(Debug, Clone, PartialEq)]
pub struct RMinSpec {
    pub r_min_nm: f64,
    /// Set when the closed-form estimate was clamped to its floor.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub r_perp_nm: Vec<f64>,
    pub film: Option<LatticeFilm>,
    pub r_min: Vec<RMinSpec>,
    pub cutoff: CutoffKind,
    pub array_length: usize,
    pub array_period_nm: f64,
    pub standoff_nm: f64,
    pub z_nucleus: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub angular_points: usize,
    pub order_cap: Option<i32>,
    pub angular_tol: f64,
    pub window_ev: f64,
    pub spectral_points: usize,
    /// Half-width of the spectral table around the line, eV.
    pub spectral_span_ev: f64,
    pub time_points: usize,
    /// End of the temporal table in units of the excited-state lifetime.
    pub time_span_lifetimes: f64,
}

/// A validated scenario with every default applied and every name resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub nuclide: NuclideRecord,
    pub probe: ProbeSpec,
    pub geometry: Geometry,
    pub output: OutputSpec,
}

/// One validation problem, located by field path or by line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Registries against which names in a config are resolved.
#[derive(Debug, Clone, Default)]
pub struct DataContext {
    pub nuclides: NuclideRegistry,
    pub lattices: LatticeRegistry,
}

impl DataContext {
    /// Built-in records, extended by `nuclides.kv` and `lattices.kv` from
    /// `dir` when present.
    pub fn with_data_dir(dir: Option<&Path>) -> crate::Result<Self> {
        let mut ctx = Self::default();
        if let Some(dir) = dir {
            let n = dir.join("nuclides.kv");
            if n.is_file() {
                ctx.nuclides.load_file(&n)?;
            }
            let l = dir.join("lattices.kv");
            if l.is_file() {
                ctx.lattices.load_file(&l)?;
            }
        }
        Ok(ctx)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

/// Collects issues while reading typed fields out of a TOML tree.
struct Walker {
    issues: Vec<ConfigIssue>,
}

impl Walker {
    fn issue(&mut self, path: &str, message: impl Into<String>) {
        self.issues.push(ConfigIssue {
            location: path.to_string(),
            message: message.into(),
        });
    }

    fn check_keys(&mut self, table: &Table, prefix: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let path = join(prefix, key);
                self.issue(&path, format!("unknown field; expected one of: {}", allowed.join(", ")));
            }
        }
    }

    fn table<'a>(&mut self, root: &'a Table, key: &str) -> Option<&'a Table> {
        match root.get(key) {
            None => None,
            Some(Value::Table(t)) => Some(t),
            Some(_) => {
                self.issue(key, "must be a table");
                None
            }
        }
    }

    fn float(&mut self, table: Option<&Table>, prefix: &str, key: &str) -> Option<f64> {
        let path = join(prefix, key);
        match table?.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => {
                self.issue(&path, "must be a number");
                None
            }
        }
    }

    fn int(&mut self, table: Option<&Table>, prefix: &str, key: &str) -> Option<i64> {
        let path = join(prefix, key);
        match table?.get(key)? {
            Value::Integer(i) => Some(*i),
            _ => {
                self.issue(&path, "must be an integer");
                None
            }
        }
    }

    fn string(&mut self, table: Option<&Table>, prefix: &str, key: &str) -> Option<String> {
        let path = join(prefix, key);
        match table?.get(key)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.issue(&path, "must be a string");
                None
            }
        }
    }

    /// A strictly monotone, non-empty list of finite numbers.
    fn grid(&mut self, table: Option<&Table>, prefix: &str, key: &str) -> Option<Vec<f64>> {
        let path = join(prefix, key);
        let Value::Array(items) = table?.get(key)? else {
            self.issue(&path, "must be an array of numbers");
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, v) in items.iter().enumerate() {
            match v {
                Value::Float(x) if x.is_finite() => out.push(*x),
                Value::Integer(n) => out.push(*n as f64),
                _ => {
                    self.issue(&format!("{path}[{i}]"), "must be a finite number");
                    return None;
                }
            }
        }
        if out.is_empty() {
            self.issue(&path, "grid must not be empty");
            return None;
        }
        let up = out.windows(2).all(|w| w[1] > w[0]);
        let down = out.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            self.issue(&path, "grid must be strictly monotone");
            return None;
        }
        Some(out)
    }

    fn positive(&mut self, path: &str, x: f64) -> bool {
        if x > 0.0 && x.is_finite() {
            true
        } else {
            self.issue(path, format!("must be > 0, got {x}"));
            false
        }
    }

    fn count(&mut self, table: Option<&Table>, prefix: &str, key: &str, default: usize, min: usize) -> usize {
        match self.int(table, prefix, key) {
            None => default,
            Some(n) if n >= min as i64 => n as usize,
            Some(n) => {
                self.issue(&join(prefix, key), format!("must be >= {min}, got {n}"));
                default
            }
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

/// Parses and validates a config, resolving names against `ctx`.
pub fn validate_config(text: &str, ctx: &DataContext) -> Result<ScenarioConfig, ConfigErrors> {
    let root: Table = match toml::from_str(text) {
        Ok(t) => t,
        Err(e) => {
            let location = match e.span() {
                Some(span) => {
                    let (l, c) = line_col(text, span.start);
                    format!("line {l}, column {c}")
                }
                None => "config".to_string(),
            };
            return Err(ConfigErrors(vec![ConfigIssue {
                location,
                message: e.message().trim().to_string(),
            }]));
        }
    };
    let mut w = Walker { issues: Vec::new() };
    w.check_keys(&root, "", &["scenario", "nuclide", "probe", "geometry", "output"]);

    let scenario = match w.string(Some(&root), "", "scenario") {
        None => {
            if !root.contains_key("scenario") {
                w.issue("scenario", "missing; expected one of: nuclide-info, single-sweep, array-pattern, crystal-yield, brems-compare");
            }
            None
        }
        Some(s) => {
            let sc = Scenario::from_name(&s);
            if sc.is_none() {
                w.issue(
                    "scenario",
                    format!("unknown scenario {s:?}; expected one of: nuclide-info, single-sweep, array-pattern, crystal-yield, brems-compare"),
                );
            }
            sc
        }
    };

    let nuclide_name = w.string(Some(&root), "", "nuclide").unwrap_or_else(|| "Fe-57".to_string());
    let nuclide = match ctx.nuclides.get(&nuclide_name) {
        Ok(r) => Some(r.clone()),
        Err(e) => {
            w.issue("nuclide", e.to_string());
            None
        }
    };

    let probe = read_probe(&mut w, &root);
    let geometry = read_geometry(&mut w, &root, ctx, scenario);
    let output = read_output(&mut w, &root);

    if let (Some(sc), Some(p)) = (scenario, probe.as_ref()) {
        if matches!(sc, Scenario::ArrayPattern | Scenario::BremsCompare) && p.betas.len() != 1 {
            w.issue("probe", format!("{} takes a single velocity, got {}", sc.name(), p.betas.len()));
        }
    }
    if let (Some(Scenario::BremsCompare), Some(g)) = (scenario, geometry.as_ref()) {
        if g.r_perp_nm.len() != 1 {
            w.issue("geometry.r_perp_nm", "brems-compare takes a single distance");
        }
    }

    match (w.issues.is_empty(), scenario, nuclide, probe, geometry, output) {
        (true, Some(scenario), Some(nuclide), Some(probe), Some(geometry), Some(output)) => Ok(ScenarioConfig {
            scenario,
            nuclide,
            probe,
            geometry,
            output,
        }),
        _ => {
            debug_assert!(!w.issues.is_empty());
            Err(ConfigErrors(w.issues))
        }
    }
}

fn read_probe(w: &mut Walker, root: &Table) -> Option<ProbeSpec> {
    const P: &str = "probe";
    let t = w.table(root, P);
    if let Some(t) = t {
        w.check_keys(
            t,
            P,
            &["species", "charge", "rest_energy_eV", "beta", "beta_grid", "kinetic_energy_eV"],
        );
    }
    let mut ok = true;
    let species = w.string(t, P, "species");
    let (mut charge, mut rest) = match species.as_deref() {
        None => (None, None),
        Some("electron") => (Some(-1), Some(ELECTRON_MASS_EV)),
        Some("positron") => (Some(1), Some(ELECTRON_MASS_EV)),
        Some("proton") => (Some(1), Some(PROTON_MASS_EV)),
        Some(other) => {
            w.issue("probe.species", format!("unknown species {other:?}; expected electron, positron or proton"));
            ok = false;
            (None, None)
        }
    };
    if let Some(c) = w.int(t, P, "charge") {
        if c == 0 || c.abs() > 200 {
            w.issue("probe.charge", format!("must be a nonzero charge number, got {c}"));
            ok = false;
        }
        charge = Some(c as i32);
    }
    if let Some(m) = w.float(t, P, "rest_energy_eV") {
        ok &= w.positive("probe.rest_energy_eV", m);
        rest = Some(m);
    }
    let (charge, rest) = match (charge, rest) {
        (Some(c), Some(m)) => (c, m),
        _ => {
            if ok && species.is_none() {
                w.issue(P, "set species, or both charge and rest_energy_eV");
            }
            return None;
        }
    };

    let beta = w.float(t, P, "beta");
    let grid = w.grid(t, P, "beta_grid");
    let kinetic = w.float(t, P, "kinetic_energy_eV");
    let from_grid = grid.is_some();
    let given = [beta.is_some(), grid.is_some(), kinetic.is_some()].iter().filter(|b| **b).count();
    let present = ["beta", "beta_grid", "kinetic_energy_eV"]
        .iter()
        .filter(|k| t.is_some_and(|t| t.contains_key(**k)))
        .count();
    if given == 0 && present == 0 {
        w.issue(P, "set one of beta, beta_grid or kinetic_energy_eV");
        return None;
    }
    if present > 1 {
        w.issue(P, "beta, beta_grid and kinetic_energy_eV are mutually exclusive");
        return None;
    }
    let betas = if let Some(b) = beta {
        vec![b]
    } else if let Some(g) = grid {
        g
    } else {
        let k = kinetic?;
        if !w.positive("probe.kinetic_energy_eV", k) {
            return None;
        }
        match beta_from_kinetic(k, rest) {
            Ok(b) => vec![b],
            Err(e) => {
                w.issue("probe.kinetic_energy_eV", e.to_string());
                return None;
            }
        }
    };
    let field = if beta.is_some() { "probe.beta" } else { "probe.beta_grid" };
    for (i, b) in betas.iter().enumerate() {
        let path = if from_grid { format!("{field}[{i}]") } else { field.to_string() };
        if *b >= 1.0 {
            w.issue(&path, format!("beta must be < 1, got {b}"));
            ok = false;
        } else if !(*b > 0.0) {
            w.issue(&path, format!("beta must be > 0, got {b}"));
            ok = false;
        }
    }
    ok.then_some(ProbeSpec {
        charge,
        rest_energy_ev: rest,
        betas,
    })
}

fn read_geometry(w: &mut Walker, root: &Table, ctx: &DataContext, scenario: Option<Scenario>) -> Option<Geometry> {
    const G: &str = "geometry";
    let t = w.table(root, G);
    if let Some(t) = t {
        w.check_keys(
            t,
            G,
            &[
                "r_perp_nm",
                "r_perp_grid_nm",
                "lattice",
                "n_layers",
                "r_min_nm",
                "r_min_grid_nm",
                "r_min_estimate",
                "cutoff",
                "array_length",
                "array_period_nm",
                "standoff_nm",
                "z_nucleus",
            ],
        );
    }
    let mut ok = true;

    let single = w.float(t, G, "r_perp_nm");
    let grid = w.grid(t, G, "r_perp_grid_nm");
    let r_perp_nm = match (single, grid) {
        (Some(_), Some(_)) => {
            w.issue("geometry", "r_perp_nm and r_perp_grid_nm are mutually exclusive");
            ok = false;
            vec![]
        }
        (Some(r), None) => vec![r],
        (None, Some(g)) => g,
        (None, None) => vec![0.001],
    };
    for (i, r) in r_perp_nm.iter().enumerate() {
        ok &= w.positive(&format!("geometry.r_perp_nm[{i}]"), *r);
    }

    let needs_film = scenario == Some(Scenario::CrystalYield);
    let film = match w.string(t, G, "lattice") {
        Some(name) => match ctx.lattices.get(&name) {
            Ok(f) => Some(f.clone()),
            Err(e) => {
                w.issue("geometry.lattice", e.to_string());
                ok = false;
                None
            }
        },
        None if needs_film => {
            w.issue("geometry.lattice", format!("required; available: {}", ctx.lattices.names().join(", ")));
            ok = false;
            None
        }
        None => None,
    };
    let film = match (film, w.int(t, G, "n_layers")) {
        (Some(f), Some(n)) if n >= 1 && n <= u32::MAX as i64 => Some(f.with_layers(n as u32)),
        (Some(_), Some(n)) => {
            w.issue("geometry.n_layers", format!("must be >= 1, got {n}"));
            ok = false;
            None
        }
        (f, _) => f,
    };

    let r_min = read_r_min(w, t, &mut ok, needs_film);

    let cutoff = match w.string(t, G, "cutoff").as_deref() {
        None | Some("hard") => CutoffKind::Hard,
        Some("smooth") => CutoffKind::Smooth,
        Some(other) => {
            w.issue("geometry.cutoff", format!("unknown cutoff {other:?}; expected hard or smooth"));
            ok = false;
            CutoffKind::Hard
        }
    };

    let array_length = w.count(t, G, "array_length", 10, 2);
    let array_period_nm = w.float(t, G, "array_period_nm").unwrap_or(0.286);
    ok &= w.positive("geometry.array_period_nm", array_period_nm);
    let standoff_nm = w.float(t, G, "standoff_nm").unwrap_or(0.01);
    ok &= w.positive("geometry.standoff_nm", standoff_nm);
    let z_nucleus = match w.int(t, G, "z_nucleus") {
        None => DEFAULT_Z_NUCLEUS,
        Some(z) if (1..=200).contains(&z) => z as u32,
        Some(z) => {
            w.issue("geometry.z_nucleus", format!("must be in 1..=200, got {z}"));
            ok = false;
            DEFAULT_Z_NUCLEUS
        }
    };

    ok.then_some(Geometry {
        r_perp_nm,
        film,
        r_min,
        cutoff,
        array_length,
        array_period_nm,
        standoff_nm,
        z_nucleus,
    })
}

fn read_r_min(w: &mut Walker, t: Option<&Table>, ok: &mut bool, required: bool) -> Vec<RMinSpec> {
    const G: &str = "geometry";
    let single = w.float(t, G, "r_min_nm");
    let grid = w.grid(t, G, "r_min_grid_nm");
    let estimate = t.and_then(|t| t.get("r_min_estimate"));
    let given = single.is_some() as u8 + grid.is_some() as u8 + estimate.is_some() as u8;
    if given > 1 {
        w.issue("geometry", "r_min_nm, r_min_grid_nm and r_min_estimate are mutually exclusive");
        *ok = false;
        return vec![];
    }
    if let Some(r) = single {
        *ok &= w.positive("geometry.r_min_nm", r);
        return vec![RMinSpec { r_min_nm: r, clamped: false }];
    }
    if let Some(g) = grid {
        for (i, r) in g.iter().enumerate() {
            *ok &= w.positive(&format!("geometry.r_min_grid_nm[{i}]"), *r);
        }
        return g.into_iter().map(|r| RMinSpec { r_min_nm: r, clamped: false }).collect();
    }
    if let Some(v) = estimate {
        const E: &str = "geometry.r_min_estimate";
        let Value::Table(et) = v else {
            w.issue(E, "must be a table");
            *ok = false;
            return vec![];
        };
        w.check_keys(et, E, &["theta_inc_rad", "kinetic_energy_eV", "z_row", "a_nm"]);
        let theta = w.float(Some(et), E, "theta_inc_rad");
        let energy = w.float(Some(et), E, "kinetic_energy_eV");
        let z_row = w.int(Some(et), E, "z_row").unwrap_or(DEFAULT_Z_NUCLEUS as i64);
        let a = w.float(Some(et), E, "a_nm").unwrap_or(0.2856);
        let (Some(theta), Some(energy)) = (theta, energy) else {
            w.issue(E, "needs theta_inc_rad and kinetic_energy_eV");
            *ok = false;
            return vec![];
        };
        if z_row < 1 {
            w.issue(&format!("{E}.z_row"), "must be >= 1");
            *ok = false;
            return vec![];
        }
        return match estimate_r_min(theta, energy, z_row as u32, a) {
            Ok(est) => vec![RMinSpec {
                r_min_nm: est.r_min_nm,
                clamped: est.clamped,
            }],
            Err(e) => {
                w.issue(E, e.to_string());
                *ok = false;
                vec![]
            }
        };
    }
    if required {
        w.issue("geometry.r_min_nm", "required (or r_min_grid_nm / r_min_estimate)");
        *ok = false;
    }
    vec![]
}

fn read_output(w: &mut Walker, root: &Table) -> Option<OutputSpec> {
    const O: &str = "output";
    let t = w.table(root, O);
    if let Some(t) = t {
        w.check_keys(
            t,
            O,
            &[
                "path",
                "format",
                "angular_points",
                "order_cap",
                "angular_tol",
                "window_eV",
                "spectral_points",
                "spectral_span_eV",
                "time_points",
                "time_span_lifetimes",
            ],
        );
    }
    let mut ok = true;
    let path = w.string(t, O, "path").map(PathBuf::from);
    if let Some(fmt) = w.string(t, O, "format") {
        if fmt != "csv" {
            w.issue("output.format", format!("unsupported format {fmt:?}; only csv is available"));
            ok = false;
        }
    }
    let angular_points = w.count(t, O, "angular_points", DEFAULT_ANGULAR_POINTS, 3);
    let order_cap = match w.int(t, O, "order_cap") {
        None => Some(DEFAULT_ORDER_CAP),
        Some(0) => None,
        Some(n) if n > 0 && n <= i32::MAX as i64 => Some(n as i32),
        Some(n) => {
            w.issue("output.order_cap", format!("must be >= 0 (0 disables the cap), got {n}"));
            ok = false;
            None
        }
    };
    let angular_tol = w.float(t, O, "angular_tol").unwrap_or(DEFAULT_ANGULAR_TOL);
    if !(angular_tol > 0.0 && angular_tol < 0.1) {
        w.issue("output.angular_tol", format!("must lie in (0, 0.1), got {angular_tol}"));
        ok = false;
    }
    let window_ev = w.float(t, O, "window_eV").unwrap_or(DEFAULT_WINDOW_EV);
    ok &= w.positive("output.window_eV", window_ev);
    let spectral_points = w.count(t, O, "spectral_points", DEFAULT_SPECTRAL_POINTS, 2);
    let spectral_span_ev = w.float(t, O, "spectral_span_eV").unwrap_or(1e-7);
    ok &= w.positive("output.spectral_span_eV", spectral_span_ev);
    let time_points = w.count(t, O, "time_points", DEFAULT_TIME_POINTS, 2);
    let time_span_lifetimes = w.float(t, O, "time_span_lifetimes").unwrap_or(5.0);
    ok &= w.positive("output.time_span_lifetimes", time_span_lifetimes);
    ok.then_some(OutputSpec {
        path,
        angular_points,
        order_cap,
        angular_tol,
        window_ev,
        spectral_points,
        spectral_span_ev,
        time_points,
        time_span_lifetimes,
    })
}
