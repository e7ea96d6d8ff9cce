use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::kvfile::{self, FieldReader};

/// Largest stacking period (in layers) searched when deriving the order
/// selection rule from the interlayer offset.
const MAX_STACKING_PERIOD: u32 = 12;
const COMMENSURATE_TOL: f64 = 1e-9;

/// A (100) film: a square lattice of one emitter per cell, stacked with
/// interlayer displacement `(b_par, b_z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFilm {
    pub preset: String,
    pub a_nm: f64,
    pub b_par_nm: [f64; 2],
    pub b_z_nm: f64,
    pub n_layers: u32,
    stacking_period: u32,
}

impl LatticeFilm {
    pub fn new(preset: impl Into<String>, a_nm: f64, b_par_nm: [f64; 2], b_z_nm: f64) -> Result<Self> {
        let preset = preset.into();
        if !(a_nm > 0.0 && a_nm.is_finite()) {
            return domain(format!("{preset}: lattice period must be > 0, got {a_nm}"));
        }
        if !(b_z_nm > 0.0 && b_z_nm.is_finite()) {
            return domain(format!("{preset}: interlayer spacing must be > 0, got {b_z_nm}"));
        }
        if !b_par_nm.iter().all(|b| b.is_finite()) {
            return domain(format!("{preset}: non-finite in-plane offset"));
        }
        let stacking_period = (1..=MAX_STACKING_PERIOD)
            .find(|&l| {
                b_par_nm.iter().all(|&b| {
                    let x = l as f64 * b / a_nm;
                    (x - x.round()).abs() < COMMENSURATE_TOL
                })
            })
            .ok_or_else(|| {
                Error::Domain(format!(
                    "{preset}: in-plane offset {b_par_nm:?} is not a rational fraction of the period \
                     with denominator <= {MAX_STACKING_PERIOD}"
                ))
            })?;
        Ok(Self {
            preset,
            a_nm,
            b_par_nm,
            b_z_nm,
            n_layers: 1,
            stacking_period,
        })
    }

    pub fn with_layers(mut self, n_layers: u32) -> Self {
        self.n_layers = n_layers;
        self
    }

    /// Simple cubic (100), iron lattice constant.
    pub fn sc100() -> Self {
        Self::sc100_with(0.2856)
    }

    pub fn sc100_with(a: f64) -> Self {
        Self::new("sc100", a, [0.0, 0.0], a).expect("valid preset")
    }

    /// bcc (100), Fe.
    pub fn bcc100() -> Self {
        Self::bcc100_with(0.2856)
    }

    pub fn bcc100_with(a: f64) -> Self {
        Self::new("bcc100", a, [a / 2.0, a / 2.0], a / 2.0).expect("valid preset")
    }

    /// fcc (100) with emitters on one sublattice, DyN.
    pub fn fcc100() -> Self {
        Self::fcc100_with(0.36)
    }

    pub fn fcc100_with(a: f64) -> Self {
        Self::new("fcc100", a, [a / 2.0, a / 2.0], a / std::f64::consts::SQRT_2).expect("valid preset")
    }

    pub fn cell_area(&self) -> f64 {
        self.a_nm * self.a_nm
    }

    /// Number of layers after which the in-plane offset repeats.
    pub fn stacking_period(&self) -> u32 {
        self.stacking_period
    }

    /// Out-of-plane structural period `d`, which sets the cone angles.
    pub fn z_period(&self) -> f64 {
        self.stacking_period as f64 * self.b_z_nm
    }

    /// Residue class of `G = (2 pi / a)(i, j)` under the stacking phase
    /// `G . b_par`, in units of `2 pi / L`.
    pub fn offset_class(&self, i: i32, j: i32) -> i64 {
        let l = self.stacking_period as f64;
        let s = l * (i as f64 * self.b_par_nm[0] + j as f64 * self.b_par_nm[1]) / self.a_nm;
        (s.round() as i64).rem_euclid(self.stacking_period as i64)
    }

    /// Whether `G = (2 pi / a)(i, j)` contributes to the cone of order `n`.
    pub fn allows(&self, n: i32, i: i32, j: i32) -> bool {
        (n as i64 + self.offset_class(i, j)).rem_euclid(self.stacking_period as i64) == 0
    }
}

/// Named film geometries. Ships with `sc100`, `bcc100` and `fcc100`.
#[derive(Debug, Clone)]
pub struct LatticeRegistry {
    films: Vec<LatticeFilm>,
}

impl Default for LatticeRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl LatticeRegistry {
    pub fn builtin() -> Self {
        Self {
            films: vec![LatticeFilm::sc100(), LatticeFilm::bcc100(), LatticeFilm::fcc100()],
        }
    }

    pub fn films(&self) -> &[LatticeFilm] {
        &self.films
    }

    pub fn names(&self) -> Vec<&str> {
        self.films.iter().map(|f| f.preset.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&LatticeFilm> {
        self.films
            .iter()
            .find(|f| f.preset == name)
            .ok_or_else(|| Error::UnknownName {
                kind: "lattice",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn insert(&mut self, film: LatticeFilm) {
        match self.films.iter_mut().find(|f| f.preset == film.preset) {
            Some(slot) => *slot = film,
            None => self.films.push(film),
        }
    }

    /// Parses records with fields `preset, a_nm, b_par_x, b_par_y, b_z_nm`.
    pub fn parse_records(source_name: &str, text: &str) -> Result<Vec<LatticeFilm>> {
        let mut out = Vec::new();
        for record in kvfile::parse(source_name, text)? {
            let r = FieldReader {
                source_name,
                record: &record,
            };
            if let Some(unknown) = record
                .keys()
                .find(|k| !matches!(*k, "preset" | "a_nm" | "b_par_x" | "b_par_y" | "b_z_nm"))
            {
                return Err(r.invalid(unknown, format!("unknown field {unknown:?}")));
            }
            let film = LatticeFilm::new(
                r.string("preset")?,
                r.parsed("a_nm")?,
                [r.parsed("b_par_x")?, r.parsed("b_par_y")?],
                r.parsed("b_z_nm")?,
            )
            .map_err(|e| r.invalid("preset", e.to_string()))?;
            out.push(film);
        }
        Ok(out)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for film in Self::parse_records(&path.display().to_string(), &text)? {
            self.insert(film);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_geometry() {
        let bcc = LatticeFilm::bcc100();
        assert_eq!(bcc.stacking_period(), 2);
        assert!((bcc.z_period() - bcc.a_nm).abs() < 1e-15);

        let sc = LatticeFilm::sc100();
        assert_eq!(sc.stacking_period(), 1);
        assert_eq!(sc.z_period(), sc.a_nm);

        let fcc = LatticeFilm::fcc100();
        assert_eq!(fcc.stacking_period(), 2);
        assert!((fcc.z_period() - 0.36 * 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bcc_selection_is_parity() {
        let bcc = LatticeFilm::bcc100();
        for n in -3..4 {
            for i in -4..5 {
                for j in -4..5 {
                    assert_eq!(bcc.allows(n, i, j), (n + i + j).rem_euclid(2) == 0);
                }
            }
        }
        let sc = LatticeFilm::sc100();
        assert!((-3..4).all(|n| sc.allows(n, 1, 0) && sc.allows(n, 1, 1)));
    }

    #[test]
    fn derived_rule_for_other_offsets() {
        // offset a/3 along x: G.b = 2 pi i / 3
        let f = LatticeFilm::new("tri", 0.3, [0.1, 0.0], 0.2).unwrap();
        assert_eq!(f.stacking_period(), 3);
        assert!((f.z_period() - 0.6).abs() < 1e-15);
        assert!(f.allows(2, 1, 5));
        assert!(!f.allows(1, 1, 0));
        assert!(LatticeFilm::new("bad", 0.3, [0.3 / std::f64::consts::PI, 0.0], 0.2).is_err());
        assert!(LatticeFilm::new("bad", -0.3, [0.0, 0.0], 0.2).is_err());
    }

    #[test]
    fn registry_file_round_trip() {
        let text = "preset = dy-sc\na_nm = 0.36\nb_par_x = 0\nb_par_y = 0\nb_z_nm = 0.36\n";
        let films = LatticeRegistry::parse_records("l.kv", text).unwrap();
        assert_eq!(films[0].stacking_period(), 1);
        let mut reg = LatticeRegistry::builtin();
        reg.insert(films[0].clone());
        assert!(reg.get("dy-sc").is_ok());
        let err = reg.get("hcp0001").unwrap_err().to_string();
        assert!(err.contains("bcc100"), "{err}");
        assert!(LatticeRegistry::parse_records("l.kv", &text.replace("b_z_nm", "bz")).is_err());
    }
}
