use std::path::Path;

use super::NuclideRecord;
use crate::error::{Error, Result};
use crate::kvfile::{self, FieldReader};

/// Named nuclide records. Ships with Fe-57 and Dy-161; more can be loaded
/// from key/value data files.
#[derive(Debug, Clone)]
pub struct NuclideRegistry {
    records: Vec<NuclideRecord>,
}

impl Default for NuclideRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl NuclideRegistry {
    pub fn builtin() -> Self {
        Self {
            records: vec![NuclideRecord::fe57(), NuclideRecord::dy161()],
        }
    }

    pub fn records(&self) -> &[NuclideRecord] {
        &self.records
    }

    pub fn names(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&NuclideRecord> {
        self.records
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::UnknownName {
                kind: "nuclide",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    /// Adds or replaces (by name) a record.
    pub fn insert(&mut self, rec: NuclideRecord) {
        match self.records.iter_mut().find(|r| r.name == rec.name) {
            Some(slot) => *slot = rec,
            None => self.records.push(rec),
        }
    }

    /// Parses records with fields `name, e0_keV, lifetime_s, alpha_ic, jg2,
    /// je2[, branch_divisor]`.
    pub fn parse_records(source_name: &str, text: &str) -> Result<Vec<NuclideRecord>> {
        let mut out = Vec::new();
        for record in kvfile::parse(source_name, text)? {
            let r = FieldReader {
                source_name,
                record: &record,
            };
            let rec = NuclideRecord {
                name: r.string("name")?,
                e0_kev: r.parsed("e0_keV")?,
                lifetime_s: r.parsed("lifetime_s")?,
                alpha_ic: r.parsed("alpha_ic")?,
                jg2: r.parsed("jg2")?,
                je2: r.parsed("je2")?,
                branch_divisor: r.parsed_or("branch_divisor", 1.0)?,
            };
            if let Err(e) = rec.validate() {
                return Err(r.invalid("name", e.to_string()));
            }
            if let Some(unknown) = record.keys().find(|k| {
                !matches!(
                    *k,
                    "name" | "e0_keV" | "lifetime_s" | "alpha_ic" | "jg2" | "je2" | "branch_divisor"
                )
            }) {
                return Err(r.invalid(unknown, format!("unknown field {unknown:?}")));
            }
            out.push(rec);
        }
        Ok(out)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        for rec in Self::parse_records(&path.display().to_string(), &text)? {
            self.insert(rec);
        }
        Ok(())
    }
}
