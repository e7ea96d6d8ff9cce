//! Block-structured `key = value` text files.
//!
//! Records are separated by blank lines. `#` starts a comment. Each record
//! keeps the line number of every key so that later validation can point at
//! the offending line.
//!
//! ```text
//! # comment
//! name = Fe-57
//! e0_keV = 14.4129
//!
//! name = Dy-161
//! ...
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KvRecord {
    /// Line of the first key in the block.
    pub line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl KvRecord {
    pub fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

pub fn parse(source_name: &str, text: &str) -> Result<Vec<KvRecord>> {
    let mut records = Vec::new();
    let mut current: Option<KvRecord> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            // comment-only lines do not end a block
            if raw.trim().is_empty() {
                if let Some(rec) = current.take() {
                    records.push(rec);
                }
            }
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::DataFile {
                source_name: source_name.to_string(),
                line: line_no,
                message: format!("expected `key = value`, got {line:?}"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(Error::DataFile {
                source_name: source_name.to_string(),
                line: line_no,
                message: "empty key".into(),
            });
        }
        let rec = current.get_or_insert_with(|| KvRecord {
            line: line_no,
            ..Default::default()
        });
        if rec.entries.contains_key(key) {
            return Err(Error::DataFile {
                source_name: source_name.to_string(),
                line: line_no,
                message: format!("duplicate key {key:?} in record starting at line {}", rec.line),
            });
        }
        rec.entries.insert(key.to_string(), (value.to_string(), line_no));
    }
    if let Some(rec) = current {
        records.push(rec);
    }
    Ok(records)
}

/// Typed field access with line-numbered errors.
pub(crate) struct FieldReader<'a> {
    pub source_name: &'a str,
    pub record: &'a KvRecord,
}

impl FieldReader<'_> {
    fn err(&self, line: usize, message: String) -> Error {
        Error::DataFile {
            source_name: self.source_name.to_string(),
            line,
            message,
        }
    }

    pub fn string(&self, key: &str) -> Result<String> {
        self.record
            .get(key)
            .map(|(v, _)| v.to_string())
            .ok_or_else(|| self.err(self.record.line, format!("missing field {key:?}")))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (v, line) = self
            .record
            .get(key)
            .ok_or_else(|| self.err(self.record.line, format!("missing field {key:?}")))?;
        v.parse::<T>()
            .map_err(|_| self.err(line, format!("cannot parse {key} = {v:?}")))
    }

    pub fn parsed_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.record.get(key).is_none() {
            return Ok(default);
        }
        self.parsed(key)
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.record.get(key).map(|(_, l)| l).unwrap_or(self.record.line)
    }

    pub fn invalid(&self, key: &str, message: impl Into<String>) -> Error {
        self.err(self.line_of(key), message.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_blocks_and_tracks_lines() {
        let text = "# header\na = 1\nb = two # trailing\n\n\nc = 3\n";
        let recs = parse("t", text).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].get("b"), Some(("two", 3)));
        assert_eq!(recs[1].get("c"), Some(("3", 6)));
        assert_eq!(recs[1].line, 6);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse("f.kv", "a = 1\nnot a pair\n").unwrap_err();
        match err {
            Error::DataFile { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        let err = parse("f.kv", "a = 1\na = 2\n").unwrap_err();
        assert!(err.to_string().contains("f.kv:2"));
    }
}
