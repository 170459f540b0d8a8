use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use fbms::verify::IdentityReport;

/// A float written with 17 significant digits; non-finite values become
/// `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            String::new()
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        RawValue::from_string(self.text())
            .map_err(S::Error::custom)?
            .serialize(serializer)
    }
}

pub fn nums(v: &[f64]) -> Vec<Num> {
    v.iter().copied().map(Num).collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Field {
    Bool(bool),
    Int(i64),
    Num(Num),
    Text(String),
    List(Vec<Field>),
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as i64)
    }
}

impl From<u32> for Field {
    fn from(v: u32) -> Self {
        Field::Int(v.into())
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Self {
        Field::Int(v as i64)
    }
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Num(Num(v))
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_owned())
    }
}

impl From<String> for Field {
    fn from(v: String) -> Self {
        Field::Text(v)
    }
}

impl<T: Into<Field>> From<Vec<T>> for Field {
    fn from(v: Vec<T>) -> Self {
        Field::List(v.into_iter().map(Into::into).collect())
    }
}

pub type Fields = BTreeMap<&'static str, Field>;

#[derive(Debug, Clone, Serialize)]
pub struct ResultEntry {
    pub problem: String,
    pub mode: u32,
    pub eigenvalues: Vec<Num>,
    pub multiplicity: Vec<usize>,
    pub extrapolated: Vec<Num>,
    pub order: Vec<Option<Num>>,
    /// `None` when no guard-band comparison was requested.
    pub certified: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_grid: Option<Vec<Vec<Num>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityEntry {
    pub name: String,
    pub left: Num,
    pub right: Num,
    pub abs_residual: Num,
    pub rel_residual: Num,
    pub n: usize,
    pub order: Option<Num>,
    pub tolerance: Num,
    pub passed: bool,
}

impl IdentityEntry {
    pub fn new(r: &IdentityReport, tolerance: f64, min_order: f64) -> Self {
        Self {
            name: r.name.clone(),
            left: Num(r.left),
            right: Num(r.right),
            abs_residual: Num(r.abs_residual),
            rel_residual: Num(r.rel_residual),
            n: r.n,
            order: r.order.map(Num),
            tolerance: Num(tolerance),
            passed: r.passes(tolerance, min_order),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: Fields,
    pub results: Vec<ResultEntry>,
    pub identities: Vec<IdentityEntry>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: Fields,
    pub timestamp: String,
}

impl Report {
    pub fn new(config: Fields) -> Self {
        Self {
            config,
            results: Vec::new(),
            identities: Vec::new(),
            summary: Fields::new(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// One row per eigenvalue: `problem,mode,index,value,extrapolated,order`.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["problem", "mode", "index", "value", "extrapolated", "order"])?;
        for r in &self.results {
            for (i, value) in r.eigenvalues.iter().enumerate() {
                let extrapolated = r.extrapolated.get(i).map(|x| x.text()).unwrap_or_default();
                let order = r.order.get(i).copied().flatten().map(|x| x.text()).unwrap_or_default();
                w.write_record([
                    r.problem.clone(),
                    r.mode.to_string(),
                    i.to_string(),
                    value.text(),
                    extrapolated,
                    order,
                ])?;
            }
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_have_seventeen_digits() {
        let s = serde_json::to_string(&vec![Num(0.1), Num(-2.0), Num(f64::NAN)]).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,-2.0000000000000000e0,null]");
        let back: Vec<Option<f64>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![Some(0.1), Some(-2.0), None]);
    }

    #[test]
    fn csv_rows() {
        let mut r = Report::new(Fields::new());
        r.results.push(ResultEntry {
            problem: "robin".into(),
            mode: 1,
            eigenvalues: nums(&[1.5, 2.5]),
            multiplicity: vec![2, 2],
            extrapolated: nums(&[1.0, 2.0]),
            order: vec![Some(Num(2.0)), None],
            certified: None,
            per_grid: None,
        });
        let text = String::from_utf8(r.to_csv().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[2], "robin,1,1,2.5000000000000000e0,2.0000000000000000e0,");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
