//! On-disk cache of coefficient runs.
//!
//! A `.qc` file is UTF-8 text with LF line endings. Line 1 is a compact JSON
//! header with sorted keys `{depth, family, modulus, params, version}`;
//! each following line holds one signed decimal coefficient, `a(0)` first.
//! Writes go to a temporary file in the destination directory and are
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::error::{Error, Result};
use crate::generators::FamilySpec;
use crate::series::{check_modulus, Coeffs, TruncatedSeries};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub format_version: u32,
    pub family: FamilySpec,
    pub coeffs: Coeffs,
}

impl CacheEntry {
    pub fn new(family: FamilySpec, series: &TruncatedSeries) -> Self {
        CacheEntry {
            format_version: FORMAT_VERSION,
            family,
            coeffs: series.coeffs().clone(),
        }
    }

    pub fn modulus(&self) -> Option<u32> {
        self.coeffs.modulus()
    }

    /// Highest stored index.
    pub fn depth(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// The stored run as a series; its offset is the family's `B`.
    pub fn series(&self) -> TruncatedSeries {
        match &self.coeffs {
            Coeffs::Exact(v) => TruncatedSeries::from_exact(self.family.b, v.clone()),
            Coeffs::Residues { modulus, values } => {
                TruncatedSeries::from_residues(self.family.b, *modulus, values.clone())
            }
        }
    }

    fn header(&self) -> String {
        let header = json!({
            "version": self.format_version,
            "family": self.family.kind_name(),
            "params": self.family.params_json(),
            "modulus": self.modulus(),
            "depth": self.depth(),
        });
        header.to_string()
    }

    fn render(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for n in 0..self.coeffs.len() {
            out.push_str(&self.coeffs.display_at(n));
            out.push('\n');
        }
        out
    }
}

/// `<family>-<params>-m<modulus|exact>-d<depth>.qc`
pub fn cache_file_name(family: &FamilySpec, modulus: Option<u32>, depth: usize) -> String {
    let m = modulus.map_or("exact".to_string(), |l| l.to_string());
    format!(
        "{}-{}-m{m}-d{depth}.qc",
        family.kind_name(),
        family.params_slug()
    )
}

/// A fully written temporary file that has not yet replaced its target.
/// Dropping it discards the temporary file and leaves the target untouched.
pub struct StagedWrite {
    temp: NamedTempFile,
    target: PathBuf,
}

impl StagedWrite {
    pub fn temp_path(&self) -> &Path {
        self.temp.path()
    }

    pub fn commit(self) -> Result<()> {
        self.temp
            .persist(&self.target)
            .map_err(|e| Error::io(&self.target, e.error))?;
        Ok(())
    }
}

fn existing_version(path: &Path) -> Option<u32> {
    let text = fs::read_to_string(path).ok()?;
    let header: Value = serde_json::from_str(text.lines().next()?).ok()?;
    header["version"].as_u64().map(|v| v as u32)
}

/// Writes `entry` to a temporary file beside `path` without replacing it.
pub fn stage_cache(entry: &CacheEntry, path: &Path) -> Result<StagedWrite> {
    if let Some(found) = existing_version(path) {
        if found > entry.format_version {
            return Err(Error::VersionMismatch {
                path: path.to_path_buf(),
                found,
                expected: entry.format_version,
            });
        }
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut temp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    temp.write_all(entry.render().as_bytes())
        .and_then(|_| temp.as_file().sync_all())
        .map_err(|e| Error::io(temp.path(), e))?;
    Ok(StagedWrite {
        temp,
        target: path.to_path_buf(),
    })
}

/// Atomically writes `entry` to `path`. Refuses to replace a file written
/// by a newer format version.
pub fn save_cache(entry: &CacheEntry, path: &Path) -> Result<()> {
    stage_cache(entry, path)?.commit()
}

pub fn load_cache(path: &Path) -> Result<CacheEntry> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let malformed = |line: usize, reason: String| Error::Malformed {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.split('\n');
    let header: Value = serde_json::from_str(lines.next().unwrap_or(""))
        .map_err(|e| malformed(1, format!("bad header: {e}")))?;

    let version = header["version"]
        .as_u64()
        .ok_or_else(|| malformed(1, "missing version".into()))? as u32;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let kind = header["family"]
        .as_str()
        .ok_or_else(|| malformed(1, "missing family".into()))?;
    let family = FamilySpec::from_kind_and_params(kind, &header["params"])
        .map_err(|e| malformed(1, e.to_string()))?;
    let modulus = match &header["modulus"] {
        Value::Null => None,
        v => {
            let l = v
                .as_u64()
                .ok_or_else(|| malformed(1, "bad modulus".into()))?;
            Some(check_modulus(l).map_err(|e| malformed(1, e.to_string()))?)
        }
    };
    let depth = header["depth"]
        .as_u64()
        .ok_or_else(|| malformed(1, "missing depth".into()))? as usize;

    let mut body: Vec<&str> = lines.collect();
    if body.last() == Some(&"") {
        body.pop();
    }
    if body.len() != depth + 1 {
        return Err(Error::CountMismatch {
            path: path.to_path_buf(),
            declared: depth,
            found: body.len(),
        });
    }
    let parse = |i: usize, s: &str| -> Result<BigInt> {
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed(i + 2, format!("not a signed decimal: {s:?}")));
        }
        s.parse()
            .map_err(|_| malformed(i + 2, format!("not a signed decimal: {s:?}")))
    };
    let coeffs = match modulus {
        None => Coeffs::Exact(
            body.iter()
                .enumerate()
                .map(|(i, s)| parse(i, s))
                .collect::<Result<_>>()?,
        ),
        Some(l) => Coeffs::Residues {
            modulus: l,
            values: body
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let v = parse(i, s)?;
                    u32::try_from(&v)
                        .ok()
                        .filter(|&r| r < l)
                        .ok_or_else(|| malformed(i + 2, format!("{v} is not in [0, {l})")))
                })
                .collect::<Result<_>>()?,
        },
    };
    Ok(CacheEntry {
        format_version: version,
        family,
        coeffs,
    })
}
