//! Two-sample data sets and their reduction to an observation pair.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyKind, ObservationPair};

/// Breaking strength of jute fibre at gauge lengths 10 mm and 15 mm,
/// 30 specimens each.
pub const JUTE_CSV: &str = include_str!("../data/jute.csv");

/// Scale estimate shared by both jute samples.
pub const JUTE_SIGMA_HAT: f64 = 322.0;

#[derive(Debug, Clone, Copy)]
pub enum Source<'a> {
    /// Rows `group,value`, optional header; exactly two distinct groups.
    TwoColumnCsv(&'a Path),
    /// One value per line in each file.
    TwoFiles(&'a Path, &'a Path),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    /// Each group holds a single observation.
    RawPair,
    /// Each group is a sample of `n` shifted exponentials; use its minimum.
    SampleMinimum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataSet {
    pub labels: [String; 2],
    pub groups: [Vec<f64>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reduced {
    pub pair: ObservationPair,
    pub sigma_eff: f64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn data_error(path: &Path, lines: Vec<usize>, message: impl Into<String>) -> Error {
    Error::Data {
        path: path.to_path_buf(),
        lines,
        message: message.into(),
    }
}

pub fn ingest(source: Source<'_>) -> Result<DataSet> {
    match source {
        Source::TwoColumnCsv(path) => parse_two_column(&read(path)?, path),
        Source::TwoFiles(a, b) => {
            let ga = parse_one_column(&read(a)?, a)?;
            let gb = parse_one_column(&read(b)?, b)?;
            let label = |p: &Path| {
                p.file_stem()
                    .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
            };
            Ok(DataSet {
                labels: [label(a), label(b)],
                groups: [ga, gb],
            })
        }
    }
}

/// The bundled jute data set.
pub fn jute() -> DataSet {
    parse_two_column(JUTE_CSV, Path::new("jute.csv")).expect("bundled data parses")
}

fn parse_value(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses `group,value` rows, keeping groups in order of first appearance.
pub fn parse_two_column(text: &str, path: &Path) -> Result<DataSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut labels: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    let mut bad = Vec::new();
    let mut nonpositive = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                bad.push(e.position().map_or(idx + 1, |p| p.line() as usize));
                continue;
            }
        };
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if idx == 0
            && record
                .get(1)
                .is_some_and(|v| v.eq_ignore_ascii_case("value"))
        {
            continue;
        }
        let (Some(group), Some(value), 2) = (
            record.get(0),
            record.get(1).and_then(parse_value),
            record.len(),
        ) else {
            bad.push(line);
            continue;
        };
        if group.is_empty() {
            bad.push(line);
            continue;
        }
        if value <= 0.0 {
            nonpositive.push(line);
        }
        match labels.iter().position(|l| l == group) {
            Some(g) => groups[g].push(value),
            None => {
                labels.push(group.to_string());
                groups.push(vec![value]);
            }
        }
    }
    if !bad.is_empty() {
        return Err(data_error(
            path,
            bad,
            "malformed rows (expected group,value)",
        ));
    }
    if !nonpositive.is_empty() {
        return Err(data_error(path, nonpositive, "values must be positive"));
    }
    if labels.len() != 2 {
        return Err(data_error(
            path,
            Vec::new(),
            format!("expected exactly two groups, found {}", labels.len()),
        ));
    }
    let second = groups.pop().expect("two groups");
    let first = groups.pop().expect("two groups");
    let second_label = labels.pop().expect("two labels");
    let first_label = labels.pop().expect("two labels");
    Ok(DataSet {
        labels: [first_label, second_label],
        groups: [first, second],
    })
}

fn parse_one_column(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut bad = Vec::new();
    let mut nonpositive = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let field = line.trim();
        if field.is_empty() || field.starts_with('#') {
            continue;
        }
        match parse_value(field) {
            Some(v) if v <= 0.0 => nonpositive.push(line_no),
            Some(v) => values.push(v),
            None if i == 0 && field.eq_ignore_ascii_case("value") => {}
            None => bad.push(line_no),
        }
    }
    if !bad.is_empty() {
        return Err(data_error(path, bad, "lines are not numbers"));
    }
    if !nonpositive.is_empty() {
        return Err(data_error(path, nonpositive, "values must be positive"));
    }
    if values.is_empty() {
        return Err(data_error(path, Vec::new(), "no values"));
    }
    Ok(values)
}

/// Reduces a data set to `(X₁, X₂)` and the scale to use for them.
///
/// With [`Reduction::SampleMinimum`] each `X_i` is the minimum of group `i`;
/// the minimum of `n` exponentials with scale `σ̂` is exponential with
/// scale `σ̂/n`.
pub fn reduce(
    ds: &DataSet,
    family: FamilyKind,
    sigma_hat: f64,
    reduction: Reduction,
) -> Result<Reduced> {
    if !(sigma_hat > 0.0) || !sigma_hat.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be positive, got {sigma_hat}"
        )));
    }
    let [a, b] = &ds.groups;
    match reduction {
        Reduction::RawPair => {
            if a.len() != 1 || b.len() != 1 {
                return Err(Error::InvalidParameter(format!(
                    "raw_pair needs one value per group, got {} and {}",
                    a.len(),
                    b.len()
                )));
            }
            Ok(Reduced {
                pair: ObservationPair::new(a[0], b[0]),
                sigma_eff: sigma_hat,
            })
        }
        Reduction::SampleMinimum => {
            if family != FamilyKind::Exponential {
                return Err(Error::InvalidParameter(
                    "sample_minimum reduction applies only to the exponential family".into(),
                ));
            }
            if a.is_empty() || a.len() != b.len() {
                return Err(Error::InvalidParameter(format!(
                    "sample_minimum needs equal nonempty groups, got {} and {}",
                    a.len(),
                    b.len()
                )));
            }
            let min = |g: &[f64]| g.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(Reduced {
                pair: ObservationPair::new(min(a), min(b)),
                sigma_eff: sigma_hat / a.len() as f64,
            })
        }
    }
}

/// Path of the bundled jute CSV inside the source tree.
pub fn jute_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join("jute.csv")
}
