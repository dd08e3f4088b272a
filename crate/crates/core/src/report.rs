//! Check reports, convergence tables, plot-data CSV and the text matrix
//! dump format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use faer::Mat;
use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Basis, OperatorMatrix};
use crate::su11_fock::ModelParams;

/// f64 fields that may legitimately be non-finite (an overflowed
/// residual, say) are written as strings so the JSON stays valid.
mod real {
    use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            x.serialize(s)
        } else if x.is_nan() {
            s.serialize_str("NaN")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "NaN" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(de::Error::custom(format!("bad real `{other}`"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Tolerance {
    /// value <= bound
    AtMost {
        #[serde(with = "real")]
        bound: f64,
    },
    /// value >= bound
    AtLeast {
        #[serde(with = "real")]
        bound: f64,
    },
    /// residuals of the named table strictly decrease, each step by at
    /// least `min_ratio` (1 means any decrease)
    Trend { table: String, min_ratio: f64 },
    Informational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub label: String,
    #[serde(with = "real")]
    pub value: f64,
    pub tolerance: Tolerance,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(with = "real")]
    pub resolution: f64,
    #[serde(with = "real")]
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub name: String,
    /// what the resolution column counts (N, M, omega, ...)
    pub resolution_label: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(name: impl Into<String>, resolution_label: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            resolution_label: resolution_label.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, resolution: f64, residual: f64) {
        self.rows.push(ConvergenceRow { resolution, residual });
    }

    /// Smallest successive ratio r_i / r_{i+1}; NaN if any residual is
    /// not finite, +inf for fewer than two rows.
    pub fn worst_ratio(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for w in self.rows.windows(2) {
            let (a, b) = (w[0].residual, w[1].residual);
            if !a.is_finite() || !b.is_finite() {
                return f64::NAN;
            }
            let r = if b == 0.0 {
                if a > 0.0 {
                    f64::INFINITY
                } else {
                    1.0
                }
            } else {
                a / b
            };
            worst = worst.min(r);
        }
        worst
    }

    pub fn strictly_decreasing(&self, min_ratio: f64) -> bool {
        if self.rows.len() < 2 {
            return false;
        }
        self.rows.windows(2).all(|w| {
            let (a, b) = (w[0].residual, w[1].residual);
            a.is_finite() && b.is_finite() && b < a && (min_ratio <= 1.0 || a >= min_ratio * b)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Option<ModelParams>,
    pub config: BTreeMap<String, String>,
    pub rows: Vec<CheckRow>,
    pub convergence: Vec<ConvergenceTable>,
    pub notes: Vec<String>,
    pub timestamp: String,
    pub artifact_version: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: None,
            config: BTreeMap::new(),
            rows: Vec::new(),
            convergence: Vec::new(),
            notes: Vec::new(),
            timestamp: timestamp_from_env(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn with_params(mut self, p: &ModelParams) -> Self {
        self.params = Some(*p);
        self
    }

    pub fn set_config(&mut self, key: impl Into<String>, value: impl ToString) {
        self.config.insert(key.into(), value.to_string());
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn at_most(&mut self, label: impl Into<String>, value: f64, bound: f64) -> bool {
        let pass = value <= bound;
        self.rows.push(CheckRow {
            label: label.into(),
            value,
            tolerance: Tolerance::AtMost { bound },
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
        });
        pass
    }

    pub fn at_least(&mut self, label: impl Into<String>, value: f64, bound: f64) -> bool {
        let pass = value >= bound;
        self.rows.push(CheckRow {
            label: label.into(),
            value,
            tolerance: Tolerance::AtLeast { bound },
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
        });
        pass
    }

    pub fn info(&mut self, label: impl Into<String>, value: f64) {
        self.rows.push(CheckRow {
            label: label.into(),
            value,
            tolerance: Tolerance::Informational,
            outcome: Outcome::Informational,
        });
    }

    pub fn add_table(&mut self, table: ConvergenceTable) {
        self.convergence.push(table);
    }

    pub fn table(&self, name: &str) -> Option<&ConvergenceTable> {
        self.convergence.iter().find(|t| t.name == name)
    }

    /// Adds a trend row for a table already added to the report.
    pub fn trend(&mut self, label: impl Into<String>, table: &str, min_ratio: f64) -> bool {
        let (pass, value) = match self.table(table) {
            Some(t) => (t.strictly_decreasing(min_ratio), t.worst_ratio()),
            None => (false, f64::NAN),
        };
        self.rows.push(CheckRow {
            label: label.into(),
            value,
            tolerance: Tolerance::Trend {
                table: table.to_string(),
                min_ratio,
            },
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
        });
        pass
    }

    pub fn row(&self, label: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.outcome != Outcome::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.outcome == Outcome::Fail)
    }

    /// Appends the rows, tables and notes of another report, prefixing
    /// labels and table names with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: CheckReport) {
        let p = |s: &str| {
            if prefix.is_empty() {
                s.to_string()
            } else {
                format!("{prefix}: {s}")
            }
        };
        for mut r in other.rows {
            r.label = p(&r.label);
            if let Tolerance::Trend { table, .. } = &mut r.tolerance {
                *table = p(table);
            }
            self.rows.push(r);
        }
        for mut t in other.convergence {
            t.name = p(&t.name);
            self.convergence.push(t);
        }
        self.notes.extend(other.notes.into_iter().map(|n| p(&n)));
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_json()?)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// RFC 3339 UTC time from SOURCE_DATE_EPOCH, or the epoch itself when
/// unset, so that identical configurations give identical reports.
pub fn timestamp_from_env() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .unwrap_or(0);
    format_utc(secs)
}

pub fn format_utc(secs: i64) -> String {
    let days = secs.div_euclid(86_400);
    let rem = secs.rem_euclid(86_400);
    // civil-from-days (proleptic Gregorian)
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!(
        "{y:04}-{m:02}-{d:02}T{:02}:{:02}:{:02}Z",
        rem / 3600,
        (rem / 60) % 60,
        rem % 60
    )
}

/// One CSV per convergence table, named `<report>__<table>.csv` with the
/// columns resolution,residual. Returns the paths written.
pub fn emit_plotdata(report: &CheckReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for t in &report.convergence {
        let path = dir.join(format!("{}__{}.csv", slug(&report.name), slug(&t.name)));
        write_file(&path, &table_csv(t))?;
        out.push(path);
    }
    Ok(out)
}

pub fn table_csv(t: &ConvergenceTable) -> String {
    let mut s = String::from("resolution,residual\n");
    for r in &t.rows {
        let _ = writeln!(s, "{},{}", r.resolution, r.residual);
    }
    s
}

pub fn slug(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' || ch == '.' {
            out.push(ch);
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

fn fmt_entry(z: c64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

fn parse_entry(tok: &str, line: usize) -> Result<c64> {
    let bad = || Error::Parse {
        line,
        reason: format!("bad entry `{tok}`"),
    };
    let body = tok.strip_suffix('i').ok_or_else(bad)?;
    // split at the sign that starts the imaginary part (not an exponent sign)
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let i = split.ok_or_else(bad)?;
    let re: f64 = body[..i].parse().map_err(|_| bad())?;
    let im: f64 = body[i..].parse().map_err(|_| bad())?;
    Ok(c64::new(re, im))
}

pub fn matrix_to_string(m: &OperatorMatrix, params: &ModelParams) -> String {
    let n = m.dim();
    let mut s = format!(
        "# basis={} dim={} k={} omega={}\n",
        m.basis, n, params.k, params.omega
    );
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| fmt_entry(m.get(i, j))).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

pub fn dump_matrix(m: &OperatorMatrix, params: &ModelParams, path: &Path) -> Result<()> {
    write_file(path, &matrix_to_string(m, params))
}

/// Header fields of a dumped matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixHeader {
    pub basis: Basis,
    pub dim: usize,
    pub k: f64,
    pub omega: f64,
}

pub fn matrix_from_str(text: &str) -> Result<(MatrixHeader, OperatorMatrix)> {
    let mut lines = text.lines();
    let head = lines.next().ok_or(Error::Parse {
        line: 1,
        reason: "empty file".into(),
    })?;
    let head_body = head.strip_prefix("# ").ok_or(Error::Parse {
        line: 1,
        reason: "missing header".into(),
    })?;
    let mut fields = BTreeMap::new();
    for kv in head_body.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or(Error::Parse {
            line: 1,
            reason: format!("bad header field `{kv}`"),
        })?;
        fields.insert(k, v);
    }
    let get = |k: &str| {
        fields.get(k).copied().ok_or(Error::Parse {
            line: 1,
            reason: format!("header lacks `{k}`"),
        })
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?.parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad `{k}`"),
        })
    };
    let basis: Basis = get("basis")?.parse()?;
    let dim: usize = get("dim")?.parse().map_err(|_| Error::Parse {
        line: 1,
        reason: "bad `dim`".into(),
    })?;
    let header = MatrixHeader {
        basis: basis.clone(),
        dim,
        k: num("k")?,
        omega: num("omega")?,
    };
    let mut mat = Mat::<c64>::zeros(dim, dim);
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if rows == dim {
            return Err(Error::Parse {
                line: i + 2,
                reason: format!("more than {dim} rows"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != dim {
            return Err(Error::Parse {
                line: i + 2,
                reason: format!("expected {dim} entries, found {}", toks.len()),
            });
        }
        for (j, t) in toks.iter().enumerate() {
            mat[(rows, j)] = parse_entry(t, i + 2)?;
        }
        rows += 1;
    }
    if rows != dim {
        return Err(Error::Parse {
            line: rows + 2,
            reason: format!("expected {dim} rows, found {rows}"),
        });
    }
    Ok((header, OperatorMatrix::new(basis, mat)))
}

pub fn load_matrix(path: &Path) -> Result<(MatrixHeader, OperatorMatrix)> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    matrix_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_formatting() {
        assert_eq!(format_utc(0), "1970-01-01T00:00:00Z");
        assert_eq!(format_utc(951_782_400), "2000-02-29T00:00:00Z");
        assert_eq!(format_utc(1_700_000_000), "2023-11-14T22:13:20Z");
    }

    #[test]
    fn entries_round_trip_bitwise() {
        for z in [
            c64::new(1.0, -2.5e-300),
            c64::new(-0.0, 0.0),
            c64::new(std::f64::consts::PI, -1e300),
            c64::new(5e-324, 1.0 / 3.0),
        ] {
            let s = fmt_entry(z);
            let back = parse_entry(&s, 1).unwrap();
            assert_eq!(back.re.to_bits(), z.re.to_bits(), "{s}");
            assert_eq!(back.im.to_bits(), z.im.to_bits(), "{s}");
        }
    }

    #[test]
    fn trend_rows() {
        let mut t = ConvergenceTable::new("t", "N");
        t.push(1.0, 1.0);
        t.push(2.0, 0.05);
        t.push(3.0, 0.004);
        assert!(t.strictly_decreasing(10.0));
        assert!((t.worst_ratio() - 12.5).abs() < 1e-12);
        t.push(4.0, 0.004);
        assert!(!t.strictly_decreasing(1.0));
        let mut e = ConvergenceTable::new("e", "N");
        assert!(!e.strictly_decreasing(1.0));
        e.push(1.0, f64::INFINITY);
        e.push(2.0, 1.0);
        assert!(!e.strictly_decreasing(1.0));
    }

    #[test]
    fn report_json_round_trip_with_non_finite_values() {
        let mut r = CheckReport::new("demo");
        r.at_most("a", 1e-13, 1e-12);
        r.info("overflowed", f64::INFINITY);
        r.info("nan", f64::NAN);
        let mut t = ConvergenceTable::new("tbl", "M");
        t.push(256.0, f64::INFINITY);
        r.add_table(t);
        let s = r.to_json().unwrap();
        let back = CheckReport::from_json(&s).unwrap();
        assert_eq!(back.to_json().unwrap(), s);
        assert!(back.rows[2].value.is_nan());
    }

    #[test]
    fn empty_table_gives_header_only_csv() {
        assert_eq!(table_csv(&ConvergenceTable::new("x", "N")), "resolution,residual\n");
    }
}
