//! Run configuration: defaults, then a `key = value` file, then flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bg_coherent::BranchConvention;
use crate::error::{Error, Result};
use crate::su11_fock::ModelParams;
use crate::time_operator::PrefactorMode;

pub const OUT_ENV: &str = "TIMEOPS_DEFAULT_OUT";
pub const DEFAULT_OUT: &str = "timeops-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    Coherent,
    Timeop,
    Arrival,
    Similarity,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Coherent, Suite::Timeop, Suite::Arrival, Suite::Similarity];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Coherent => "coherent",
            Suite::Timeop => "timeop",
            Suite::Arrival => "arrival",
            Suite::Similarity => "similarity",
        }
    }
}

/// Parses one suite name or `all`.
pub fn parse_suites(s: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Suite::ALL);
            continue;
        }
        match Suite::ALL.iter().find(|x| x.name() == part) {
            Some(x) => out.push(*x),
            None => {
                return Err(Error::Config {
                    field: "suite".into(),
                    reason: format!("unknown suite `{part}` (algebra|coherent|timeop|arrival|similarity|all)"),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Config {
            field: "suite".into(),
            reason: "no suite selected".into(),
        });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// default: algebra
    pub suites: Vec<Suite>,
    /// default 1
    pub omega: f64,
    /// default 2 (k = 1.25)
    pub g: f64,
    /// Fock truncation, default 64
    pub n: usize,
    /// default principal; `principal,positive` runs both
    pub branches: Vec<BranchConvention>,
    /// default as-written
    pub prefactor: PrefactorMode,
    /// time-operator cubature, defaults 200 and 256
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// momentum-line refinement, default 512,1024,2048 on [-16, 16]
    pub momentum_points: Vec<usize>,
    pub momentum_half_width: f64,
    /// position half-line spectrum grid, default 1024 on (0, 10]
    pub position_points: usize,
    pub position_length: f64,
    /// similarity refinement, default 256,512,1024
    pub similarity_points: Vec<usize>,
    /// default: $TIMEOPS_DEFAULT_OUT, else ./timeops-out
    pub out: PathBuf,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suites: vec![Suite::Algebra],
            omega: 1.0,
            g: 2.0,
            n: 64,
            branches: vec![BranchConvention::Principal],
            prefactor: PrefactorMode::AsWritten,
            radial_nodes: 200,
            angular_nodes: 256,
            momentum_points: vec![512, 1024, 2048],
            momentum_half_width: 16.0,
            position_points: 1024,
            position_length: 10.0,
            similarity_points: vec![256, 512, 1024],
            out: std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            parallel: false,
        }
    }
}

fn bad(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn number<T: std::str::FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| bad(field, format!("cannot parse `{v}`")))
}

fn list(field: &str, v: &str) -> Result<Vec<usize>> {
    let out: Vec<usize> = v.split(',').map(|x| number(field, x)).collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(bad(field, "empty list"));
    }
    Ok(out)
}

impl RunConfig {
    /// Sets one key; keys are the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "suite" => self.suites = parse_suites(v)?,
            "omega" => self.omega = number("omega", v)?,
            "g" => self.g = number("g", v)?,
            "N" => self.n = number("N", v)?,
            "branch" => {
                let mut b = Vec::new();
                for part in v.split(',') {
                    b.push(part.trim().parse::<BranchConvention>().map_err(|_| {
                        bad("branch", format!("expected principal|positive, got `{part}`"))
                    })?);
                }
                b.dedup();
                self.branches = b;
            }
            "prefactor" => self.prefactor = v.parse()?,
            "radial-nodes" => self.radial_nodes = number("radial-nodes", v)?,
            "angular-nodes" => self.angular_nodes = number("angular-nodes", v)?,
            "momentum-M" => self.momentum_points = list("momentum-M", v)?,
            "momentum-L" => self.momentum_half_width = number("momentum-L", v)?,
            "position-M" => self.position_points = number("position-M", v)?,
            "position-L" => self.position_length = number("position-L", v)?,
            "similarity-M" => self.similarity_points = list("similarity-M", v)?,
            "out" => self.out = PathBuf::from(v),
            "parallel" => self.parallel = number("parallel", v)?,
            other => return Err(bad(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: no + 1,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.omega, self.g).map_err(|e| match e {
            Error::InvalidParameter { field, reason } => bad(field, reason),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if self.n < 16 {
            return Err(bad("N", "must be >= 16"));
        }
        if self.radial_nodes < 8 || self.angular_nodes < 8 {
            return Err(bad("radial-nodes", "quadrature needs at least 8 nodes per direction"));
        }
        if self.momentum_points.iter().any(|m| m % 4 != 0 || *m < 16) {
            return Err(bad("momentum-M", "grid sizes must be multiples of 4 and >= 16"));
        }
        if self.similarity_points.iter().any(|m| *m < 8) || self.position_points < 16 {
            return Err(bad("position-M", "position grids need >= 16 points"));
        }
        for (f, v) in [("momentum-L", self.momentum_half_width), ("position-L", self.position_length)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(f, "must be positive"));
            }
        }
        if self.branches.is_empty() {
            return Err(bad("branch", "no branch selected"));
        }
        Ok(())
    }

    /// Configuration echo for reports, in key order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let branch = |b: &BranchConvention| match b {
            BranchConvention::Principal => "principal",
            BranchConvention::Positive => "positive",
        };
        vec![
            ("N".into(), self.n.to_string()),
            ("angular-nodes".into(), self.angular_nodes.to_string()),
            ("branch".into(), self.branches.iter().map(branch).collect::<Vec<_>>().join(",")),
            ("g".into(), self.g.to_string()),
            ("momentum-L".into(), self.momentum_half_width.to_string()),
            ("momentum-M".into(), join(&self.momentum_points)),
            ("omega".into(), self.omega.to_string()),
            ("position-L".into(), self.position_length.to_string()),
            ("position-M".into(), self.position_points.to_string()),
            (
                "prefactor".into(),
                match self.prefactor {
                    PrefactorMode::AsWritten => "as-written",
                    PrefactorMode::FrequencyScaled => "frequency-scaled",
                }
                .into(),
            ),
            ("radial-nodes".into(), self.radial_nodes.to_string()),
            ("similarity-M".into(), join(&self.similarity_points)),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_file("# demo\nsuite = timeop\nomega = 2\nbranch = principal, positive\n").unwrap();
        assert_eq!(c.suites, vec![Suite::Timeop]);
        assert_eq!(c.branches.len(), 2);
        c.set("omega", "0.5").unwrap();
        assert_eq!(c.omega, 0.5);
    }

    #[test]
    fn unknown_suite_names_the_field() {
        match parse_suites("nope") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "suite"),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse_suites("all").unwrap().len(), 5);
    }

    #[test]
    fn invalid_params_are_config_errors() {
        let mut c = RunConfig::default();
        c.set("omega", "-1").unwrap();
        assert!(matches!(c.validate(), Err(Error::Config { .. })));
    }
}
