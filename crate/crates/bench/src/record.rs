//! Run records and their JSON / long-format CSV serializations.

use crate::config::ExperimentSpec;
use crate::error::Result;
use brlab::estimators::NormBracket;
use brlab::SlopeFit;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Flag,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Flag => "FLAG",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Identity checks fail outright; measured constants only flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Identity,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub measured: f64,
    pub threshold: f64,
    /// The rule, spelled out with its numbers.
    pub rule: String,
    pub verdict: Verdict,
}

impl Check {
    fn new(name: &str, kind: CheckKind, measured: f64, threshold: f64, rule: String, ok: bool) -> Self {
        let verdict = match (ok, kind) {
            (true, _) => Verdict::Pass,
            (false, CheckKind::Identity) => Verdict::Fail,
            (false, CheckKind::Measured) => Verdict::Flag,
        };
        Check { name: name.to_string(), kind, measured, threshold, rule, verdict }
    }

    pub fn at_most(name: &str, kind: CheckKind, measured: f64, threshold: f64) -> Self {
        let ok = measured <= threshold;
        Self::new(name, kind, measured, threshold, format!("measured <= {threshold:e}"), ok)
    }

    pub fn at_least(name: &str, kind: CheckKind, measured: f64, threshold: f64) -> Self {
        let ok = measured >= threshold;
        Self::new(name, kind, measured, threshold, format!("measured >= {threshold:e}"), ok)
    }

    pub fn within(name: &str, kind: CheckKind, measured: f64, target: f64, tol: f64) -> Self {
        let ok = (measured - target).abs() <= tol;
        Self::new(name, kind, measured, tol, format!("|measured - {target}| <= {tol:e}"), ok)
    }

    /// A yes/no condition, recorded as 1 or 0 against threshold 1.
    pub fn holds(name: &str, kind: CheckKind, ok: bool, rule: &str) -> Self {
        Self::new(name, kind, if ok { 1.0 } else { 0.0 }, 1.0, rule.to_string(), ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub reference: Option<f64>,
    pub samples: Vec<(f64, f64)>,
}

impl FitRecord {
    pub fn new(name: &str, fit: &SlopeFit, reference: Option<f64>) -> Self {
        FitRecord {
            name: name.to_string(),
            exponent: fit.exponent,
            stderr: fit.stderr,
            r_squared: fit.r_squared,
            reference,
            samples: fit.samples.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketRecord {
    pub name: String,
    pub p: f64,
    pub q: f64,
    pub lower: f64,
    pub upper: Option<f64>,
}

impl BracketRecord {
    pub fn new(name: impl Into<String>, b: &NormBracket) -> Self {
        BracketRecord { name: name.into(), p: b.p, q: b.q, lower: b.lower, upper: b.upper }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub name: String,
    pub seed: u64,
    pub values: Vec<(String, f64)>,
    pub fits: Vec<FitRecord>,
    pub brackets: Vec<BracketRecord>,
    pub checks: Vec<Check>,
}

impl TaskRecord {
    pub fn new(name: impl Into<String>, seed: u64) -> Self {
        TaskRecord { name: name.into(), seed, values: Vec::new(), fits: Vec::new(), brackets: Vec::new(), checks: Vec::new() }
    }

    pub fn value(&mut self, name: impl Into<String>, v: f64) -> &mut Self {
        self.values.push((name.into(), v));
        self
    }

    pub fn check(&mut self, c: Check) -> &mut Self {
        self.checks.push(c);
        self
    }

    pub fn verdict(&self) -> Verdict {
        self.checks.iter().map(|c| c.verdict).max().unwrap_or(Verdict::Pass)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub pass: usize,
    pub flag: usize,
    pub fail: usize,
}

impl VerdictSummary {
    pub fn of(tasks: &[TaskRecord]) -> Self {
        let mut s = VerdictSummary::default();
        for c in tasks.iter().flat_map(|t| &t.checks) {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Flag => s.flag += 1,
                Verdict::Fail => s.fail += 1,
            }
        }
        s
    }

    pub fn overall(&self) -> Verdict {
        if self.fail > 0 {
            Verdict::Fail
        } else if self.flag > 0 {
            Verdict::Flag
        } else {
            Verdict::Pass
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub spec: ExperimentSpec,
    pub seed: u64,
    pub tasks: Vec<TaskRecord>,
    pub summary: VerdictSummary,
    /// Timing; excluded from reproducibility comparisons.
    pub wall_time_s: f64,
}

impl RunRecord {
    pub fn json_path(dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{id}.json"))
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(Self::json_path(dir, &self.spec.id), text)?;
        self.write_values_csv(&dir.join(format!("{}.values.csv", self.spec.id)))?;
        self.write_checks_csv(&dir.join(format!("{}.checks.csv", self.spec.id)))?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<RunRecord> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            crate::error::BenchError::parse(format!("{}:{}:{}", path.display(), e.line(), e.column()), e.to_string())
        })
    }

    /// Long format: one row per scalar, fit exponent, fit sample or bracket end.
    fn write_values_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["id", "scenario", "task", "series", "x", "value"])?;
        let id = &self.spec.id;
        let sc = self.spec.scenario_name();
        for t in &self.tasks {
            for (k, v) in &t.values {
                w.write_record([id, sc, &t.name, k, "", &v.to_string()])?;
            }
            for f in &t.fits {
                w.write_record([id, sc, &t.name, &format!("{}.exponent", f.name), "", &f.exponent.to_string()])?;
                w.write_record([id, sc, &t.name, &format!("{}.stderr", f.name), "", &f.stderr.to_string()])?;
                for (x, y) in &f.samples {
                    w.write_record([id, sc, &t.name, &format!("{}.log", f.name), &x.to_string(), &y.to_string()])?;
                }
            }
            for b in &t.brackets {
                w.write_record([id, sc, &t.name, &format!("{}.lower", b.name), "", &b.lower.to_string()])?;
                if let Some(u) = b.upper {
                    w.write_record([id, sc, &t.name, &format!("{}.upper", b.name), "", &u.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    fn write_checks_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["id", "task", "check", "kind", "measured", "threshold", "rule", "verdict"])?;
        for t in &self.tasks {
            for c in &t.checks {
                let kind = match c.kind {
                    CheckKind::Identity => "identity",
                    CheckKind::Measured => "measured",
                };
                w.write_record([
                    self.spec.id.as_str(),
                    &t.name,
                    &c.name,
                    kind,
                    &c.measured.to_string(),
                    &c.threshold.to_string(),
                    &c.rule,
                    &c.verdict.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
