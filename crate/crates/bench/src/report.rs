//! Summaries of run directories and diffs against a baseline.

use crate::error::{BenchError, Result};
use crate::record::{RunRecord, Verdict};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Every `*.json` run record in `dir`, keyed by experiment id.
pub fn load_dir(dir: &Path) -> Result<BTreeMap<String, RunRecord>> {
    let entries = std::fs::read_dir(dir).map_err(|e| BenchError::Missing(format!("{}: {e}", dir.display())))?;
    let mut out = BTreeMap::new();
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|x| x == "json") {
            let rec = RunRecord::read(&path)?;
            out.insert(rec.spec.id.clone(), rec);
        }
    }
    if out.is_empty() {
        return Err(BenchError::Missing(format!("{}: no run records", dir.display())));
    }
    Ok(out)
}

pub fn summary_table(runs: &BTreeMap<String, RunRecord>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<24} {:<20} {:>5} {:>5} {:>5}  {:<7} {:>9}", "id", "scenario", "pass", "flag", "fail", "verdict", "wall_s");
    for (id, r) in runs {
        let _ = writeln!(
            s,
            "{:<24} {:<20} {:>5} {:>5} {:>5}  {:<7} {:>9.3}",
            id,
            r.spec.scenario_name(),
            r.summary.pass,
            r.summary.flag,
            r.summary.fail,
            r.summary.overall(),
            r.wall_time_s
        );
        for t in &r.tasks {
            for c in &t.checks {
                if c.verdict != Verdict::Pass {
                    let _ = writeln!(s, "    {} {}/{}: measured {:e} ({})", c.verdict, t.name, c.name, c.measured, c.rule);
                }
            }
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiffKind {
    /// Present in the current run only.
    New,
    FitDrift { baseline: f64, current: f64, allowed: f64 },
    BracketsDisjoint { baseline: (f64, Option<f64>), current: (f64, Option<f64>) },
    VerdictWorse { baseline: Verdict, current: Verdict },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffEntry {
    pub id: String,
    pub task: Option<String>,
    pub item: Option<String>,
    pub kind: DiffKind,
}

impl DiffEntry {
    pub fn is_regression(&self) -> bool {
        !matches!(self.kind, DiffKind::New)
    }
}

fn disjoint(a: (f64, Option<f64>), b: (f64, Option<f64>)) -> bool {
    a.1.is_some_and(|u| u < b.0) || b.1.is_some_and(|u| u < a.0)
}

pub fn diff(current: &BTreeMap<String, RunRecord>, baseline: &BTreeMap<String, RunRecord>) -> Vec<DiffEntry> {
    let mut out = Vec::new();
    for (id, cur) in current {
        let Some(base) = baseline.get(id) else {
            out.push(DiffEntry { id: id.clone(), task: None, item: None, kind: DiffKind::New });
            continue;
        };
        for t in &cur.tasks {
            let entry = |item: Option<String>, kind| DiffEntry { id: id.clone(), task: Some(t.name.clone()), item, kind };
            let Some(bt) = base.tasks.iter().find(|b| b.name == t.name) else {
                out.push(entry(None, DiffKind::New));
                continue;
            };
            if t.verdict() > bt.verdict() {
                out.push(entry(None, DiffKind::VerdictWorse { baseline: bt.verdict(), current: t.verdict() }));
            }
            for f in &t.fits {
                if let Some(bf) = bt.fits.iter().find(|b| b.name == f.name) {
                    let allowed = 3.0 * f.stderr.max(bf.stderr);
                    if (f.exponent - bf.exponent).abs() > allowed {
                        out.push(entry(
                            Some(f.name.clone()),
                            DiffKind::FitDrift { baseline: bf.exponent, current: f.exponent, allowed },
                        ));
                    }
                }
            }
            for b in &t.brackets {
                if let Some(bb) = bt.brackets.iter().find(|x| x.name == b.name) {
                    let (c, p) = ((b.lower, b.upper), (bb.lower, bb.upper));
                    if disjoint(c, p) {
                        out.push(entry(Some(b.name.clone()), DiffKind::BracketsDisjoint { baseline: p, current: c }));
                    }
                }
            }
        }
    }
    out
}

pub fn render_diff(entries: &[DiffEntry]) -> String {
    let mut s = String::new();
    let regressions = entries.iter().filter(|e| e.is_regression()).count();
    let _ = writeln!(s, "diff: {} entries, {regressions} regressions", entries.len());
    for e in entries {
        let mut path = e.id.clone();
        for part in [&e.task, &e.item].into_iter().flatten() {
            path.push('/');
            path.push_str(part);
        }
        let what = match &e.kind {
            DiffKind::New => "[new]".to_string(),
            DiffKind::FitDrift { baseline, current, allowed } => {
                format!("fit drift {baseline:.4} -> {current:.4} (allowed {allowed:.4})")
            }
            DiffKind::BracketsDisjoint { baseline, current } => {
                format!("bracket {:?} no longer overlaps {:?}", current, baseline)
            }
            DiffKind::VerdictWorse { baseline, current } => format!("verdict {baseline} -> {current}"),
        };
        let _ = writeln!(s, "  {path}: {what}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::record::{BracketRecord, Check, CheckKind, FitRecord, TaskRecord, VerdictSummary};
    use proptest::prelude::*;

    fn run(id: &str, tasks: Vec<TaskRecord>) -> RunRecord {
        let mut spec = Config::parse(&Config::default_text("fs-check").unwrap(), "t").unwrap().experiments.remove(0);
        spec.id = id.to_string();
        RunRecord {
            schema_version: 1,
            tool_version: "test".into(),
            spec,
            seed: 7,
            summary: VerdictSummary::of(&tasks),
            tasks,
            wall_time_s: 0.0,
        }
    }

    fn fit_task(exponent: f64, stderr: f64) -> TaskRecord {
        let mut t = TaskRecord::new("t", 1);
        t.fits.push(FitRecord { name: "f".into(), exponent, stderr, r_squared: 1.0, reference: None, samples: vec![] });
        t
    }

    fn runs(v: Vec<RunRecord>) -> BTreeMap<String, RunRecord> {
        v.into_iter().map(|r| (r.spec.id.clone(), r)).collect()
    }

    #[test]
    fn identical_runs_have_no_diffs() {
        let a = runs(vec![run("a", vec![fit_task(0.5, 0.01)])]);
        assert!(diff(&a, &a).is_empty());
    }

    #[test]
    fn slope_drift_beyond_three_stderr_regresses() {
        let base = runs(vec![run("a", vec![fit_task(0.5, 0.01)])]);
        let cur = runs(vec![run("a", vec![fit_task(0.55, 0.01)])]);
        let d = diff(&cur, &base);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_regression());
        let near = runs(vec![run("a", vec![fit_task(0.52, 0.01)])]);
        assert!(diff(&near, &base).is_empty());
    }

    #[test]
    fn new_experiment_is_marked_but_not_a_regression() {
        let base = runs(vec![run("a", vec![])]);
        let cur = runs(vec![run("a", vec![]), run("b", vec![])]);
        let d = diff(&cur, &base);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiffKind::New);
        assert!(!d[0].is_regression());
        assert!(render_diff(&d).contains("b: [new]"));
    }

    #[test]
    fn disjoint_brackets_and_worse_verdicts_regress() {
        let mk = |lo: f64, hi: f64, ok: bool| {
            let mut t = TaskRecord::new("t", 1);
            t.brackets.push(BracketRecord { name: "b".into(), p: 1.0, q: 2.0, lower: lo, upper: Some(hi) });
            t.check(Check::holds("c", CheckKind::Identity, ok, "ok"));
            t
        };
        let base = runs(vec![run("a", vec![mk(1.0, 2.0, true)])]);
        assert!(diff(&runs(vec![run("a", vec![mk(1.5, 3.0, true)])]), &base).is_empty());
        let d = diff(&runs(vec![run("a", vec![mk(2.5, 3.0, false)])]), &base);
        assert_eq!(d.len(), 2);
        assert!(d.iter().all(DiffEntry::is_regression));
    }

    proptest! {
        #[test]
        fn drift_rule_is_symmetric_and_stderr_scaled(
            e in -3.0f64..3.0, shift in -1.0f64..1.0, s1 in 1e-4f64..0.5, s2 in 1e-4f64..0.5,
        ) {
            let a = runs(vec![run("a", vec![fit_task(e, s1)])]);
            let b = runs(vec![run("a", vec![fit_task(e + shift, s2)])]);
            let flagged = !diff(&b, &a).is_empty();
            prop_assert_eq!(flagged, !diff(&a, &b).is_empty());
            prop_assert_eq!(flagged, shift.abs() > 3.0 * s1.max(s2));
        }
    }
}
