use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::certificate::{run_theorem_experiment, TheoremReport};
use super::config::{ExperimentConfig, Mode};
use super::content::{content_distribution, ContentReport};
use super::delta::{delta_experiment, DeltaReport};
use super::specfact::{spec_fact_statistics, SpecFactReport};
use crate::error::{Error, Result};
use crate::stats::Proportion;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentReport {
    Theorem(TheoremReport),
    Content(ContentReport),
    Delta(DeltaReport),
    Specfact(SpecFactReport),
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    Ok(match cfg.mode {
        Mode::Theorem1 | Mode::Theorem2 => ExperimentReport::Theorem(run_theorem_experiment(cfg)?),
        Mode::Content => ExperimentReport::Content(content_distribution(cfg)?),
        Mode::Delta => ExperimentReport::Delta(delta_experiment(cfg)?),
        Mode::Specfact => ExperimentReport::Specfact(spec_fact_statistics(cfg)?),
    })
}

fn prop_header(name: &str) -> [String; 5] {
    ["successes", "trials", "estimate", "ci_low", "ci_high"].map(|s| format!("{name}_{s}"))
}

fn prop_cells(p: &Proportion) -> [String; 5] {
    [
        p.successes.to_string(),
        p.trials.to_string(),
        format!("{:.6}", p.estimate),
        format!("{:.6}", p.ci_low),
        format!("{:.6}", p.ci_high),
    ]
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:.6}"))
}

fn join(v: &[u32]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl ExperimentReport {
    pub fn config(&self) -> &ExperimentConfig {
        match self {
            ExperimentReport::Theorem(r) => &r.config,
            ExperimentReport::Content(r) => &r.config,
            ExperimentReport::Delta(r) => &r.config,
            ExperimentReport::Specfact(r) => &r.config,
        }
    }

    /// Failures of proven containments; nonzero means a bug.
    pub fn violations(&self) -> u64 {
        match self {
            ExperimentReport::Theorem(r) => r.violations(),
            ExperimentReport::Delta(r) => r.violations(),
            _ => 0,
        }
    }

    /// Header and rows of the CSV table.
    pub fn table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        match self {
            ExperimentReport::Theorem(r) => {
                let mut h = s(&["n", "samples", "separable", "conditioned"]);
                h.extend(prop_header("evidence"));
                h.extend(prop_header("divisor_failures"));
                h.extend(s(&[
                    "inconclusive",
                    "violations",
                    "closure_flagged",
                    "content_mismatches",
                    "missing_irreducible",
                    "missing_type_n11",
                    "missing_delta",
                ]));
                let rows = r
                    .rows
                    .iter()
                    .map(|x| {
                        let mut v = vec![
                            x.n.to_string(),
                            x.samples.to_string(),
                            x.separable.to_string(),
                            x.conditioned.to_string(),
                        ];
                        v.extend(prop_cells(&x.evidence));
                        v.extend(prop_cells(&x.divisor_failures));
                        v.extend(
                            [
                                x.inconclusive,
                                x.violations,
                                x.closure_flagged,
                                x.content_mismatches,
                                x.missing_irreducible,
                                x.missing_type_n11,
                                x.missing_delta,
                            ]
                            .map(|c| c.to_string()),
                        );
                        v
                    })
                    .collect();
                (h, rows)
            }
            ExperimentReport::Content(r) => {
                let mut h = s(&["n", "eta", "conditioned"]);
                h.extend(prop_header("observed"));
                h.extend(s(&["asymptotic", "normalized", "exact", "z_normalized", "degenerate"]));
                let rows = r
                    .rows
                    .iter()
                    .map(|x| {
                        let mut v = vec![x.n.to_string(), x.eta.to_string(), x.conditioned.to_string()];
                        v.extend(prop_cells(&x.observed));
                        v.extend([
                            format!("{:.6}", x.asymptotic),
                            format!("{:.6}", x.normalized),
                            opt(x.exact),
                            format!("{:.3}", x.z_normalized),
                            x.degenerate.to_string(),
                        ]);
                        v
                    })
                    .collect();
                (h, rows)
            }
            ExperimentReport::Delta(r) => {
                let h = s(&[
                    "a0",
                    "n",
                    "eta",
                    "trials",
                    "constructed",
                    "matches",
                    "violations",
                    "predicted_size",
                ]);
                let rows = r
                    .rows
                    .iter()
                    .map(|x| {
                        vec![
                            join(&x.a0),
                            x.n.to_string(),
                            x.eta.to_string(),
                            x.trials.to_string(),
                            x.constructed.to_string(),
                            x.matches.to_string(),
                            x.violations.to_string(),
                            x.predicted_size.to_string(),
                        ]
                    })
                    .collect();
                (h, rows)
            }
            ExperimentReport::Specfact(r) => {
                let mut h = s(&["n", "exhaustive", "tuples"]);
                h.extend(prop_header("all_partitions"));
                h.push("a_estimate".into());
                let rows = r
                    .rows
                    .iter()
                    .map(|x| {
                        let mut v = vec![x.n.to_string(), x.exhaustive.to_string(), x.tuples.to_string()];
                        v.extend(prop_cells(&x.all_partitions));
                        v.push(format!("{:.6}", x.a_estimate));
                        v
                    })
                    .collect();
                (h, rows)
            }
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let (header, rows) = self.table();
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(e.to_string());
        w.write_record(&header).map_err(io)?;
        for r in rows {
            w.write_record(&r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))
    }
}

/// Write `report.csv` and `report.json` into `out_dir`, returning their paths.
pub fn write_reports(report: &ExperimentReport, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("{}: {e}", out_dir.display()));
    fs::create_dir_all(out_dir).map_err(io)?;
    let csv_path = out_dir.join("report.csv");
    let json_path = out_dir.join("report.json");
    fs::write(&csv_path, report.to_csv()?).map_err(io)?;
    fs::write(&json_path, report.to_json()? + "\n").map_err(io)?;
    Ok((csv_path, json_path))
}
