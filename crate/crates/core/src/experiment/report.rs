use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::fsutil::write_atomic;

use super::cv::{CvResult, FoldRecord, MeanStd};

fn pct(m: MeanStd) -> String {
    format!("{:>7.2} ± {:<6.2}", 100.0 * m.mean, 100.0 * m.std)
}

/// Aligned summary table with one row per metric, values in percent.
pub fn summary_table(res: &CvResult) -> String {
    let s = &res.summary;
    let mut out = String::new();
    writeln!(
        out,
        "{} | {} repeats x {} folds | {} | {} metrics",
        res.dataset,
        res.config.repeats,
        res.config.folds,
        res.config.kernel_name(),
        res.config.metric_convention
    )
    .unwrap();
    writeln!(out, "{:<12} {:>17}", "metric", "mean ± std (%)").unwrap();
    for (name, m) in [
        ("accuracy", s.accuracy),
        ("sensitivity", s.sensitivity),
        ("specificity", s.specificity),
        ("g-mean", s.gmean),
    ] {
        writeln!(out, "{name:<12} {}", pct(m)).unwrap();
    }
    out
}

const CSV_HEADER: &str =
    "repeat,fold,tau,gamma,c1,c2,sigma,inner_gmean,skipped,m2_kept,test_size,tp,fn,fp,tn,accuracy,sensitivity,specificity,gmean";

fn csv_row(r: &FoldRecord) -> String {
    let p = &r.selection.point;
    let c = &r.confusion;
    let m = &r.metrics;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.repeat,
        r.fold,
        p.tau,
        p.gamma,
        p.c1,
        p.c2,
        p.sigma.map(|s| s.to_string()).unwrap_or_default(),
        r.selection.inner_gmean,
        r.selection.skipped,
        r.m2_kept,
        r.test_size,
        c.tp,
        c.fn_,
        c.fp,
        c.tn,
        m.accuracy,
        m.sensitivity,
        m.specificity,
        m.gmean
    )
}

pub fn results_csv(res: &CvResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &res.records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// One JSON object per fold, then a final `{"summary": ...}` line that also
/// carries the dataset name and the full configuration.
pub fn results_jsonl(res: &CvResult) -> String {
    let mut out = String::new();
    for r in &res.records {
        out.push_str(&serde_json::to_string(r).expect("fold records serialize"));
        out.push('\n');
    }
    let tail = serde_json::json!({
        "dataset": res.dataset,
        "config": res.config,
        "summary": res.summary,
    });
    out.push_str(&tail.to_string());
    out.push('\n');
    out
}

/// Writes `<base>.csv` and `<base>.jsonl`, returning both paths.
pub fn write_results(res: &CvResult, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let with_ext = |ext: &str| {
        let mut s = base.as_os_str().to_os_string();
        s.push(ext);
        PathBuf::from(s)
    };
    let csv = with_ext(".csv");
    let jsonl = with_ext(".jsonl");
    write_atomic(&csv, results_csv(res).as_bytes())?;
    write_atomic(&jsonl, results_jsonl(res).as_bytes())?;
    Ok((csv, jsonl))
}
