use std::collections::BTreeMap;
use std::fs::File;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::args::ReportArgs;
use crate::schedule::SummaryRow;
use crate::Infeasible;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub algo: String,
    pub ti: bool,
    pub runs: usize,
    pub mean_scheduled: f64,
    pub mean_schedulability: f64,
    pub median_schedulability: f64,
    pub mean_convergence_generation: f64,
    pub median_convergence_generation: f64,
    pub mean_convergence_evaluations: f64,
    pub mean_runtime_ms: f64,
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Groups rows by algorithm and TI setting, in sorted key order.
pub fn aggregate(rows: &[SummaryRow]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(String, bool), Vec<&SummaryRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.algo.clone(), r.ti)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algo, ti), rs)| {
            let col = |f: fn(&SummaryRow) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let sched = col(|r| r.schedulability);
            let conv = col(|r| r.convergence_generation as f64);
            Aggregate {
                algo,
                ti,
                runs: rs.len(),
                mean_scheduled: mean(&col(|r| r.scheduled as f64)),
                mean_schedulability: mean(&sched),
                median_schedulability: median(&sched),
                mean_convergence_generation: mean(&conv),
                median_convergence_generation: median(&conv),
                mean_convergence_evaluations: mean(&col(|r| r.convergence_evaluations as f64)),
                mean_runtime_ms: mean(&col(|r| r.runtime_ms)),
            }
        })
        .collect()
}

pub fn read_summary(path: &std::path::Path) -> Result<Vec<SummaryRow>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for r in csv::Reader::from_reader(file).deserialize() {
        rows.push(r.with_context(|| format!("parsing {}", path.display()))?);
    }
    Ok(rows)
}

pub fn run(args: &ReportArgs) -> Result<()> {
    let rows = read_summary(&args.summary)?;
    if rows.is_empty() {
        bail!(Infeasible(format!(
            "{} has no rows",
            args.summary.display()
        )));
    }
    let table = aggregate(&rows);
    let mut out = csv::Writer::from_writer(std::io::stdout());
    for a in &table {
        out.serialize(a)?;
    }
    out.flush()?;
    if let Some(path) = &args.out {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for a in &table {
            w.serialize(a)?;
        }
        w.flush()?;
    }
    Ok(())
}
