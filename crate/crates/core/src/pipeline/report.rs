//! CSV reports of a clustering run.

use std::io::Write;

use crate::clustering::ClusterRun;

pub const SUMMARY_HEADER: &str = "name,n,method,metric,cophenet,classes,seeds";

/// Table row: name, number of profiles, chosen method and metric, cophenetic
/// correlation (4 decimals), internal node count and seed count.
pub fn write_summary(w: &mut impl Write, run: &ClusterRun) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER.split(','))?;
    out.write_record([
        run.dataset_name.clone(),
        run.n().to_string(),
        run.chosen_method.to_string(),
        run.chosen_metric.to_string(),
        format!("{:.4}", run.chosen_cophenet),
        run.classes().to_string(),
        run.seeds.len().to_string(),
    ])?;
    out.flush()?;
    Ok(())
}

pub fn write_grid(w: &mut impl Write, run: &ClusterRun) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "metric", "cophenet", "status"])?;
    for c in &run.grid {
        out.write_record([c.method.to_string(), c.metric.to_string(), c.cophenet.to_string(), c.status.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Seed pairs, lowest merge first, named by `labels`.
pub fn write_seeds(w: &mut impl Write, run: &ClusterRun, labels: &[String]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["rank", "height", "left_file", "right_file"])?;
    for (rank, s) in run.seeds.iter().enumerate() {
        out.write_record([
            (rank + 1).to_string(),
            s.height.to_string(),
            labels[s.left].clone(),
            labels[s.right].clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
