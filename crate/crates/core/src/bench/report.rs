use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregate results for one formulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub formulation: String,
    /// Share of simulated periods with `p_ch * p_dis` above the threshold (%).
    pub pct_hours_violated: f64,
    /// Mean over instances of `sum_t p_ch_t * p_dis_t` (kW^2).
    pub mean_comp_product: f64,
    /// Mean solve time saved relative to the exact preset (%); empty when
    /// timing is off or the exact preset is not in the sweep.
    pub delta_time_pct: Option<f64>,
    pub mean_obj: Option<f64>,
    pub instances: usize,
    pub failures: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("md" | "markdown") => ReportFormat::Markdown,
            _ => ReportFormat::Csv,
        }
    }
}

pub fn render_csv(rows: &[BenchRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render_markdown(rows: &[BenchRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.prec$}"));
    let mut out = String::new();
    out += "| Formulation | Violated hours (%) | Mean sum p_ch*p_dis (kW^2) | Time saved vs exact (%) | Mean objective | Instances | Failures |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|\n";
    for r in rows {
        writeln!(
            out,
            "| {} | {:.2} | {:.4} | {} | {} | {} | {} |",
            r.formulation,
            r.pct_hours_violated,
            r.mean_comp_product,
            opt(r.delta_time_pct, 2),
            opt(r.mean_obj, 4),
            r.instances,
            r.failures
        )
        .expect("write to string");
    }
    Ok(out)
}

/// Writes the report, creating parent directories as needed.
pub fn emit_report(rows: &[BenchRow], format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => render_csv(rows)?,
        ReportFormat::Markdown => render_markdown(rows)?,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a CSV report produced by [`render_csv`].
pub fn parse_report(text: &str) -> Result<Vec<BenchRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let expected = [
        "formulation",
        "pct_hours_violated",
        "mean_comp_product",
        "delta_time_pct",
        "mean_obj",
        "instances",
        "failures",
    ];
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Config(format!("unexpected report header {headers:?}")));
    }
    let rows = r.deserialize().collect::<std::result::Result<Vec<BenchRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<BenchRow> {
        vec![
            BenchRow {
                formulation: "MILP".into(),
                pct_hours_violated: 0.0,
                mean_comp_product: 0.0,
                delta_time_pct: Some(0.0),
                mean_obj: Some(1234.5678901234),
                instances: 30,
                failures: 0,
            },
            BenchRow {
                formulation: "TLP".into(),
                pct_hours_violated: 1.0 / 3.0,
                mean_comp_product: 2.0_f64.sqrt(),
                delta_time_pct: None,
                mean_obj: None,
                instances: 30,
                failures: 30,
            },
        ]
    }

    #[test]
    fn csv_round_trip() {
        let text = render_csv(&rows()).unwrap();
        assert!(text.starts_with("formulation,pct_hours_violated,mean_comp_product,delta_time_pct,"));
        let back = parse_report(&text).unwrap();
        assert_eq!(back, rows());
        assert_eq!(render_csv(&back).unwrap(), text);
    }

    #[test]
    fn markdown_layout() {
        let md = render_markdown(&rows()).unwrap();
        assert_eq!(md.lines().count(), 4);
        assert!(md.contains("| TLP | 0.33 | 1.4142 | n/a | n/a | 30 | 30 |"), "{md}");
    }

    #[test]
    fn empty_reports_are_rejected() {
        assert!(matches!(render_csv(&[]), Err(Error::EmptyReport)));
        assert!(matches!(render_markdown(&[]), Err(Error::EmptyReport)));
        assert!(parse_report("formulation,pct_hours_violated,mean_comp_product,delta_time_pct,mean_obj,instances,failures\n").is_err());
    }
}
