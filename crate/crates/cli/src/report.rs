//! CSV and JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Plan;
use crate::experiments::{columns, Row};
use crate::CliError;

#[derive(Serialize)]
struct CellJson<'a> {
    cell: usize,
    params: serde_json::Map<String, serde_json::Value>,
    residual: Option<f64>,
    passed: bool,
    runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct Summary {
    cells: usize,
    failed: usize,
    failing_cells: Vec<usize>,
    max_residual: Option<f64>,
    tol: f64,
    passed: bool,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    experiment: &'a str,
    seed: u64,
    dim: usize,
    columns: Vec<&'a str>,
    cells: Vec<CellJson<'a>>,
    summary: Summary,
}

pub struct Written {
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Writes `<experiment>.csv` and `<experiment>.json` into `out`.
pub fn write(plan: &Plan, rows: &[Row], out: &Path) -> Result<Written, CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Output(out.to_path_buf(), e.to_string()))?;
    let name = plan.experiment.name();
    let cols = columns(plan.experiment);

    let csv_path = out.join(format!("{name}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| CliError::Output(csv_path.clone(), e.to_string()))?;
    let mut header = vec!["cell"];
    header.extend_from_slice(cols);
    header.push("passed");
    let csv_err = |e: csv::Error| CliError::Output(csv_path.clone(), e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![row.cell.to_string()];
        rec.extend(row.values.iter().cloned());
        rec.push(row.passed.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Output(csv_path.clone(), e.to_string()))?;

    let failing: Vec<usize> = rows.iter().filter(|r| !r.passed).map(|r| r.cell).collect();
    let max_residual = rows.iter().filter_map(|r| finite(r.residual)).reduce(f64::max);
    let cells = rows
        .iter()
        .map(|r| CellJson {
            cell: r.cell,
            params: cols
                .iter()
                .zip(&r.values)
                .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
                .collect(),
            residual: finite(r.residual),
            passed: r.passed,
            runtime_ms: r.runtime_ms,
            error: r.error.as_deref(),
        })
        .collect();
    let report = ReportJson {
        experiment: name,
        seed: plan.seed,
        dim: plan.dim,
        columns: header,
        cells,
        summary: Summary {
            cells: rows.len(),
            failed: failing.len(),
            passed: failing.is_empty(),
            failing_cells: failing,
            max_residual,
            tol: plan.tol,
        },
    };
    let json_path = out.join(format!("{name}.json"));
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    fs::write(&json_path, text + "\n").map_err(|e| CliError::Output(json_path.clone(), e.to_string()))?;
    Ok(Written {
        csv: csv_path,
        json: json_path,
    })
}
