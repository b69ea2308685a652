use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One benchmark measurement. Field order defines the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub solver: String,
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub seed: u64,
    pub alpha: f64,
    pub tol: f64,
    pub iterations: usize,
    pub rel_residual: f64,
    pub mse_vs_reference: f64,
    pub psnr: f64,
    pub wall_time_s: f64,
}

pub const REPORT_HEADER: &str =
    "solver,width,height,density,seed,alpha,tol,iterations,rel_residual,mse_vs_reference,psnr,wall_time_s";

/// Serializes rows in the given order, header first.
pub fn report_csv_bytes(rows: &[ReportRow]) -> Result<Vec<u8>, csv::Error> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    writer.write_record(REPORT_HEADER.split(','))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.into_inner().map_err(|e| e.into_error().into())
}

pub fn write_report_csv(path: impl AsRef<Path>, rows: &[ReportRow]) -> Result<()> {
    let path = path.as_ref();
    let bytes = report_csv_bytes(rows).map_err(|source| Error::Csv {
        path: path.display().to_string(),
        source,
    })?;
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
