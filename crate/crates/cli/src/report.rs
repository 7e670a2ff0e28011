use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use recordtime::TestReport;

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    statistic: &'a str,
    value: f64,
    threshold: String,
    pass: bool,
    n_samples: u64,
    seed: u64,
}

/// Serialises reports as CSV (threshold rendered as `<=b`, `[lo,hi]` or empty)
/// or as a JSON array.
pub fn render_reports(reports: &[TestReport], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(reports).map_err(|e| CliError::Usage(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in reports {
                w.serialize(CsvRow {
                    suite: &r.suite,
                    statistic: &r.statistic,
                    value: r.value,
                    threshold: r.threshold.to_string(),
                    pass: r.pass,
                    n_samples: r.n_samples,
                    seed: r.seed,
                })
                .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(bytes).map_err(|e| CliError::io(path, e))
}

/// Path of the provenance sidecar written next to a report.
pub fn meta_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}

pub fn render_meta(meta: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(meta).expect("json values always serialise");
    out.push(b'\n');
    out
}
