//! Deterministic report and table writers.
//!
//! All numeric output uses plain decimal notation with 12 significant
//! digits, UTF-8 encoding, and LF line endings, so repeated runs produce
//! byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;

use qref_core::scenarios::ScenarioReport;

use crate::config::{ResolvedConfig, SweepSpec};
use crate::CliError;

/// Format with 12 significant digits in plain decimal notation.
pub fn decimal12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.00000000000".to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text.as_bytes())
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    scenario: &'a str,
    config: &'a ResolvedConfig,
    seed: Option<u64>,
    sweep_spec: Option<&'a SweepSpec>,
    report: &'a ScenarioReport,
}

/// Write `report.json` (and `sweep.csv` / `fringe.csv` when the report
/// carries the corresponding tables) into `out_dir`.
pub fn write_outputs(
    out_dir: &Path,
    config: &ResolvedConfig,
    seed: Option<u64>,
    sweep_spec: Option<&SweepSpec>,
    report: &ScenarioReport,
) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out_dir.display())))?;

    let doc = ReportDocument {
        scenario: &report.scenario,
        config,
        seed,
        sweep_spec,
        report,
    };
    let mut body = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    body.push('\n');
    write_text(&out_dir.join("report.json"), &body)?;

    if let Some(sweep) = &report.sweep {
        let mut csv = String::new();
        csv.push_str(&sweep.parameter);
        for col in &sweep.columns {
            csv.push(',');
            csv.push_str(col);
        }
        csv.push('\n');
        for row in &sweep.rows {
            csv.push_str(&decimal12(row.value));
            for v in &row.values {
                csv.push(',');
                csv.push_str(&decimal12(*v));
            }
            csv.push('\n');
        }
        write_text(&out_dir.join("sweep.csv"), &csv)?;
    }

    if let Some(fringe) = &report.fringe {
        let mut csv = String::from("position,intensity\n");
        for (x, i) in fringe.positions.iter().zip(&fringe.intensity) {
            csv.push_str(&decimal12(*x));
            csv.push(',');
            csv.push_str(&decimal12(*i));
            csv.push('\n');
        }
        write_text(&out_dir.join("fringe.csv"), &csv)?;
    }

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_formatting_keeps_twelve_significant_digits() {
        assert_eq!(decimal12(0.0), "0.00000000000");
        assert_eq!(decimal12(1.0), "1.00000000000");
        assert_eq!(decimal12(0.5), "0.500000000000");
        assert_eq!(decimal12(-0.5), "-0.500000000000");
        assert_eq!(decimal12(1e-6), "0.00000100000000000");
        assert_eq!(decimal12(123456.789), "123456.789000");
        assert_eq!(decimal12(3.14159265358979), "3.14159265359");
        assert!(!decimal12(1e-6).contains('e'));
    }
}
