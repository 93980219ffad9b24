//! The JSON run report printed on standard output and the CSV side files.
//!
//! Everything in the report except `wall_ms` is a pure function of the
//! invocation (including `--seed`), so re-running an identical command line
//! reproduces every numeric field bit-for-bit; `wall_ms` is measured time and
//! is excluded from that guarantee.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use gfspec::Barcode;

use crate::input::{InputError, InputResult};

pub const SCHEMA: &str = "v1";

#[derive(Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    /// Echo of the parsed inputs.
    pub inputs: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub grid: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub strict: bool,
    pub results: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<serde_json::Value>>,
    /// Machine-readable list of failed assertions; empty on success.
    pub failures: Vec<String>,
    pub verdict: &'static str,
    pub csv_files: Vec<String>,
    /// Elapsed wall-clock time; the one field exempt from determinism.
    pub wall_ms: u128,
}

/// What a subcommand hands back to `main` for assembly into the report.
#[derive(Default)]
pub struct Outcome {
    pub grid: serde_json::Value,
    pub tolerance: Option<f64>,
    pub results: serde_json::Value,
    pub trials: Option<Vec<serde_json::Value>>,
    pub failures: Vec<String>,
    pub csv_files: Vec<String>,
}

impl Outcome {
    pub fn fail(&mut self, message: impl Into<String>) {
        self.failures.push(message.into());
    }

    /// Record `condition`; on failure also push `message`.
    pub fn check(&mut self, condition: bool, message: impl Into<String>) -> bool {
        if !condition {
            self.fail(message);
        }
        condition
    }
}

fn create(dir: &Path, name: &str) -> InputResult<(fs::File, PathBuf)> {
    fs::create_dir_all(dir)
        .map_err(|e| InputError(format!("cannot create output directory {dir:?}: {e}")))?;
    let path = dir.join(name);
    let file = fs::File::create(&path)
        .map_err(|e| InputError(format!("cannot create {path:?}: {e}")))?;
    Ok((file, path))
}

/// Write `degree,birth,death` rows; infinite deaths are spelled `inf`.
pub fn write_barcode_csv(dir: &Path, name: &str, barcode: &Barcode) -> InputResult<String> {
    let (mut f, path) = create(dir, name)?;
    let mut text = String::from("degree,birth,death\n");
    for bar in barcode.bars() {
        let death = if bar.death.is_finite() {
            format!("{}", bar.death)
        } else {
            "inf".to_string()
        };
        text.push_str(&format!("{},{},{}\n", bar.degree, bar.birth, death));
    }
    f.write_all(text.as_bytes())
        .map_err(|e| InputError(format!("cannot write {path:?}: {e}")))?;
    Ok(path.display().to_string())
}

/// Write generic named float columns.
pub fn write_columns_csv(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<f64>],
) -> InputResult<String> {
    let (mut f, path) = create(dir, name)?;
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    f.write_all(text.as_bytes())
        .map_err(|e| InputError(format!("cannot write {path:?}: {e}")))?;
    Ok(path.display().to_string())
}

/// Round-trippable JSON for an `f64` (serde_json emits shortest-round-trip
/// decimal for finite values; infinities become strings).
pub fn json_f64(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else if v > 0.0 {
        serde_json::json!("inf")
    } else {
        serde_json::json!("-inf")
    }
}
