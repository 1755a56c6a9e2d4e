//! Output serialization: CSV and JSON emitters plus atomic file writes.
//!
//! CSV files carry a `#`-comment preamble with the run parameters and
//! print every value with 15 significant digits, so files from identical
//! runs are byte-identical and parse back to the stored precision. JSON
//! files carry the full structures, including per-window counts for
//! simulated runs.

use std::path::Path;

use serde::Serialize;

use crate::analytic::{JsmdMatrix, SpectrumCurve};
use crate::config::EstimateReport;
use crate::error::{Error, Result};
use crate::oracle::ValidationReport;
use crate::setsim::EstimatedJsmd;

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 15 significant digits: enough that a reread value differs from the
/// stored one by less than 1 part in 1e14.
fn fmt_value(value: f64) -> String {
    format!("{value:.14e}")
}

/// Writes via a temporary sibling file and an atomic rename, so readers
/// never observe a half-written file and interrupted runs leave the
/// previous version intact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_error = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_error)?;
        }
    }
    let mut temp = path.as_os_str().to_owned();
    temp.push(".tmp");
    let temp = std::path::PathBuf::from(temp);
    std::fs::write(&temp, contents).map_err(io_error)?;
    std::fs::rename(&temp, path).map_err(io_error)
}

/// Matrix as CSV: one row per l_s, one named column per l_i.
pub fn jsmd_csv(matrix: &JsmdMatrix) -> String {
    let mut out = String::new();
    out.push_str("# joint mode distribution |C|^2 over (l_s, l_i)\n");
    out.push_str(&format!(
        "# gamma_s = {}, gamma_i = {}, p_s = {}, p_i = {}\n",
        fmt_value(matrix.gamma_s),
        fmt_value(matrix.gamma_i),
        matrix.p_s,
        matrix.p_i
    ));
    out.push_str(&format!("# normalization = {}\n", matrix.normalization));
    out.push_str(&format!("# tool_version = {TOOL_VERSION}\n"));
    out.push_str("l_s");
    for l_i in matrix.l_values() {
        out.push_str(&format!(",l_i={l_i}"));
    }
    out.push('\n');
    for l_s in matrix.l_values() {
        out.push_str(&l_s.to_string());
        for l_i in matrix.l_values() {
            out.push(',');
            out.push_str(&fmt_value(matrix.value(l_s, l_i)));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsmdJson<'a> {
    tool_version: &'static str,
    l_min: i32,
    l_max: i32,
    p_s: u32,
    p_i: u32,
    gamma_s: f64,
    gamma_i: f64,
    normalization: String,
    /// Rows in ascending l_s, columns in ascending l_i.
    values: Vec<&'a [f64]>,
}

pub fn jsmd_json(matrix: &JsmdMatrix) -> String {
    let size = matrix.size();
    let body = JsmdJson {
        tool_version: TOOL_VERSION,
        l_min: matrix.l_min,
        l_max: matrix.l_max,
        p_s: matrix.p_s,
        p_i: matrix.p_i,
        gamma_s: matrix.gamma_s,
        gamma_i: matrix.gamma_i,
        normalization: matrix.normalization.to_string(),
        values: matrix.values().chunks(size).collect(),
    };
    to_pretty_json(&body)
}

/// Spectrum curves as long-form CSV: one (l, γ, weight) row per sample.
pub fn spectrum_csv(curves: &[SpectrumCurve]) -> String {
    let mut out = String::new();
    out.push_str("# relative pair probability of the (l, -l, p = 0) cell vs gamma\n");
    out.push_str(&format!("# tool_version = {TOOL_VERSION}\n"));
    out.push_str("l,gamma,weight\n");
    for curve in curves {
        for sample in &curve.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                curve.l,
                fmt_value(sample.gamma),
                fmt_value(sample.weight)
            ));
        }
    }
    out
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    tool_version: &'static str,
    curves: &'a [SpectrumCurve],
}

pub fn spectrum_json(curves: &[SpectrumCurve]) -> String {
    to_pretty_json(&SpectrumJson {
        tool_version: TOOL_VERSION,
        curves,
    })
}

/// Validation cells as long-form CSV, one row per compared cell.
pub fn validation_csv(report: &ValidationReport) -> String {
    let mut out = String::new();
    out.push_str("# closed form vs overlap quadrature, max-normalized per gamma\n");
    out.push_str(&format!(
        "# tolerance = {}, max_deviation = {}, pass = {}\n",
        fmt_value(report.tolerance),
        fmt_value(report.max_deviation),
        report.pass
    ));
    out.push_str(&format!("# tool_version = {TOOL_VERSION}\n"));
    out.push_str("l,p_s,p_i,gamma,analytic,numeric,deviation,error\n");
    for cell in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            cell.l,
            cell.p_s,
            cell.p_i,
            fmt_value(cell.gamma),
            fmt_value(cell.analytic),
            fmt_value(cell.numeric),
            fmt_value(cell.deviation),
            cell.error.as_deref().unwrap_or("")
        ));
    }
    out
}

#[derive(Serialize)]
struct ValidationJson<'a> {
    tool_version: &'static str,
    #[serde(flatten)]
    report: &'a ValidationReport,
}

pub fn validation_json(report: &ValidationReport) -> String {
    to_pretty_json(&ValidationJson {
        tool_version: TOOL_VERSION,
        report,
    })
}

/// True when the mode list can label one grid axis: distinct l values
/// and one shared p.
fn clean_axis(modes: &[crate::lg::LgIndex]) -> bool {
    let p = modes[0].p;
    let mut seen = std::collections::BTreeSet::new();
    modes.iter().all(|mode| mode.p == p && seen.insert(mode.l))
}

/// Reconstructed grid as CSV. When both mode lists form clean l axes the
/// layout matches [`jsmd_csv`] (seeds as rows, projections as columns);
/// otherwise one long-form row per cell.
pub fn estimate_csv(estimate: &EstimatedJsmd, which: EstimateReport) -> String {
    let (label, grid, errors) = match which {
        EstimateReport::Calibrated => (
            "calibrated",
            &estimate.calibrated_normalized,
            &estimate.calibrated_standard_errors,
        ),
        EstimateReport::Raw => (
            "raw",
            &estimate.raw_normalized,
            &estimate.raw_standard_errors,
        ),
    };
    let mut out = String::new();
    out.push_str(&format!(
        "# {label} background-subtracted estimate, max-normalized\n"
    ));
    out.push_str(&format!(
        "# rng_seed = {}, extended = {}\n",
        estimate.rng_seed, estimate.extended
    ));
    out.push_str(&format!("# tool_version = {TOOL_VERSION}\n"));
    if clean_axis(&estimate.seed_modes) && clean_axis(&estimate.projection_modes) {
        out.push_str(&format!(
            "# rows: seed l (p = {}); columns: projection l (p = {})\n",
            estimate.seed_modes[0].p, estimate.projection_modes[0].p
        ));
        out.push_str("seed_l");
        for projection in &estimate.projection_modes {
            out.push_str(&format!(",l_i={}", projection.l));
        }
        out.push('\n');
        for (row, seed) in estimate.seed_modes.iter().enumerate() {
            out.push_str(&seed.l.to_string());
            for column in 0..estimate.projection_modes.len() {
                out.push(',');
                out.push_str(&fmt_value(grid[estimate.index(row, column)]));
            }
            out.push('\n');
        }
    } else {
        out.push_str("seed_l,seed_p,projection_l,projection_p,value,standard_error\n");
        for (row, seed) in estimate.seed_modes.iter().enumerate() {
            for (column, projection) in estimate.projection_modes.iter().enumerate() {
                let cell = estimate.index(row, column);
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    seed.l,
                    seed.p,
                    projection.l,
                    projection.p,
                    fmt_value(grid[cell]),
                    fmt_value(errors[cell])
                ));
            }
        }
    }
    out
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    tool_version: &'static str,
    #[serde(flatten)]
    estimate: &'a EstimatedJsmd,
}

/// Full simulated-run record, per-window counts included.
pub fn estimate_json(estimate: &EstimatedJsmd) -> String {
    to_pretty_json(&EstimateJson {
        tool_version: TOOL_VERSION,
        estimate,
    })
}

/// Sidecar describing one invocation. The timestamp lives here and only
/// here, so the data products themselves stay byte-identical across
/// reruns.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool_version: String,
    pub command: String,
    pub config_path: Option<String>,
    pub out_dir: String,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub unix_time_seconds: u64,
}

impl RunMetadata {
    pub fn new(command: &str, config_path: Option<&Path>, out_dir: &Path, format: &str) -> Self {
        RunMetadata {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config_path: config_path.map(|p| p.display().to_string()),
            out_dir: out_dir.display().to_string(),
            format: format.to_string(),
            rng_seed: None,
            unix_time_seconds: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty_json(self)
    }
}

fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report structures serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{jsmd_matrix, spectrum_vs_gamma, Normalization};
    use crate::lg::{BeamGeometry, LgIndex};
    use crate::oracle::validate_against_analytic;
    use crate::setsim::{estimate_jsmd, SetExperimentConfig};

    fn small_matrix() -> JsmdMatrix {
        let geometry = BeamGeometry::with_gammas(2.03, 2.03).unwrap();
        jsmd_matrix(-2..=2, 0, 0, &geometry, Normalization::GlobalMax).unwrap()
    }

    #[test]
    fn value_format_has_fifteen_significant_digits() {
        assert_eq!(fmt_value(1.0), "1.00000000000000e0");
        assert_eq!(fmt_value(0.79530005296782653), "7.95300052967827e-1");
        let text = fmt_value(std::f64::consts::PI);
        let reread: f64 = text.parse().unwrap();
        assert!((reread - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn atomic_write_replaces_and_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("file.csv");
        write_atomic(&path, "first\n").unwrap();
        write_atomic(&path, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second\n");
        let siblings: Vec<_> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|entry| entry.unwrap().file_name())
            .collect();
        assert_eq!(siblings, vec![std::ffi::OsString::from("file.csv")]);
    }

    #[test]
    fn jsmd_csv_round_trips_to_printed_precision() {
        let matrix = small_matrix();
        let text = jsmd_csv(&matrix);
        let rows: Vec<&str> = text.lines().filter(|line| !line.starts_with('#')).collect();
        assert_eq!(rows[0], "l_s,l_i=-2,l_i=-1,l_i=0,l_i=1,l_i=2");
        assert_eq!(rows.len(), 1 + matrix.size());
        // Row for l_s = 1, column l_i = -1.
        let fields: Vec<&str> = rows[4].split(',').collect();
        assert_eq!(fields[0], "1");
        let reread: f64 = fields[2].parse().unwrap();
        let stored = matrix.value(1, -1);
        assert!((reread - stored).abs() <= 1e-14 * stored.abs());
    }

    #[test]
    fn jsmd_json_carries_version_and_shape() {
        let matrix = small_matrix();
        let value: serde_json::Value = serde_json::from_str(&jsmd_json(&matrix)).unwrap();
        assert_eq!(value["tool_version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(value["values"].as_array().unwrap().len(), 5);
        assert_eq!(value["values"][0].as_array().unwrap().len(), 5);
        assert_eq!(value["normalization"], "global-max");
    }

    #[test]
    fn spectrum_csv_is_long_form() {
        let curves = spectrum_vs_gamma(&[0, 1], &[1.0, 2.0]);
        let text = spectrum_csv(&curves);
        let rows: Vec<&str> = text.lines().filter(|line| !line.starts_with('#')).collect();
        assert_eq!(rows[0], "l,gamma,weight");
        assert_eq!(rows.len(), 1 + 4);
        assert!(rows[1].starts_with("0,1.00000000000000e0,"));
    }

    #[test]
    fn validation_outputs_include_cells_and_verdict() {
        let report = validate_against_analytic(1, 0, &[1.0], 1e-6, &Default::default());
        let csv = validation_csv(&report);
        assert!(csv.contains("pass = true"));
        assert_eq!(
            csv.lines().filter(|line| !line.starts_with('#')).count(),
            1 + report.cells.len()
        );
        let json: serde_json::Value = serde_json::from_str(&validation_json(&report)).unwrap();
        assert_eq!(json["pass"], true);
        assert_eq!(json["cells"].as_array().unwrap().len(), report.cells.len());
    }

    fn small_estimate() -> EstimatedJsmd {
        let geometry = BeamGeometry::with_gammas(2.0, 2.0).unwrap();
        let mut config = SetExperimentConfig::new(geometry);
        config.seed_modes = (-1..=1).map(|l| LgIndex::new(l, 0)).collect();
        config.projection_modes = config.seed_modes.clone();
        estimate_jsmd(&config).unwrap()
    }

    #[test]
    fn estimate_csv_uses_grid_layout_for_clean_axes() {
        let estimate = small_estimate();
        let text = estimate_csv(&estimate, EstimateReport::Calibrated);
        let rows: Vec<&str> = text.lines().filter(|line| !line.starts_with('#')).collect();
        assert_eq!(rows[0], "seed_l,l_i=-1,l_i=0,l_i=1");
        assert_eq!(rows.len(), 1 + 3);
    }

    #[test]
    fn estimate_csv_falls_back_to_long_form() {
        let geometry = BeamGeometry::with_gammas(2.0, 2.0).unwrap();
        let mut config = SetExperimentConfig::new(geometry);
        config.seed_modes = vec![LgIndex::new(0, 0), LgIndex::new(0, 1)];
        config.projection_modes = vec![LgIndex::new(0, 0)];
        let estimate = estimate_jsmd(&config).unwrap();
        let text = estimate_csv(&estimate, EstimateReport::Raw);
        let rows: Vec<&str> = text.lines().filter(|line| !line.starts_with('#')).collect();
        assert_eq!(
            rows[0],
            "seed_l,seed_p,projection_l,projection_p,value,standard_error"
        );
        assert_eq!(rows.len(), 1 + 2);
    }

    #[test]
    fn estimate_json_includes_window_counts() {
        let estimate = small_estimate();
        let json: serde_json::Value = serde_json::from_str(&estimate_json(&estimate)).unwrap();
        assert_eq!(json["rng_seed"], 42);
        let records = json["records"].as_array().unwrap();
        assert_eq!(records.len(), 9);
        assert_eq!(records[0]["window_counts"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn metadata_isolates_the_timestamp() {
        let mut metadata = RunMetadata::new(
            "jsmd",
            Some(Path::new("configs/demo.toml")),
            Path::new("out"),
            "both",
        );
        metadata.rng_seed = Some(7);
        let json: serde_json::Value = serde_json::from_str(&metadata.to_json()).unwrap();
        assert!(json["unix_time_seconds"].as_u64().unwrap() > 1_500_000_000);
        assert_eq!(json["rng_seed"], 7);
        assert_eq!(json["command"], "jsmd");
    }
}
